#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "apx/backend.hpp"
#include "apx/evaluation.hpp"

namespace apx {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::string message)
        : std::runtime_error(std::move(message)) {}
};

/// Declarative run configuration loaded from a JSON file. Secrets never live
/// here: backends name the environment variable that holds their API key.
struct RunConfig {
    std::map<std::string, BackendConfig> backends;
    int n_max = 5;
    Truncation truncation = Truncation::Symmetric;
    std::filesystem::path distractor_pool_file;
    std::string base_iri = "http://example.org/action-patterns#";
    bool strict_ground_truth = false;
    unsigned seed = 42;
    int max_concurrency = 1;

    /// Throws ConfigError when the name is unknown; the message lists the
    /// configured backends.
    const BackendConfig& backend(const std::string& name) const;
};

RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace apx
