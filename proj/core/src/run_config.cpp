#include "apx/run_config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace apx {

namespace {

using nlohmann::json;

BackendConfig parse_backend(const std::string& name, const json& node,
                            const std::filesystem::path& config_dir) {
    BackendConfig cfg;
    if (!node.contains("kind")) {
        throw ConfigError("backend '" + name + "': missing 'kind'");
    }
    try {
        cfg.kind = backend_kind_from_string(node["kind"].get<std::string>());
    } catch (const BackendError& e) {
        throw ConfigError("backend '" + name + "': " + e.what());
    }
    cfg.endpoint = node.value("endpoint", "");
    cfg.model = node.value("model", "");
    cfg.temperature = node.value("temperature", 0.0);
    cfg.api_key_env = node.value("api_key_env", "");
    cfg.timeout_s = node.value("timeout_s", 30.0);
    cfg.max_retries = node.value("max_retries", 3);
    cfg.requests_per_minute = node.value("requests_per_minute", 0);
    cfg.max_concurrency = node.value("max_concurrency", 1);
    cfg.mask_token = node.value("mask_token", "[MASK]");
    if (node.contains("fixture_dir")) {
        std::filesystem::path dir = node["fixture_dir"].get<std::string>();
        cfg.fixture_dir = dir.is_absolute() ? dir : config_dir / dir;
    }
    if (cfg.temperature < 0) {
        throw ConfigError("backend '" + name + "': temperature must be >= 0");
    }
    if (cfg.kind == BackendKind::Replay && cfg.fixture_dir.empty()) {
        throw ConfigError("backend '" + name +
                          "': replay backends require 'fixture_dir'");
    }
    if (cfg.kind != BackendKind::Replay && cfg.endpoint.empty()) {
        throw ConfigError("backend '" + name + "': missing 'endpoint'");
    }
    return cfg;
}

}  // namespace

const BackendConfig& RunConfig::backend(const std::string& name) const {
    auto it = backends.find(name);
    if (it != backends.end()) return it->second;
    std::string available;
    for (const auto& [key, _] : backends) {
        if (!available.empty()) available += ", ";
        available += key;
    }
    throw ConfigError("unknown backend '" + name + "'; configured backends: " +
                      (available.empty() ? "(none)" : available));
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");

    const std::filesystem::path config_dir =
        std::filesystem::absolute(path).parent_path();

    RunConfig cfg;
    cfg.n_max = doc.value("n_max", 5);
    if (cfg.n_max < 1) throw ConfigError("n_max must be >= 1");
    if (doc.contains("truncation")) {
        try {
            cfg.truncation =
                truncation_from_string(doc["truncation"].get<std::string>());
        } catch (const EvaluationError& e) {
            throw ConfigError(e.what());
        }
    }
    if (doc.contains("distractor_pool")) {
        std::filesystem::path file = doc["distractor_pool"].get<std::string>();
        cfg.distractor_pool_file = file.is_absolute() ? file : config_dir / file;
        if (!std::filesystem::exists(cfg.distractor_pool_file)) {
            throw ConfigError("distractor pool file does not exist: " +
                              cfg.distractor_pool_file.string());
        }
    }
    cfg.base_iri = doc.value("base_iri", cfg.base_iri);
    cfg.strict_ground_truth = doc.value("strict_ground_truth", false);
    cfg.seed = doc.value("seed", 42u);
    cfg.max_concurrency = doc.value("max_concurrency", 1);

    if (!doc.contains("backends") || !doc["backends"].is_object() ||
        doc["backends"].empty()) {
        throw ConfigError("config must define at least one backend");
    }
    for (const auto& [name, node] : doc["backends"].items()) {
        BackendConfig backend = parse_backend(name, node, config_dir);
        if (backend.kind == BackendKind::Replay &&
            !std::filesystem::exists(backend.fixture_dir)) {
            throw ConfigError("backend '" + name + "': fixture directory does not "
                              "exist: " + backend.fixture_dir.string());
        }
        cfg.backends.emplace(name, std::move(backend));
    }
    return cfg;
}

}  // namespace apx
