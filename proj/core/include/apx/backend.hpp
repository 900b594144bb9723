#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace apx {

enum class BackendKind { ChatHttp, FillMask, Replay };

const char* to_string(BackendKind kind);
BackendKind backend_kind_from_string(std::string_view name);

struct BackendConfig {
    BackendKind kind = BackendKind::Replay;
    std::string endpoint;            // ChatHttp / FillMask
    std::string model;
    double temperature = 0.0;        // 0 for reproducible evaluation
    std::string api_key_env;         // name of the env var holding the key
    double timeout_s = 30.0;
    int max_retries = 3;
    int requests_per_minute = 0;     // 0 = uncapped
    int max_concurrency = 1;
    std::string mask_token = "[MASK]";  // model-specific mask token
    std::filesystem::path fixture_dir;  // Replay source / record sink
};

struct CompletionRequest {
    std::string prompt;
    std::string model;
    double temperature = 0.0;
    std::string request_id;  // excluded from fixture keys
};

struct CompletionResult {
    std::string raw;  // unmodified model output
    BackendKind backend;
    std::string model;
    long latency_ms = 0;
    bool from_fixture = false;
};

/// Ranked fill-mask candidates; scores are non-increasing.
struct MaskPrediction {
    std::vector<std::pair<std::string, double>> tokens;
};

class BackendError : public std::runtime_error {
public:
    enum class Code {
        Auth, RateLimited, Timeout, FixtureMiss, MalformedResponse,
        Config, NoMask, MultipleMasks, Http
    };

    BackendError(Code code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

/// Stable content digest over (prompt, model, temperature) — request ids and
/// timestamps excluded. Identical on every platform.
std::string fixture_key(const CompletionRequest& req);

/// Injectable time source so retry backoff and rate limiting are testable.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::chrono::steady_clock::time_point now() = 0;
    virtual void sleep_for(std::chrono::milliseconds duration) = 0;
};

std::shared_ptr<Clock> system_clock();

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// Minimal POST transport; the default implementation uses cpp-httplib.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse post(
        const std::string& url, const std::string& body,
        const std::vector<std::pair<std::string, std::string>>& headers,
        double timeout_s) = 0;
};

std::shared_ptr<HttpTransport> httplib_transport();

/// On-disk store of raw responses keyed by fixture digest. One file per
/// digest plus an index.json mapping digest to a prompt summary.
class FixtureStore {
public:
    explicit FixtureStore(std::filesystem::path dir);

    std::optional<std::string> get(const std::string& digest) const;
    void put(const std::string& digest, const std::string& raw,
             const std::string& summary);
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    mutable std::mutex mutex_;
};

/// Uniform completion interface over chat HTTP, fill-mask HTTP and replay.
class Backend {
public:
    virtual ~Backend() = default;

    /// Sends one chat completion (single user message) and returns the first
    /// choice text, verbatim.
    virtual CompletionResult complete(const CompletionRequest& req) = 0;

    /// Predicts candidates for the single [MASK] marker in the sentence.
    virtual MaskPrediction fill_mask(const std::string& sentence) = 0;

    virtual const BackendConfig& config() const = 0;
};

/// Builds a backend from its config. clock/transport default to the real
/// ones. For Replay configs the fixture directory must exist.
std::shared_ptr<Backend> make_backend(
    const BackendConfig& cfg,
    std::shared_ptr<Clock> clock = nullptr,
    std::shared_ptr<HttpTransport> transport = nullptr);

/// Wraps a live backend and persists every raw response under its fixture
/// key, so a recorded run can be replayed offline forever.
std::shared_ptr<Backend> make_recording_backend(
    std::shared_ptr<Backend> inner, std::filesystem::path record_dir);

}  // namespace apx
