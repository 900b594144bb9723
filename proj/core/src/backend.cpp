#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "apx/backend.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace apx {

namespace {

using nlohmann::json;

constexpr const char* kGenericMask = "[MASK]";

std::string sha256_hex(const std::string& data) {
    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * SHA256_DIGEST_LENGTH);
    for (unsigned char byte : digest) {
        out.push_back(hex[byte >> 4]);
        out.push_back(hex[byte & 0xf]);
    }
    return out;
}

std::string format_temperature(double temperature) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", temperature);
    return buf;
}

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

std::string replace_all(std::string text, const std::string& from,
                        const std::string& to) {
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
    return text;
}

class SystemClock : public Clock {
public:
    std::chrono::steady_clock::time_point now() override {
        return std::chrono::steady_clock::now();
    }
    void sleep_for(std::chrono::milliseconds duration) override {
        std::this_thread::sleep_for(duration);
    }
};

class HttplibTransport : public HttpTransport {
public:
    HttpResponse post(const std::string& url, const std::string& body,
                      const std::vector<std::pair<std::string, std::string>>& headers,
                      double timeout_s) override {
        auto slash = url.find('/', url.find("://") + 3);
        std::string base = slash == std::string::npos ? url : url.substr(0, slash);
        std::string path = slash == std::string::npos ? "/" : url.substr(slash);

        httplib::Client client(base);
        client.set_connection_timeout(std::chrono::milliseconds(
            static_cast<long>(timeout_s * 1000)));
        client.set_read_timeout(std::chrono::milliseconds(
            static_cast<long>(timeout_s * 1000)));
        httplib::Headers hl;
        for (const auto& [name, value] : headers) hl.emplace(name, value);

        auto result = client.Post(path, hl, body, "application/json");
        if (!result) return HttpResponse{0, httplib::to_string(result.error())};
        return HttpResponse{result->status, result->body};
    }
};

/// Spaces request starts at 60/rpm seconds apart; the single shared mutable
/// piece of a backend, internally synchronized.
class RateLimiter {
public:
    RateLimiter(int requests_per_minute, std::shared_ptr<Clock> clock)
        : interval_ms_(requests_per_minute > 0 ? 60000 / requests_per_minute : 0),
          clock_(std::move(clock)) {}

    void acquire() {
        if (interval_ms_ == 0) return;
        std::lock_guard lock(mutex_);
        auto now = clock_->now();
        if (has_last_) {
            auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                now - last_);
            if (elapsed.count() < interval_ms_) {
                auto wait = std::chrono::milliseconds(interval_ms_ - elapsed.count());
                clock_->sleep_for(wait);
                now = clock_->now();
            }
        }
        last_ = now;
        has_last_ = true;
    }

private:
    long interval_ms_;
    std::shared_ptr<Clock> clock_;
    std::mutex mutex_;
    std::chrono::steady_clock::time_point last_{};
    bool has_last_ = false;
};

std::string summarize(const std::string& prompt) {
    std::string summary = prompt.substr(0, 96);
    for (char& c : summary) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    if (prompt.size() > 96) summary += "...";
    return summary;
}

class HttpBackendBase : public Backend {
public:
    HttpBackendBase(BackendConfig cfg, std::shared_ptr<Clock> clock,
                    std::shared_ptr<HttpTransport> transport)
        : cfg_(std::move(cfg)),
          clock_(std::move(clock)),
          transport_(std::move(transport)),
          limiter_(cfg_.requests_per_minute, clock_) {}

    const BackendConfig& config() const override { return cfg_; }

protected:
    std::string api_key() const {
        if (cfg_.api_key_env.empty()) return {};
        const char* key = std::getenv(cfg_.api_key_env.c_str());
        if (!key || !*key) {
            throw BackendError(BackendError::Code::Auth,
                               "api key environment variable '" + cfg_.api_key_env +
                                   "' is not set");
        }
        return key;
    }

    HttpResponse post_with_retries(const std::string& body,
                                   const std::string& digest) {
        std::vector<std::pair<std::string, std::string>> headers;
        std::string key = api_key();
        if (!key.empty()) headers.emplace_back("Authorization", "Bearer " + key);

        // Jitter from the request digest: deterministic per request, spread
        // across requests.
        std::seed_seq seed(digest.begin(), digest.end());
        std::mt19937 rng(seed);
        std::uniform_int_distribution<long> jitter(0, 250);

        for (int attempt = 0;; ++attempt) {
            limiter_.acquire();
            HttpResponse resp = transport_->post(cfg_.endpoint, body, headers,
                                                 cfg_.timeout_s);
            if (resp.status == 401 || resp.status == 403) {
                throw BackendError(BackendError::Code::Auth,
                                   "authentication rejected (HTTP " +
                                       std::to_string(resp.status) + ")");
            }
            bool retryable = resp.status == 0 || resp.status == 429 ||
                             resp.status >= 500;
            if (!retryable) return resp;
            if (attempt >= cfg_.max_retries) {
                if (resp.status == 429) {
                    throw BackendError(BackendError::Code::RateLimited,
                                       "rate limited after " +
                                           std::to_string(attempt + 1) + " attempts");
                }
                if (resp.status == 0) {
                    throw BackendError(BackendError::Code::Timeout,
                                       "request failed without response: " + resp.body);
                }
                throw BackendError(BackendError::Code::Http,
                                   "server error HTTP " + std::to_string(resp.status) +
                                       " after " + std::to_string(attempt + 1) +
                                       " attempts");
            }
            auto backoff = std::chrono::milliseconds(
                (500L << attempt) + jitter(rng));
            clock_->sleep_for(backoff);
        }
    }

    BackendConfig cfg_;
    std::shared_ptr<Clock> clock_;
    std::shared_ptr<HttpTransport> transport_;
    RateLimiter limiter_;
};

class ChatHttpBackend : public HttpBackendBase {
public:
    using HttpBackendBase::HttpBackendBase;

    CompletionResult complete(const CompletionRequest& req) override {
        if (req.prompt.empty()) {
            throw BackendError(BackendError::Code::Config, "prompt must be non-empty");
        }
        json body = {
            {"model", req.model.empty() ? cfg_.model : req.model},
            {"temperature", req.temperature},
            {"messages", json::array({{{"role", "user"}, {"content", req.prompt}}})},
        };
        auto start = clock_->now();
        HttpResponse resp = post_with_retries(body.dump(), fixture_key(req));
        auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
            clock_->now() - start);

        json doc;
        try {
            doc = json::parse(resp.body);
        } catch (const json::parse_error& e) {
            throw BackendError(BackendError::Code::MalformedResponse,
                               std::string("response is not JSON: ") + e.what());
        }
        if (!doc.contains("choices") || !doc["choices"].is_array() ||
            doc["choices"].empty()) {
            throw BackendError(BackendError::Code::MalformedResponse,
                               "response has no choices");
        }
        const json& first = doc["choices"][0];
        if (!first.contains("message") || !first["message"].contains("content") ||
            !first["message"]["content"].is_string()) {
            throw BackendError(BackendError::Code::MalformedResponse,
                               "first choice has no message content");
        }
        CompletionResult result;
        result.raw = first["message"]["content"].get<std::string>();
        result.backend = BackendKind::ChatHttp;
        result.model = req.model.empty() ? cfg_.model : req.model;
        result.latency_ms = latency.count();
        return result;
    }

    MaskPrediction fill_mask(const std::string&) override {
        throw BackendError(BackendError::Code::Config,
                           "chat backend does not support fill-mask");
    }
};

MaskPrediction parse_mask_response(const std::string& body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        throw BackendError(BackendError::Code::MalformedResponse,
                           std::string("fill-mask response is not JSON: ") + e.what());
    }
    // Hugging Face returns either [ {...}, ... ] or [ [ {...}, ... ] ].
    if (doc.is_array() && !doc.empty() && doc[0].is_array()) doc = doc[0];
    if (!doc.is_array() || doc.empty()) {
        throw BackendError(BackendError::Code::MalformedResponse,
                           "fill-mask response is not a non-empty array");
    }
    MaskPrediction prediction;
    for (const json& item : doc) {
        if (!item.contains("token_str") || !item.contains("score")) {
            throw BackendError(BackendError::Code::MalformedResponse,
                               "fill-mask candidate lacks token_str/score");
        }
        prediction.tokens.emplace_back(item["token_str"].get<std::string>(),
                                       item["score"].get<double>());
    }
    std::stable_sort(prediction.tokens.begin(), prediction.tokens.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return prediction;
}

void check_single_mask(const std::string& sentence) {
    std::size_t masks = count_occurrences(sentence, kGenericMask);
    if (masks == 0) {
        throw BackendError(BackendError::Code::NoMask,
                           "sentence contains no " + std::string(kGenericMask) +
                               " marker");
    }
    if (masks > 1) {
        throw BackendError(BackendError::Code::MultipleMasks,
                           "sentence contains " + std::to_string(masks) +
                               " mask markers, expected exactly one");
    }
}

class FillMaskBackend : public HttpBackendBase {
public:
    using HttpBackendBase::HttpBackendBase;

    CompletionResult complete(const CompletionRequest&) override {
        throw BackendError(BackendError::Code::Config,
                           "fill-mask backend does not support chat completion");
    }

    MaskPrediction fill_mask(const std::string& sentence) override {
        check_single_mask(sentence);
        std::string translated = replace_all(sentence, kGenericMask, cfg_.mask_token);
        json body = {{"inputs", translated}};
        CompletionRequest key_req{sentence, cfg_.model, cfg_.temperature, {}};
        HttpResponse resp = post_with_retries(body.dump(), fixture_key(key_req));
        return parse_mask_response(resp.body);
    }
};

class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(BackendConfig cfg)
        : cfg_(std::move(cfg)), store_(cfg_.fixture_dir) {}

    const BackendConfig& config() const override { return cfg_; }

    CompletionResult complete(const CompletionRequest& req) override {
        if (req.prompt.empty()) {
            throw BackendError(BackendError::Code::Config, "prompt must be non-empty");
        }
        CompletionResult result;
        result.raw = lookup(req);
        result.backend = BackendKind::Replay;
        result.model = req.model;
        result.from_fixture = true;
        return result;
    }

    MaskPrediction fill_mask(const std::string& sentence) override {
        check_single_mask(sentence);
        CompletionRequest req{sentence, cfg_.model, cfg_.temperature, {}};
        return parse_mask_response(lookup(req));
    }

private:
    std::string lookup(const CompletionRequest& req) {
        std::string digest = fixture_key(req);
        auto stored = store_.get(digest);
        if (!stored) {
            throw BackendError(BackendError::Code::FixtureMiss,
                               "no fixture for digest " + digest + " under " +
                                   store_.dir().string());
        }
        return *stored;
    }

    BackendConfig cfg_;
    FixtureStore store_;
};

class RecordingBackend : public Backend {
public:
    RecordingBackend(std::shared_ptr<Backend> inner, std::filesystem::path dir)
        : inner_(std::move(inner)), store_(std::move(dir)) {}

    const BackendConfig& config() const override { return inner_->config(); }

    CompletionResult complete(const CompletionRequest& req) override {
        CompletionResult result = inner_->complete(req);
        store_.put(fixture_key(req), result.raw, summarize(req.prompt));
        return result;
    }

    MaskPrediction fill_mask(const std::string& sentence) override {
        MaskPrediction prediction = inner_->fill_mask(sentence);
        json doc = json::array();
        for (const auto& [token, score] : prediction.tokens) {
            doc.push_back({{"token_str", token}, {"score", score}});
        }
        CompletionRequest req{sentence, inner_->config().model,
                              inner_->config().temperature, {}};
        store_.put(fixture_key(req), doc.dump(), summarize(sentence));
        return prediction;
    }

private:
    std::shared_ptr<Backend> inner_;
    FixtureStore store_;
};

}  // namespace

const char* to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::ChatHttp: return "chat_http";
        case BackendKind::FillMask: return "fill_mask";
        case BackendKind::Replay: return "replay";
    }
    return "unknown";
}

BackendKind backend_kind_from_string(std::string_view name) {
    if (name == "chat_http") return BackendKind::ChatHttp;
    if (name == "fill_mask") return BackendKind::FillMask;
    if (name == "replay") return BackendKind::Replay;
    throw BackendError(BackendError::Code::Config,
                       "unknown backend kind: " + std::string(name));
}

std::string fixture_key(const CompletionRequest& req) {
    std::string canonical;
    canonical.reserve(req.prompt.size() + req.model.size() + 16);
    canonical += req.prompt;
    canonical.push_back('\0');
    canonical += req.model;
    canonical.push_back('\0');
    canonical += format_temperature(req.temperature);
    return sha256_hex(canonical);
}

std::shared_ptr<Clock> system_clock() { return std::make_shared<SystemClock>(); }

std::shared_ptr<HttpTransport> httplib_transport() {
    return std::make_shared<HttplibTransport>();
}

FixtureStore::FixtureStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::optional<std::string> FixtureStore::get(const std::string& digest) const {
    std::lock_guard lock(mutex_);
    std::ifstream in(dir_ / (digest + ".txt"), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void FixtureStore::put(const std::string& digest, const std::string& raw,
                       const std::string& summary) {
    std::lock_guard lock(mutex_);
    std::filesystem::create_directories(dir_);
    {
        std::ofstream out(dir_ / (digest + ".txt"), std::ios::binary);
        out << raw;
    }
    nlohmann::json index = nlohmann::json::object();
    {
        std::ifstream in(dir_ / "index.json");
        if (in) {
            try {
                index = nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error&) {
                index = nlohmann::json::object();
            }
        }
    }
    index[digest] = summary;
    std::ofstream out(dir_ / "index.json");
    out << index.dump(2) << "\n";
}

std::shared_ptr<Backend> make_backend(const BackendConfig& cfg,
                                      std::shared_ptr<Clock> clock,
                                      std::shared_ptr<HttpTransport> transport) {
    if (!clock) clock = system_clock();
    if (cfg.temperature < 0) {
        throw BackendError(BackendError::Code::Config, "temperature must be >= 0");
    }
    if (cfg.max_retries < 0) {
        throw BackendError(BackendError::Code::Config, "max_retries must be >= 0");
    }
    switch (cfg.kind) {
        case BackendKind::Replay:
            if (cfg.fixture_dir.empty()) {
                throw BackendError(BackendError::Code::Config,
                                   "replay backend requires a fixture directory");
            }
            return std::make_shared<ReplayBackend>(cfg);
        case BackendKind::ChatHttp:
            if (cfg.endpoint.empty()) {
                throw BackendError(BackendError::Code::Config,
                                   "chat backend requires an endpoint URL");
            }
            if (!transport) transport = httplib_transport();
            return std::make_shared<ChatHttpBackend>(cfg, clock, transport);
        case BackendKind::FillMask:
            if (cfg.endpoint.empty()) {
                throw BackendError(BackendError::Code::Config,
                                   "fill-mask backend requires an endpoint URL");
            }
            if (!transport) transport = httplib_transport();
            return std::make_shared<FillMaskBackend>(cfg, clock, transport);
    }
    throw BackendError(BackendError::Code::Config, "unknown backend kind");
}

std::shared_ptr<Backend> make_recording_backend(std::shared_ptr<Backend> inner,
                                                std::filesystem::path record_dir) {
    return std::make_shared<RecordingBackend>(std::move(inner),
                                              std::move(record_dir));
}

}  // namespace apx
