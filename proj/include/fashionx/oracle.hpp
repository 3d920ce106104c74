#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fashionx {

struct ChatMessage {
    std::string role;  // "system" | "user" | "assistant"
    std::string text;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    std::vector<std::string> image_refs;
    double temperature = 0.0;
    int max_tokens = 1024;
};

// Stable digest of the request content; cache key.
std::string chat_request_key(const std::string& model, const ChatRequest& req);

class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OracleUnavailable : public OracleError {
public:
    using OracleError::OracleError;
};

class AuthError : public OracleError {
public:
    using OracleError::OracleError;
};

class ChatOracle {
public:
    virtual ~ChatOracle() = default;
    virtual std::string chat(const ChatRequest& req) = 0;
};

class EmbedOracle {
public:
    virtual ~EmbedOracle() = default;
    // Unit-norm vectors, one per input, in input order.
    virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& inputs) = 0;
};

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) return 0;
    return dot / std::sqrt(na * nb);
}

// Content-addressed on-disk response cache.
class ResponseCache {
public:
    // Empty dir disables persistence; entries then live in memory only.
    explicit ResponseCache(std::string dir);

    std::optional<std::string> get(const std::string& key);
    void put(const std::string& key, const std::string& value);

private:
    std::string dir_;
    std::mutex mu_;
    std::map<std::string, std::string> mem_;
};

struct RetryPolicy {
    int max_attempts = 3;
    double backoff_base_s = 0.5;
};

struct GatewayConfig {
    std::string chat_endpoint;
    std::string chat_model;
    std::string embed_endpoint;
    std::string embed_model;
    std::string api_key_env = "FASHIONX_API_KEY";
    int max_concurrency = 4;
    std::string cache_dir;
    RetryPolicy retry;
};

// Transport seam: given (endpoint, json body) returns (http status, body).
using HttpPost = std::function<std::pair<int, std::string>(const std::string&, const std::string&)>;

// Chat-completions style client with retry/backoff and caching.
class HttpOracleGateway : public ChatOracle, public EmbedOracle {
public:
    explicit HttpOracleGateway(GatewayConfig config, HttpPost transport = nullptr);

    std::string chat(const ChatRequest& req) override;
    std::vector<std::vector<double>> embed(const std::vector<std::string>& inputs) override;

    std::uint64_t network_calls() const { return network_calls_; }

private:
    std::string post_with_retry(const std::string& endpoint, const std::string& body);

    GatewayConfig config_;
    HttpPost transport_;
    ResponseCache cache_;
    std::uint64_t network_calls_ = 0;
    std::mutex mu_;
};

// Deterministic scripted oracle used by every test and the mock CLI paths.
class MockOracle : public ChatOracle, public EmbedOracle {
public:
    using ChatFn = std::function<std::string(const ChatRequest&)>;
    using EmbedFn = std::function<std::vector<double>(const std::string&)>;

    MockOracle(std::uint64_t seed, ChatFn chat_fn, EmbedFn embed_fn = nullptr);

    std::string chat(const ChatRequest& req) override;
    std::vector<std::vector<double>> embed(const std::vector<std::string>& inputs) override;

    std::uint64_t seed() const { return seed_; }
    std::uint64_t chat_calls() const { return chat_calls_; }

private:
    std::uint64_t seed_;
    ChatFn chat_fn_;
    EmbedFn embed_fn_;
    std::uint64_t chat_calls_ = 0;
    std::mutex mu_;
};

class UnknownBehavior : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Lookup key used by the answer-from-gold behavior.
inline std::string gold_key(const std::string& question, const std::vector<std::string>& image_refs) {
    std::string key = question;
    for (const auto& ref : image_refs) key += "\x1f" + ref;
    return key;
}

// Named behaviors: "answer-from-gold" (needs gold map), "prefer-first",
// "prefer-smaller-id", "uniform-choice", "hash-embedding".
std::shared_ptr<MockOracle> make_mock_oracle(
    const std::string& behavior, std::uint64_t seed,
    std::map<std::string, std::string> gold_by_question = {});

// Deterministic pseudo-embedding of a string: unit vector derived from its
// content hash. Identical strings embed identically; cosine of distinct
// strings is noise around 0.
std::vector<double> hash_embedding(const std::string& text, std::size_t dim = 64);

}  // namespace fashionx
