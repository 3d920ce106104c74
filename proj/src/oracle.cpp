#include "fashionx/oracle.hpp"

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "fashionx/hash.hpp"
#include "fashionx/rng.hpp"

#ifndef FASHIONX_NO_HTTPLIB
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#endif

namespace fashionx {

using nlohmann::json;
namespace fs = std::filesystem;

std::string chat_request_key(const std::string& model, const ChatRequest& req) {
    json j;
    j["model"] = model;
    j["temperature"] = req.temperature;
    j["max_tokens"] = req.max_tokens;
    j["messages"] = json::array();
    for (const auto& m : req.messages) j["messages"].push_back({{"role", m.role}, {"text", m.text}});
    j["image_refs"] = req.image_refs;
    return content_digest(j.dump());
}

ResponseCache::ResponseCache(std::string dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) fs::create_directories(dir_);
}

std::optional<std::string> ResponseCache::get(const std::string& key) {
    std::lock_guard lock(mu_);
    auto it = mem_.find(key);
    if (it != mem_.end()) return it->second;
    if (dir_.empty()) return std::nullopt;
    fs::path p = fs::path(dir_) / (key + ".resp");
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string value = ss.str();
    mem_[key] = value;
    return value;
}

void ResponseCache::put(const std::string& key, const std::string& value) {
    std::lock_guard lock(mu_);
    mem_[key] = value;
    if (dir_.empty()) return;
    fs::path p = fs::path(dir_) / (key + ".resp");
    fs::path tmp = fs::path(dir_) / (key + ".tmp");
    std::ofstream out(tmp, std::ios::binary);
    out << value;
    out.close();
    fs::rename(tmp, p);
}

namespace {

HttpPost default_transport() {
#ifndef FASHIONX_NO_HTTPLIB
    return [](const std::string& endpoint, const std::string& body) -> std::pair<int, std::string> {
        // endpoint: scheme://host[:port]/path
        auto pos = endpoint.find("://");
        if (pos == std::string::npos) throw OracleError("bad endpoint: " + endpoint);
        auto path_pos = endpoint.find('/', pos + 3);
        std::string base = path_pos == std::string::npos ? endpoint : endpoint.substr(0, path_pos);
        std::string path = path_pos == std::string::npos ? "/" : endpoint.substr(path_pos);
        httplib::Client client(base);
        client.set_read_timeout(120, 0);
        auto res = client.Post(path, body, "application/json");
        if (!res) throw OracleError("transport failure contacting " + endpoint);
        return {res->status, res->body};
    };
#else
    return nullptr;
#endif
}

bool is_transient_status(int status) {
    return status == 408 || status == 429 || status >= 500;
}

}  // namespace

HttpOracleGateway::HttpOracleGateway(GatewayConfig config, HttpPost transport)
    : config_(std::move(config)),
      transport_(transport ? std::move(transport) : default_transport()),
      cache_(config_.cache_dir) {}

std::string HttpOracleGateway::post_with_retry(const std::string& endpoint,
                                               const std::string& body) {
    Rng jitter(fnv1a64(body) ^ 0x5bf0f1a2c3d4e5f6ull);
    std::string last_error;
    for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
        {
            std::lock_guard lock(mu_);
            ++network_calls_;
        }
        int status = 0;
        std::string resp;
        try {
            std::tie(status, resp) = transport_(endpoint, body);
        } catch (const std::exception& ex) {
            status = -1;
            last_error = ex.what();
        }
        if (status == 200) return resp;
        if (status == 401 || status == 403) throw AuthError("authentication failed (" + std::to_string(status) + ")");
        if (status > 0 && !is_transient_status(status)) {
            throw OracleError("oracle returned status " + std::to_string(status) + ": " + resp);
        }
        if (status > 0) last_error = "status " + std::to_string(status);
        if (attempt < config_.retry.max_attempts) {
            double delay = config_.retry.backoff_base_s * static_cast<double>(1 << (attempt - 1));
            delay *= 0.5 + jitter.uniform();
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        }
    }
    throw OracleUnavailable("oracle unavailable after " + std::to_string(config_.retry.max_attempts) +
                            " attempts: " + last_error);
}

std::string HttpOracleGateway::chat(const ChatRequest& req) {
    const std::string key = "chat-" + chat_request_key(config_.chat_model, req);
    if (auto hit = cache_.get(key)) return *hit;

    json body;
    body["model"] = config_.chat_model;
    body["temperature"] = req.temperature;
    body["max_tokens"] = req.max_tokens;
    body["messages"] = json::array();
    for (const auto& m : req.messages) {
        if (m.role == "user" && !req.image_refs.empty() && &m == &req.messages.back()) {
            json content = json::array();
            for (const auto& ref : req.image_refs) {
                content.push_back({{"type", "image_url"}, {"image_url", {{"url", ref}}}});
            }
            content.push_back({{"type", "text"}, {"text", m.text}});
            body["messages"].push_back({{"role", m.role}, {"content", content}});
        } else {
            body["messages"].push_back({{"role", m.role}, {"content", m.text}});
        }
    }
    const char* api_key = std::getenv(config_.api_key_env.c_str());
    if (!api_key) throw AuthError("credential env var not set: " + config_.api_key_env);

    std::string resp = post_with_retry(config_.chat_endpoint, body.dump());
    json parsed = json::parse(resp);
    std::string text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    cache_.put(key, text);
    return text;
}

std::vector<std::vector<double>> HttpOracleGateway::embed(const std::vector<std::string>& inputs) {
    std::vector<std::vector<double>> out(inputs.size());
    std::vector<std::size_t> misses;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        std::string key = "embed-" + content_digest(config_.embed_model + "\x1f" + inputs[i]);
        if (auto hit = cache_.get(key)) {
            out[i] = json::parse(*hit).get<std::vector<double>>();
        } else {
            misses.push_back(i);
        }
    }
    if (!misses.empty()) {
        json body;
        body["model"] = config_.embed_model;
        body["input"] = json::array();
        for (std::size_t i : misses) body["input"].push_back(inputs[i]);
        std::string resp = post_with_retry(config_.embed_endpoint, body.dump());
        json parsed = json::parse(resp);
        const json& data = parsed.at("data");
        for (std::size_t k = 0; k < misses.size(); ++k) {
            auto vec = data.at(k).at("embedding").get<std::vector<double>>();
            double norm = 0;
            for (double v : vec) norm += v * v;
            norm = std::sqrt(norm);
            if (norm > 0) {
                for (double& v : vec) v /= norm;
            }
            out[misses[k]] = vec;
            std::string key =
                "embed-" + content_digest(config_.embed_model + "\x1f" + inputs[misses[k]]);
            cache_.put(key, json(vec).dump());
        }
    }
    return out;
}

MockOracle::MockOracle(std::uint64_t seed, ChatFn chat_fn, EmbedFn embed_fn)
    : seed_(seed), chat_fn_(std::move(chat_fn)), embed_fn_(std::move(embed_fn)) {
    if (!embed_fn_) embed_fn_ = [](const std::string& text) { return hash_embedding(text); };
}

std::string MockOracle::chat(const ChatRequest& req) {
    std::lock_guard lock(mu_);
    ++chat_calls_;
    if (!chat_fn_) throw OracleError("mock has no chat behavior");
    return chat_fn_(req);
}

std::vector<std::vector<double>> MockOracle::embed(const std::vector<std::string>& inputs) {
    std::vector<std::vector<double>> out;
    out.reserve(inputs.size());
    for (const auto& s : inputs) out.push_back(embed_fn_(s));
    return out;
}

std::vector<double> hash_embedding(const std::string& text, std::size_t dim) {
    Rng rng(fnv1a64(text));
    std::vector<double> v(dim);
    double norm = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        v[i] = rng.uniform() * 2.0 - 1.0;
        norm += v[i] * v[i];
    }
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

namespace {

std::string last_user_text(const ChatRequest& req) {
    for (auto it = req.messages.rbegin(); it != req.messages.rend(); ++it) {
        if (it->role == "user") return it->text;
    }
    return {};
}

// Highest "<label> N" ordinal present in a choice question.
int count_labeled(const std::string& question, const std::string& label) {
    int max_n = 0;
    const std::string needle = label + " ";
    for (std::size_t i = 0; i + needle.size() < question.size(); ++i) {
        if (question.compare(i, needle.size(), needle) == 0) {
            std::size_t j = i + needle.size();
            int n = 0;
            while (j < question.size() && std::isdigit(static_cast<unsigned char>(question[j]))) {
                n = n * 10 + (question[j] - '0');
                ++j;
            }
            if (n > max_n) max_n = n;
        }
    }
    return max_n;
}

std::string field_after(const std::string& text, const std::string& label) {
    auto pos = text.find(label);
    if (pos == std::string::npos) return {};
    pos += label.size();
    auto end = text.find('\n', pos);
    std::string v = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    while (!v.empty() && (v.front() == ' ')) v.erase(v.begin());
    while (!v.empty() && (v.back() == ' ' || v.back() == '\r')) v.pop_back();
    return v;
}

}  // namespace

std::shared_ptr<MockOracle> make_mock_oracle(const std::string& behavior, std::uint64_t seed,
                                             std::map<std::string, std::string> gold) {
    if (behavior == "answer-from-gold") {
        auto gold_ptr = std::make_shared<std::map<std::string, std::string>>(std::move(gold));
        return std::make_shared<MockOracle>(seed, [gold_ptr](const ChatRequest& req) {
            // Keyed by question text plus attached image refs.
            std::string key = last_user_text(req);
            for (const auto& ref : req.image_refs) key += "\x1f" + ref;
            auto it = gold_ptr->find(key);
            if (it == gold_ptr->end()) return std::string("I don't know.");
            return it->second;
        });
    }
    if (behavior == "prefer-first") {
        return std::make_shared<MockOracle>(seed, [](const ChatRequest&) { return std::string("first"); });
    }
    if (behavior == "prefer-smaller-id") {
        return std::make_shared<MockOracle>(seed, [](const ChatRequest& req) {
            std::string text = last_user_text(req);
            std::string a = field_after(text, "First:");
            std::string b = field_after(text, "Second:");
            return a <= b ? std::string("first") : std::string("second");
        });
    }
    if (behavior == "uniform-choice") {
        auto rng = std::make_shared<Rng>(seed);
        auto mu = std::make_shared<std::mutex>();
        return std::make_shared<MockOracle>(seed, [rng, mu](const ChatRequest& req) {
            std::string q = last_user_text(req);
            int k_img = count_labeled(q, "Image");
            int k_opt = count_labeled(q, "Option");
            std::string label = k_opt > k_img ? "Option" : "Image";
            int k = std::max(std::max(k_img, k_opt), 1);
            std::lock_guard lock(*mu);
            int pick = static_cast<int>(rng->below(static_cast<std::uint64_t>(k))) + 1;
            return label + " " + std::to_string(pick);
        });
    }
    if (behavior == "hash-embedding") {
        return std::make_shared<MockOracle>(seed, nullptr);
    }
    throw UnknownBehavior("unknown mock behavior: " + behavior);
}

}  // namespace fashionx
