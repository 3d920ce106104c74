#include "fashionx/bt.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cmath>
#include <future>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "fashionx/hash.hpp"

namespace fashionx {

using nlohmann::json;

CandidatePool prefilter(const std::string& query_id, const std::vector<double>& query_embedding,
                        const std::vector<GalleryItem>& gallery, int m) {
    if (m < 2) throw std::invalid_argument("pool size m must be >= 2");
    if (gallery.size() < static_cast<std::size_t>(m)) {
        throw GalleryTooSmall("gallery smaller than pool size m");
    }
    std::vector<std::pair<double, const GalleryItem*>> scored;
    scored.reserve(gallery.size());
    for (const auto& item : gallery) {
        scored.emplace_back(cosine(query_embedding, item.embedding), &item);
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second->id < b.second->id;
    });
    CandidatePool pool;
    pool.query_id = query_id;
    for (int i = 0; i < m; ++i) {
        pool.members.push_back(scored[static_cast<std::size_t>(i)].second->id);
        pool.prefilter_scores.push_back(scored[static_cast<std::size_t>(i)].first);
    }
    return pool;
}

std::vector<std::pair<std::string, std::string>> schedule(const CandidatePool& pool,
                                                          ScheduleMode mode) {
    (void)mode;  // round_robin is the only mode
    std::vector<std::pair<std::string, std::string>> tasks;
    const auto& m = pool.members;
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = i + 1; j < m.size(); ++j) tasks.emplace_back(m[i], m[j]);
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = i + 1; j < m.size(); ++j) tasks.emplace_back(m[j], m[i]);
    }
    return tasks;
}

ChatRequest comparison_request(const std::string& query_text, const std::string& first_id,
                               const std::string& second_id) {
    ChatRequest req;
    req.temperature = 0.0;
    req.max_tokens = 16;
    req.messages = {
        {"system",
         "You compare two candidate items against a query. Answer with exactly one word: "
         "'first' or 'second'. No ties."},
        {"user", "Query: " + query_text + "\nFirst: " + first_id + "\nSecond: " + second_id +
                     "\nWhich candidate matches the query better?"}};
    req.image_refs = {first_id, second_id};
    return req;
}

namespace {

// Returns true for "first", false for "second", nullopt when unparseable.
std::optional<bool> parse_preference(const std::string& reply) {
    std::string lower;
    lower.reserve(reply.size());
    for (unsigned char c : reply) lower.push_back(static_cast<char>(std::tolower(c)));
    auto f = lower.find("first");
    auto s = lower.find("second");
    if (f == std::string::npos && s == std::string::npos) return std::nullopt;
    if (f == std::string::npos) return false;
    if (s == std::string::npos) return true;
    return f < s;
}

}  // namespace

std::vector<ComparisonRecord> run_comparisons(
    const std::string& query_id, const std::string& query_text,
    const std::vector<std::pair<std::string, std::string>>& tasks, ChatOracle& oracle,
    int concurrency_limit, std::uint64_t run_seed) {
    auto run_one = [&](std::size_t index) {
        const auto& [left, right] = tasks[index];
        ComparisonRecord rec;
        rec.query_id = query_id;
        rec.left = left;
        rec.right = right;
        rec.order_index = static_cast<int>(index);
        ChatRequest req = comparison_request(query_text, left, right);
        std::optional<bool> pref;
        for (int attempt = 0; attempt < 2 && !pref; ++attempt) {
            if (attempt == 1) rec.retried = true;
            pref = parse_preference(oracle.chat(req));
        }
        if (!pref) {
            // Seeded coin flip, flagged.
            Rng coin(run_seed ^ fnv1a64(query_id + "\x1f" + left + "\x1f" + right));
            pref = coin.coin();
            rec.coin_flipped = true;
        }
        rec.left_won = *pref;
        return rec;
    };

    std::vector<ComparisonRecord> records(tasks.size());
    const std::size_t batch = static_cast<std::size_t>(std::max(1, concurrency_limit));
    for (std::size_t base = 0; base < tasks.size(); base += batch) {
        std::size_t end = std::min(tasks.size(), base + batch);
        if (batch == 1) {
            for (std::size_t i = base; i < end; ++i) records[i] = run_one(i);
        } else {
            std::vector<std::future<ComparisonRecord>> futures;
            for (std::size_t i = base; i < end; ++i) {
                futures.push_back(std::async(std::launch::async, run_one, i));
            }
            for (std::size_t i = base; i < end; ++i) records[i] = futures[i - base].get();
        }
    }
    return records;
}

ComparisonMatrix build_matrix(const CandidatePool& pool,
                              const std::vector<ComparisonRecord>& records, double lambda) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < pool.members.size(); ++i) index[pool.members[i]] = i;
    ComparisonMatrix matrix(pool.members.size());
    for (const auto& rec : records) {
        auto li = index.find(rec.left);
        auto ri = index.find(rec.right);
        if (li == index.end() || ri == index.end()) continue;
        if (rec.left_won) {
            matrix.wins[li->second][ri->second] += 1.0;
        } else {
            matrix.wins[ri->second][li->second] += 1.0;
        }
    }
    matrix.add_pseudo_counts(lambda);
    return matrix;
}

double bt_log_likelihood(const ComparisonMatrix& matrix, const std::vector<double>& pi) {
    double ll = 0;
    for (std::size_t i = 0; i < matrix.n; ++i) {
        for (std::size_t j = 0; j < matrix.n; ++j) {
            if (i == j || matrix.wins[i][j] == 0) continue;
            ll += matrix.wins[i][j] * std::log(pi[i] / (pi[i] + pi[j]));
        }
    }
    return ll;
}

StrengthVector fit_bt(const ComparisonMatrix& matrix, double epsilon, int max_iter) {
    const std::size_t n = matrix.n;
    StrengthVector result;
    if (n == 0) return result;
    std::vector<double> pi(n, 1.0 / static_cast<double>(n));

    std::vector<double> total_wins(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) total_wins[i] += matrix.wins[i][j];
        }
    }

    std::vector<double> next(n);
    for (int iter = 0; iter < max_iter; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            double denom = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                double n_ij = matrix.wins[i][j] + matrix.wins[j][i];
                if (n_ij > 0) denom += n_ij / (pi[i] + pi[j]);
            }
            next[i] = denom > 0 ? total_wins[i] / denom : pi[i];
        }
        double sum = std::accumulate(next.begin(), next.end(), 0.0);
        for (double& v : next) v /= sum;

        double max_log_change = 0;
        for (std::size_t i = 0; i < n; ++i) {
            max_log_change = std::max(max_log_change, std::fabs(std::log(next[i]) - std::log(pi[i])));
        }
        pi = next;
        ++result.iterations;
        double ll = bt_log_likelihood(matrix, pi);
#ifndef NDEBUG
        if (!result.log_likelihood_trace.empty()) {
            assert(ll >= result.log_likelihood_trace.back() - 1e-9);
        }
#endif
        result.log_likelihood_trace.push_back(ll);
        if (max_log_change < epsilon) {
            result.converged = true;
            break;
        }
    }
    result.strengths = std::move(pi);
    return result;
}

std::vector<std::string> rank(const StrengthVector& strengths, const CandidatePool& pool) {
    std::vector<std::size_t> order(pool.members.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (strengths.strengths[a] != strengths.strengths[b]) {
            return strengths.strengths[a] > strengths.strengths[b];
        }
        if (pool.prefilter_scores[a] != pool.prefilter_scores[b]) {
            return pool.prefilter_scores[a] > pool.prefilter_scores[b];
        }
        return pool.members[a] < pool.members[b];
    });
    std::vector<std::string> out;
    out.reserve(order.size());
    for (std::size_t i : order) out.push_back(pool.members[i]);
    return out;
}

QueryDiagnostics retrieve(const std::string& query_id, const std::string& query_text,
                          const std::vector<double>& query_embedding,
                          const std::vector<GalleryItem>& gallery, ChatOracle& oracle,
                          const BtParams& params, std::uint64_t run_seed, int concurrency_limit) {
    QueryDiagnostics d;
    d.query_id = query_id;
    d.pool = prefilter(query_id, query_embedding, gallery, params.pool_size);

    // Full-gallery prefilter order for the tail of the ranking.
    std::vector<std::pair<double, std::string>> all_scored;
    for (const auto& item : gallery) {
        all_scored.emplace_back(cosine(query_embedding, item.embedding), item.id);
    }
    std::stable_sort(all_scored.begin(), all_scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    std::vector<std::string> pool_ranking;
    try {
        auto tasks = schedule(d.pool);
        d.records = run_comparisons(query_id, query_text, tasks, oracle, concurrency_limit, run_seed);
        ComparisonMatrix matrix = build_matrix(d.pool, d.records, params.lambda);
        d.strengths = fit_bt(matrix, params.epsilon, params.max_iter);
        pool_ranking = rank(d.strengths, d.pool);
    } catch (const OracleError&) {
        d.bt_failed = true;
        pool_ranking = d.pool.members;  // prefilter order
    }

    std::vector<std::string> in_pool(pool_ranking.begin(), pool_ranking.end());
    d.ranking = pool_ranking;
    for (const auto& [score, id] : all_scored) {
        if (std::find(in_pool.begin(), in_pool.end(), id) == in_pool.end()) {
            d.ranking.push_back(id);
        }
    }
    return d;
}

std::string diagnostics_to_json(const QueryDiagnostics& d) {
    json j;
    j["query_id"] = d.query_id;
    j["pool"] = json::array();
    for (std::size_t i = 0; i < d.pool.members.size(); ++i) {
        j["pool"].push_back({{"id", d.pool.members[i]}, {"score", d.pool.prefilter_scores[i]}});
    }
    j["records"] = json::array();
    for (const auto& r : d.records) {
        j["records"].push_back({{"left", r.left},
                                {"right", r.right},
                                {"winner", r.left_won ? "left" : "right"},
                                {"order_index", r.order_index},
                                {"retried", r.retried},
                                {"coin_flipped", r.coin_flipped}});
    }
    j["strengths"] = d.strengths.strengths;
    j["converged"] = d.strengths.converged;
    j["iterations"] = d.strengths.iterations;
    j["bt_failed"] = d.bt_failed;
    j["ranking"] = d.ranking;
    return j.dump();
}

}  // namespace fashionx
