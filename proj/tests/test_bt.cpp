#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "fashionx/bt.hpp"
#include "fashionx/hash.hpp"

using namespace fashionx;

namespace {

std::string field_after(const std::string& text, const std::string& label) {
    auto pos = text.find(label);
    if (pos == std::string::npos) return {};
    pos += label.size();
    auto end = text.find('\n', pos);
    std::string v = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    while (!v.empty() && v.front() == ' ') v.erase(v.begin());
    return v;
}

// Oracle that always prefers the candidate with the higher true score.
MockOracle score_oracle(const std::map<std::string, double>& scores) {
    return MockOracle(1, [scores](const ChatRequest& req) {
        const std::string& text = req.messages.back().text;
        std::string a = field_after(text, "First: ");
        std::string b = field_after(text, "Second: ");
        return scores.at(a) >= scores.at(b) ? std::string("first") : std::string("second");
    });
}

std::vector<GalleryItem> random_gallery(std::size_t n, std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<GalleryItem> gallery;
    for (std::size_t i = 0; i < n; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "g%03zu", i);
        GalleryItem item;
        item.id = buf;
        double norm = 0;
        for (std::size_t d = 0; d < dim; ++d) {
            item.embedding.push_back(rng.uniform() * 2 - 1);
            norm += item.embedding.back() * item.embedding.back();
        }
        norm = std::sqrt(norm);
        for (double& x : item.embedding) x /= norm;
        gallery.push_back(std::move(item));
    }
    return gallery;
}

}  // namespace

TEST_CASE("prefilter ranks an exact duplicate first and breaks ties by id") {
    auto gallery = random_gallery(100, 16, 3);
    std::vector<double> query = gallery[42].embedding;
    CandidatePool pool = prefilter("q", query, gallery, 8);
    CHECK(pool.members[0] == gallery[42].id);
    CHECK(pool.prefilter_scores[0] == doctest::Approx(1.0));

    // Two items with identical embeddings: the lower id must come first.
    std::vector<GalleryItem> tied = {{"b", {1, 0}}, {"a", {1, 0}}, {"c", {0, 1}}, {"d", {0, -1}}};
    CandidatePool tp = prefilter("q", {1, 0}, tied, 2);
    CHECK(tp.members == std::vector<std::string>{"a", "b"});
}

TEST_CASE("prefilter equals a brute-force top-m scan") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto gallery = random_gallery(50, 8, seed);
        Rng rng(seed + 1000);
        std::vector<double> query;
        double norm = 0;
        for (int d = 0; d < 8; ++d) {
            query.push_back(rng.uniform() * 2 - 1);
            norm += query.back() * query.back();
        }
        for (double& x : query) x /= std::sqrt(norm);

        CandidatePool pool = prefilter("q", query, gallery, 8);

        // Independent exhaustive scan.
        std::vector<std::pair<double, std::string>> scored;
        for (const auto& item : gallery) scored.emplace_back(cosine(query, item.embedding), item.id);
        std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (std::size_t i = 0; i < 8; ++i) CHECK(pool.members[i] == scored[i].second);
    }
}

TEST_CASE("round-robin schedule covers every pair in both orders") {
    CandidatePool pool;
    pool.members = {"a", "b", "c", "d"};
    auto tasks = schedule(pool);
    CHECK(tasks.size() == 12);
    std::set<std::pair<std::string, std::string>> seen(tasks.begin(), tasks.end());
    CHECK(seen.size() == 12);  // each ordered pair exactly once
    for (const auto& x : pool.members) {
        for (const auto& y : pool.members) {
            if (x != y) CHECK(seen.count({x, y}) == 1);
        }
    }

    pool.members = {"a", "b"};
    CHECK(schedule(pool).size() == 2);
}

TEST_CASE("run_comparisons reproduces a deterministic preference") {
    std::map<std::string, double> scores = {{"a", 3}, {"b", 2}, {"c", 1}};
    auto oracle = score_oracle(scores);
    CandidatePool pool;
    pool.members = {"a", "b", "c"};
    auto tasks = schedule(pool);
    auto records = run_comparisons("q", "query", tasks, oracle, 1, 7);
    REQUIRE(records.size() == tasks.size());
    for (const auto& rec : records) {
        bool expect_left = scores.at(rec.left) >= scores.at(rec.right);
        CHECK(rec.left_won == expect_left);
        CHECK_FALSE(rec.retried);
        CHECK_FALSE(rec.coin_flipped);
    }
}

TEST_CASE("unparseable replies retry once, then fall back to a seeded coin") {
    SUBCASE("garbage once then 'first'") {
        int calls = 0;
        MockOracle oracle(1, [&](const ChatRequest&) {
            return (++calls % 2 == 1) ? std::string("???") : std::string("first");
        });
        auto records = run_comparisons("q", "query", {{"a", "b"}}, oracle, 1, 7);
        REQUIRE(records.size() == 1);
        CHECK(records[0].retried);
        CHECK_FALSE(records[0].coin_flipped);
        CHECK(records[0].left_won);
    }
    SUBCASE("always garbage flips a deterministic coin") {
        MockOracle oracle(1, [](const ChatRequest&) { return std::string("???"); });
        auto r1 = run_comparisons("q", "query", {{"a", "b"}, {"b", "a"}}, oracle, 1, 7);
        auto r2 = run_comparisons("q", "query", {{"a", "b"}, {"b", "a"}}, oracle, 1, 7);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(r1[i].coin_flipped);
            CHECK(r1[i].retried);
            CHECK(r1[i].left_won == r2[i].left_won);
        }
    }
}

TEST_CASE("comparison records are identical at concurrency 1 vs 8") {
    std::map<std::string, double> scores;
    CandidatePool pool;
    for (int i = 0; i < 8; ++i) {
        std::string id = "c" + std::to_string(i);
        pool.members.push_back(id);
        scores[id] = 8 - i;
    }
    auto tasks = schedule(pool);
    auto oracle1 = score_oracle(scores);
    auto oracle8 = score_oracle(scores);
    auto r1 = run_comparisons("q", "query", tasks, oracle1, 1, 7);
    auto r8 = run_comparisons("q", "query", tasks, oracle8, 8, 7);
    REQUIRE(r1.size() == r8.size());
    for (std::size_t i = 0; i < r1.size(); ++i) {
        CHECK(r1[i].left == r8[i].left);
        CHECK(r1[i].right == r8[i].right);
        CHECK(r1[i].left_won == r8[i].left_won);
    }
}

TEST_CASE("fit_bt dominance and symmetry on two items") {
    ComparisonMatrix m(2);
    m.wins[0][1] = 10;
    m.add_pseudo_counts(0.5);
    auto fit = fit_bt(m);
    CHECK(fit.converged);
    CHECK(fit.strengths[0] > fit.strengths[1]);

    ComparisonMatrix even(2);
    even.wins[0][1] = 5;
    even.wins[1][0] = 5;
    even.add_pseudo_counts(0.5);
    auto fe = fit_bt(even);
    CHECK(std::abs(fe.strengths[0] - fe.strengths[1]) < 1e-9);
}

TEST_CASE("fit_bt recovers known strengths from sampled comparisons") {
    const std::vector<double> truth = {0.6, 0.3, 0.1};
    std::mt19937_64 gen(12345);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    ComparisonMatrix m(3);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i + 1; j < 3; ++j) {
            double p = truth[i] / (truth[i] + truth[j]);
            for (int t = 0; t < 10000; ++t) {
                if (unif(gen) < p) m.wins[i][j] += 1;
                else m.wins[j][i] += 1;
            }
        }
    }
    m.add_pseudo_counts(0.5);
    auto fit = fit_bt(m);
    CHECK(fit.converged);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(fit.strengths[i] - truth[i]) / truth[i] < 0.02);
    }

    // Log-likelihood trace is monotone nondecreasing.
    for (std::size_t i = 1; i < fit.log_likelihood_trace.size(); ++i) {
        CHECK(fit.log_likelihood_trace[i] >= fit.log_likelihood_trace[i - 1] - 1e-9);
    }

    // Independent cross-check: no simplex grid point beats the fitted optimum.
    double fitted_ll = bt_log_likelihood(m, fit.strengths);
    double best_grid = -1e300;
    for (double p1 = 0.005; p1 < 1.0; p1 += 0.005) {
        for (double p2 = 0.005; p1 + p2 < 1.0; p2 += 0.005) {
            double ll = bt_log_likelihood(m, {p1, p2, 1.0 - p1 - p2});
            best_grid = std::max(best_grid, ll);
        }
    }
    CHECK(fitted_ll >= best_grid - 1e-6);
}

TEST_CASE("rank orders by strength with prefilter tie-breaks") {
    CandidatePool pool;
    pool.members = {"x", "y", "z"};
    pool.prefilter_scores = {0.9, 0.8, 0.7};
    StrengthVector s;
    s.strengths = {0.3, 0.5, 0.2};
    CHECK(rank(s, pool) == std::vector<std::string>{"y", "x", "z"});

    s.strengths = {0.25, 0.5, 0.25};  // x and z tied; x has the higher prefilter score
    CHECK(rank(s, pool) == std::vector<std::string>{"y", "x", "z"});
}

TEST_CASE("noiseless total-order oracle is recovered exactly, 1000 instances") {
    Rng rng(99);
    int recovered = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        CandidatePool pool;
        std::map<std::string, double> scores;
        std::vector<double> ranks = {8, 7, 6, 5, 4, 3, 2, 1};
        rng.shuffle(ranks);
        for (int i = 0; i < 8; ++i) {
            std::string id = "c" + std::to_string(i);
            pool.members.push_back(id);
            pool.prefilter_scores.push_back(0.5);
            scores[id] = ranks[static_cast<std::size_t>(i)];
        }
        auto oracle = score_oracle(scores);
        auto records = run_comparisons("q", "query", schedule(pool), oracle, 1, trial);
        auto fit = fit_bt(build_matrix(pool, records, 0.5));
        auto order = rank(fit, pool);

        std::vector<std::string> expected = pool.members;
        std::sort(expected.begin(), expected.end(),
                  [&](const std::string& a, const std::string& b) { return scores[a] > scores[b]; });
        if (order == expected) ++recovered;
    }
    CHECK(recovered == 1000);
}

TEST_CASE("retrieve ranks the in-pool ground truth first with a consistent oracle") {
    auto gallery = random_gallery(20, 16, 5);
    // Ground truth duplicates the query embedding and wins every comparison.
    gallery.push_back({"a00", gallery[3].embedding});
    std::map<std::string, double> scores;
    for (const auto& item : gallery) scores[item.id] = item.id == "a00" ? 100 : cosine(gallery[3].embedding, item.embedding);
    auto oracle = score_oracle(scores);
    BtParams params;
    auto d = retrieve("q", "query", gallery[3].embedding, gallery, oracle, params, 7);
    CHECK_FALSE(d.bt_failed);
    CHECK(d.ranking.size() == gallery.size());
    CHECK(d.ranking[0] == "a00");
}

TEST_CASE("retrieve falls back to the prefilter rank for items outside the pool") {
    auto gallery = random_gallery(20, 16, 6);
    std::vector<double> query = gallery[0].embedding;

    std::map<std::string, double> scores;
    for (const auto& item : gallery) scores[item.id] = cosine(query, item.embedding);
    auto oracle = score_oracle(scores);
    BtParams params;
    auto d = retrieve("q", "query", query, gallery, oracle, params, 7);

    // Non-pool items must appear after the pool, in prefilter order.
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& item : gallery) scored.emplace_back(cosine(query, item.embedding), item.id);
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<std::string> tail_expected;
    for (std::size_t i = 8; i < scored.size(); ++i) tail_expected.push_back(scored[i].second);
    std::vector<std::string> tail(d.ranking.begin() + 8, d.ranking.end());
    CHECK(tail == tail_expected);
}

TEST_CASE("retrieve marks bt_failed and keeps prefilter order when the oracle dies") {
    auto gallery = random_gallery(12, 8, 7);
    MockOracle oracle(1, [](const ChatRequest&) -> std::string {
        throw OracleUnavailable("down");
    });
    BtParams params;
    auto d = retrieve("q", "query", gallery[0].embedding, gallery, oracle, params, 7);
    CHECK(d.bt_failed);
    CHECK(d.ranking.size() == gallery.size());
    std::vector<std::string> head(d.ranking.begin(), d.ranking.begin() + 8);
    CHECK(head == d.pool.members);
}

TEST_CASE("retrieve replays identically for a fixed seed") {
    auto gallery = random_gallery(15, 8, 8);
    auto run = [&] {
        auto oracle = make_mock_oracle("uniform-choice", 3);
        BtParams params;
        auto d = retrieve("q", "query", gallery[2].embedding, gallery, *oracle, params, 7);
        return diagnostics_to_json(d);
    };
    CHECK(run() == run());
}
