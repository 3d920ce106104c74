#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fashionx/oracle.hpp"
#include "fashionx/rng.hpp"

namespace fashionx {

struct CandidatePool {
    std::string query_id;
    std::vector<std::string> members;        // sorted by prefilter score desc, ties by id asc
    std::vector<double> prefilter_scores;    // parallel to members
};

struct ComparisonRecord {
    std::string query_id;
    std::string left;
    std::string right;
    bool left_won = false;
    int order_index = 0;  // presentation position in the schedule
    bool retried = false;
    bool coin_flipped = false;
};

struct ComparisonMatrix {
    std::size_t n = 0;
    std::vector<std::vector<double>> wins;  // wins[i][j]: count of i beating j

    explicit ComparisonMatrix(std::size_t size = 0)
        : n(size), wins(size, std::vector<double>(size, 0.0)) {}

    void add_pseudo_counts(double lambda) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i != j) wins[i][j] += lambda;
            }
        }
    }
};

struct StrengthVector {
    std::vector<double> strengths;  // positive, sum to 1
    int iterations = 0;
    bool converged = false;
    std::vector<double> log_likelihood_trace;  // one entry per iteration
};

struct BtParams {
    int pool_size = 8;       // m
    double lambda = 0.5;     // pseudo-count
    double epsilon = 1e-8;   // max |log pi change| convergence tolerance
    int max_iter = 1000;
};

class GalleryTooSmall : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GalleryItem {
    std::string id;
    std::vector<double> embedding;
};

// Top-m by cosine similarity; deterministic tie-break by ascending id.
CandidatePool prefilter(const std::string& query_id, const std::vector<double>& query_embedding,
                        const std::vector<GalleryItem>& gallery, int m);

enum class ScheduleMode { round_robin };

// Round robin: every unordered pair twice, once per presentation order.
std::vector<std::pair<std::string, std::string>> schedule(const CandidatePool& pool,
                                                          ScheduleMode mode = ScheduleMode::round_robin);

// Fixed two-option comparison prompt; the reply must name "first" or "second".
ChatRequest comparison_request(const std::string& query_text, const std::string& first_id,
                               const std::string& second_id);

std::vector<ComparisonRecord> run_comparisons(
    const std::string& query_id, const std::string& query_text,
    const std::vector<std::pair<std::string, std::string>>& tasks, ChatOracle& oracle,
    int concurrency_limit, std::uint64_t run_seed);

ComparisonMatrix build_matrix(const CandidatePool& pool,
                              const std::vector<ComparisonRecord>& records, double lambda);

// Regularized Bradley-Terry MLE via MM updates.
StrengthVector fit_bt(const ComparisonMatrix& matrix, double epsilon = 1e-8, int max_iter = 1000);

double bt_log_likelihood(const ComparisonMatrix& matrix, const std::vector<double>& strengths);

// Pool members by strength desc, ties by prefilter score desc then id asc.
std::vector<std::string> rank(const StrengthVector& strengths, const CandidatePool& pool);

struct QueryDiagnostics {
    std::string query_id;
    CandidatePool pool;
    std::vector<ComparisonRecord> records;
    StrengthVector strengths;
    std::vector<std::string> ranking;  // full gallery
    bool bt_failed = false;            // prefilter-only fallback
};

// Full pipeline for one query: prefilter -> schedule -> comparisons -> fit -> rank.
// Non-pool gallery items follow the pool, ordered by prefilter score.
QueryDiagnostics retrieve(const std::string& query_id, const std::string& query_text,
                          const std::vector<double>& query_embedding,
                          const std::vector<GalleryItem>& gallery, ChatOracle& oracle,
                          const BtParams& params, std::uint64_t run_seed,
                          int concurrency_limit = 1);

std::string diagnostics_to_json(const QueryDiagnostics& d);

}  // namespace fashionx
