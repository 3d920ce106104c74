#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fashionx/oracle.hpp"
#include "fashionx/qa_forge.hpp"

namespace fashionx {

struct DialoguePrediction {
    std::string qa_id;
    std::vector<std::string> candidates;  // 1..3 answers, first is primary
};

struct RankingJudgment {
    std::string query_id;
    std::vector<std::string> ranking;  // permutation of the gallery
    std::set<std::string> relevant;    // non-empty
};

struct TaskScore {
    double a_at_1 = 0;
    double acc = 0;
    std::size_t n = 0;
};

struct RetrievalScore {
    double r_at_1 = 0;
    double r_at_10 = 0;
    double r_at_20 = 0;
    double map = 0;
    std::size_t n = 0;
};

struct ScoreReport {
    std::map<std::string, TaskScore> per_task;  // keyed by task name
    std::optional<RetrievalScore> retrieval;
    std::optional<TaskScore> cir;
    double cir_threshold = 0.75;
    double mean_acc = 0;  // unweighted mean of per-task Acc
};

class UnknownQaId : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class KOutOfRange : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Lowercase, strip leading/trailing punctuation and articles, collapse
// whitespace. Idempotent.
std::string normalize_answer(const std::string& text);

// Extracted option ordinal for choice-form answers ("Image 2", "(b)",
// "option 3"); nullopt when none present.
std::optional<int> extract_option(const std::string& text);

bool match(const std::string& prediction, const std::vector<std::string>& gold_answers,
           std::optional<int> target_index = std::nullopt);

// A@1 / Acc over one task shard; predictions with unknown qa_ids throw,
// missing predictions count as wrong.
TaskScore score_dialogue(const std::vector<DialoguePrediction>& predictions,
                         const std::vector<QAPair>& gold_shard);

bool score_cir(const std::string& prediction, const std::string& reference, EmbedOracle& oracle,
               double threshold = 0.75);

double recall_at_k(const std::vector<RankingJudgment>& judgments, std::size_t k);

double average_precision(const RankingJudgment& judgment);
double mean_ap(const std::vector<RankingJudgment>& judgments);

RetrievalScore score_retrieval(const std::vector<RankingJudgment>& judgments);

ScoreReport aggregate_report(const std::map<std::string, TaskScore>& per_task,
                             std::optional<RetrievalScore> retrieval = std::nullopt,
                             std::optional<TaskScore> cir = std::nullopt,
                             double cir_threshold = 0.75);

// Runs a chat oracle over a QA shard, one candidate per question.
std::vector<DialoguePrediction> predict_with_oracle(const std::vector<QAPair>& shard,
                                                    ChatOracle& oracle);

nlohmann::json report_to_json(const ScoreReport& report);
// Fixed-width table mirroring the dialogue-results column layout.
std::string render_report_table(const ScoreReport& report);

}  // namespace fashionx
