#include "fashionx/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fashionx {

using nlohmann::json;

std::string normalize_answer(const std::string& text) {
    // Lowercase and collapse whitespace, mapping punctuation to spaces.
    std::string collapsed;
    bool in_space = true;
    for (unsigned char c : text) {
        bool space_like = std::isspace(c) || std::ispunct(c);
        if (space_like) {
            in_space = true;
            continue;
        }
        if (in_space && !collapsed.empty()) collapsed.push_back(' ');
        in_space = false;
        collapsed.push_back(static_cast<char>(std::tolower(c)));
    }
    // Drop leading articles.
    std::istringstream words(collapsed);
    std::vector<std::string> tokens;
    std::string w;
    while (words >> w) tokens.push_back(w);
    std::size_t start = 0;
    while (start < tokens.size() &&
           (tokens[start] == "a" || tokens[start] == "an" || tokens[start] == "the")) {
        ++start;
    }
    std::string out;
    for (std::size_t i = start; i < tokens.size(); ++i) {
        if (i > start) out += ' ';
        out += tokens[i];
    }
    return out;
}

std::optional<int> extract_option(const std::string& text) {
    std::string norm = normalize_answer(text);
    std::istringstream words(norm);
    std::vector<std::string> tokens;
    std::string w;
    while (words >> w) tokens.push_back(w);

    auto is_number = [](const std::string& s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
            return std::isdigit(c);
        });
    };

    // "image 2" / "option 3" anywhere in the text; last occurrence wins so
    // "the answer is image 2" works.
    std::optional<int> found;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        if ((tokens[i] == "image" || tokens[i] == "option") && is_number(tokens[i + 1])) {
            found = std::stoi(tokens[i + 1]);
        }
    }
    if (found) return found;

    // A bare number or bare letter a-h as the whole (normalized) answer.
    if (tokens.size() == 1) {
        if (is_number(tokens[0])) return std::stoi(tokens[0]);
        if (tokens[0].size() == 1 && tokens[0][0] >= 'a' && tokens[0][0] <= 'h') {
            return tokens[0][0] - 'a' + 1;
        }
    }
    return std::nullopt;
}

bool match(const std::string& prediction, const std::vector<std::string>& gold_answers,
           std::optional<int> target_index) {
    std::string norm_pred = normalize_answer(prediction);
    for (const auto& gold : gold_answers) {
        if (norm_pred == normalize_answer(gold)) return true;
    }
    if (target_index) {
        auto opt = extract_option(prediction);
        if (opt && *opt == *target_index) return true;
    }
    return false;
}

TaskScore score_dialogue(const std::vector<DialoguePrediction>& predictions,
                         const std::vector<QAPair>& gold_shard) {
    std::map<std::string, const QAPair*> by_id;
    for (const auto& qa : gold_shard) by_id[qa.qa_id] = &qa;

    std::map<std::string, const DialoguePrediction*> pred_by_id;
    for (const auto& p : predictions) {
        if (!by_id.count(p.qa_id)) throw UnknownQaId("prediction for unknown qa_id: " + p.qa_id);
        pred_by_id[p.qa_id] = &p;
    }

    TaskScore score;
    score.n = gold_shard.size();
    if (score.n == 0) return score;
    std::size_t first_correct = 0;
    std::size_t any_correct = 0;
    for (const auto& qa : gold_shard) {
        auto it = pred_by_id.find(qa.qa_id);
        if (it == pred_by_id.end()) continue;  // missing prediction counts as wrong
        const auto& cands = it->second->candidates;
        if (cands.empty()) continue;
        if (match(cands[0], qa.answers, qa.target_index)) ++first_correct;
        std::size_t limit = std::min<std::size_t>(cands.size(), 3);
        for (std::size_t i = 0; i < limit; ++i) {
            if (match(cands[i], qa.answers, qa.target_index)) {
                ++any_correct;
                break;
            }
        }
    }
    score.a_at_1 = static_cast<double>(first_correct) / static_cast<double>(score.n);
    score.acc = static_cast<double>(any_correct) / static_cast<double>(score.n);
    return score;
}

bool score_cir(const std::string& prediction, const std::string& reference, EmbedOracle& oracle,
               double threshold) {
    auto vecs = oracle.embed({prediction, reference});
    return cosine(vecs[0], vecs[1]) >= threshold;  // boundary inclusive
}

double recall_at_k(const std::vector<RankingJudgment>& judgments, std::size_t k) {
    if (judgments.empty()) return 0;
    std::size_t hits = 0;
    for (const auto& j : judgments) {
        if (k < 1 || k > j.ranking.size()) throw KOutOfRange("k out of range for ranking");
        for (std::size_t i = 0; i < k; ++i) {
            if (j.relevant.count(j.ranking[i])) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(judgments.size());
}

double average_precision(const RankingJudgment& judgment) {
    std::size_t found = 0;
    double sum = 0;
    for (std::size_t i = 0; i < judgment.ranking.size(); ++i) {
        if (judgment.relevant.count(judgment.ranking[i])) {
            ++found;
            sum += static_cast<double>(found) / static_cast<double>(i + 1);
        }
    }
    if (judgment.relevant.empty()) return 0;
    return sum / static_cast<double>(judgment.relevant.size());
}

double mean_ap(const std::vector<RankingJudgment>& judgments) {
    if (judgments.empty()) return 0;
    double sum = 0;
    for (const auto& j : judgments) sum += average_precision(j);
    return sum / static_cast<double>(judgments.size());
}

RetrievalScore score_retrieval(const std::vector<RankingJudgment>& judgments) {
    RetrievalScore score;
    score.n = judgments.size();
    if (judgments.empty()) return score;
    auto safe_recall = [&](std::size_t k) {
        std::size_t min_len = judgments[0].ranking.size();
        for (const auto& j : judgments) min_len = std::min(min_len, j.ranking.size());
        return recall_at_k(judgments, std::min(k, min_len));
    };
    score.r_at_1 = safe_recall(1);
    score.r_at_10 = safe_recall(10);
    score.r_at_20 = safe_recall(20);
    score.map = mean_ap(judgments);
    return score;
}

ScoreReport aggregate_report(const std::map<std::string, TaskScore>& per_task,
                             std::optional<RetrievalScore> retrieval,
                             std::optional<TaskScore> cir, double cir_threshold) {
    ScoreReport report;
    report.per_task = per_task;
    report.retrieval = retrieval;
    report.cir = cir;
    report.cir_threshold = cir_threshold;
    double sum = 0;
    std::size_t count = 0;
    for (const auto& [name, score] : per_task) {
        sum += score.acc;
        ++count;
    }
    if (cir) {
        sum += cir->acc;
        ++count;
    }
    report.mean_acc = count ? sum / static_cast<double>(count) : 0;
    return report;
}

std::vector<DialoguePrediction> predict_with_oracle(const std::vector<QAPair>& shard,
                                                    ChatOracle& oracle) {
    std::vector<DialoguePrediction> predictions;
    predictions.reserve(shard.size());
    for (const auto& qa : shard) {
        ChatRequest req;
        req.temperature = 0.0;
        req.messages = {{"system", "Answer the fashion question about the attached image(s)."},
                        {"user", qa.question}};
        req.image_refs = qa.image_refs;
        predictions.push_back({qa.qa_id, {oracle.chat(req)}});
    }
    return predictions;
}

json report_to_json(const ScoreReport& report) {
    json j;
    j["per_task"] = json::object();
    for (const auto& [name, s] : report.per_task) {
        j["per_task"][name] = {{"a_at_1", s.a_at_1}, {"acc", s.acc}, {"n", s.n}};
    }
    if (report.retrieval) {
        j["retrieval"] = {{"r_at_1", report.retrieval->r_at_1},
                          {"r_at_10", report.retrieval->r_at_10},
                          {"r_at_20", report.retrieval->r_at_20},
                          {"map", report.retrieval->map},
                          {"n", report.retrieval->n}};
    }
    if (report.cir) {
        j["cir"] = {{"acc", report.cir->acc},
                    {"threshold", report.cir_threshold},
                    {"n", report.cir->n}};
    }
    j["mean_acc"] = report.mean_acc;
    return j;
}

std::string render_report_table(const ScoreReport& report) {
    // Column order follows the dialogue-results table: style tasks, scene,
    // color, then retrieval QA tasks, then Mean Acc.
    static const char* preferred_order[] = {
        "style_single", "style_multi", "scene_single", "scene_multi", "attr_color",
        "attr_design",  "attr_material", "assist_global", "assist_local",
        "ret_i2t",      "ret_t2i",     "ret_i2i",      "ret_cir",     "alignment"};
    std::ostringstream out;
    out << std::left << std::setw(16) << "Task" << std::right << std::setw(8) << "A@1"
        << std::setw(8) << "Acc" << std::setw(10) << "n" << "\n";
    auto row = [&](const std::string& name, const TaskScore& s) {
        out << std::left << std::setw(16) << name << std::right << std::fixed
            << std::setprecision(3) << std::setw(8) << s.a_at_1 << std::setw(8) << s.acc
            << std::setw(10) << s.n << "\n";
    };
    std::set<std::string> printed;
    for (const char* name : preferred_order) {
        auto it = report.per_task.find(name);
        if (it != report.per_task.end()) {
            row(name, it->second);
            printed.insert(name);
        }
    }
    for (const auto& [name, s] : report.per_task) {
        if (!printed.count(name)) row(name, s);
    }
    if (report.cir) row("cir(sim)", *report.cir);
    if (report.retrieval) {
        out << std::left << std::setw(16) << "retrieval" << std::right << std::fixed
            << std::setprecision(3) << "  R@1=" << report.retrieval->r_at_1
            << " R@10=" << report.retrieval->r_at_10 << " R@20=" << report.retrieval->r_at_20
            << " mAP=" << report.retrieval->map << " n=" << report.retrieval->n << "\n";
    }
    out << std::left << std::setw(16) << "Mean Acc" << std::right << std::fixed
        << std::setprecision(3) << std::setw(16) << report.mean_acc << "\n";
    return out.str();
}

}  // namespace fashionx
