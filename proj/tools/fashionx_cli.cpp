#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fashionx/annotation.hpp"
#include "fashionx/annotator.hpp"
#include "fashionx/hash.hpp"
#include "fashionx/rng.hpp"
#include "fashionx/bt.hpp"
#include "fashionx/corpus_store.hpp"
#include "fashionx/metrics.hpp"
#include "fashionx/oracle.hpp"
#include "fashionx/qa_forge.hpp"
#include "fashionx/templates.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fashionx;

namespace {

json load_config_file(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return json::parse(in);
}

void print_resolved_config(const std::string& command, const json& cfg) {
    json header = {{"command", command}, {"config", cfg}};
    std::cout << "config " << header.dump() << "\n";
}

// Deterministic placeholder annotation for smoke runs without a real oracle.
OutfitAnnotation synthetic_annotation(const std::string& image_ref, std::uint64_t seed) {
    static const std::vector<std::string> styles = {"casual", "sporty", "chic", "formal"};
    static const std::vector<std::string> occasions = {"office", "party", "travel", "beach"};
    static const std::vector<std::string> colors = {"red", "blue", "black", "white", "green"};
    static const std::vector<std::string> materials = {"cotton", "denim", "wool", "silk"};
    static const std::vector<std::string> patterns = {"solid", "striped", "plaid"};
    static const std::vector<std::string> terms = {"t-shirt", "blouse", "sweater", "jacket"};
    Rng rng(seed ^ fnv1a64(image_ref));
    OutfitAnnotation a;
    a.outfit_id = "outfit-" + to_hex(fnv1a64(image_ref));
    a.image_ref = image_ref;
    PartItem top;
    top.term = rng.pick(terms);
    top.colors = {rng.pick(colors)};
    top.materials = {rng.pick(materials)};
    top.patterns = {rng.pick(patterns)};
    top.style = rng.pick(styles);
    a.parts[PartCategory::top] = {top};
    a.garment_count = 1;
    a.overall.styles = {top.style};
    a.overall.occasions = {rng.pick(occasions)};
    a.description_general = "a " + top.style + " " + top.colors[0] + " " + top.term;
    a.description_concise = top.style + " " + top.term + " for " + a.overall.occasions[0];
    return a;
}

std::shared_ptr<ChatOracle> make_chat_oracle(const std::string& mock_behavior, std::uint64_t seed,
                                             const json& cfg,
                                             std::map<std::string, std::string> gold = {}) {
    if (mock_behavior == "synthetic-annotator") {
        return std::make_shared<MockOracle>(seed, [seed](const ChatRequest& req) {
            if (req.image_refs.empty()) return std::string("{}");
            return serialize(synthetic_annotation(req.image_refs.front(), seed));
        });
    }
    if (!mock_behavior.empty()) {
        return make_mock_oracle(mock_behavior, seed, std::move(gold));
    }
    GatewayConfig gw;
    gw.chat_endpoint = cfg.value("chat_endpoint", "");
    gw.chat_model = cfg.value("chat_model", "");
    gw.embed_endpoint = cfg.value("embed_endpoint", "");
    gw.embed_model = cfg.value("embed_model", "");
    gw.api_key_env = cfg.value("api_key_env", "FASHIONX_API_KEY");
    gw.max_concurrency = cfg.value("max_concurrency", 4);
    gw.cache_dir = cfg.value("cache_dir", "");
    if (gw.chat_endpoint.empty()) {
        throw std::runtime_error("no mock behavior given and no chat_endpoint in config");
    }
    return std::make_shared<HttpOracleGateway>(gw);
}

std::vector<OutfitAnnotation> load_annotations(const std::vector<std::string>& files) {
    std::vector<OutfitAnnotation> out;
    for (const auto& f : files) {
        std::size_t line_no = 0;
        for (const auto& line : read_lines(f)) {
            ++line_no;
            try {
                out.push_back(parse_annotation(line));
            } catch (const FormatError& ex) {
                throw std::runtime_error(f + ":" + std::to_string(line_no) + ": " + ex.what());
            }
        }
    }
    return out;
}

TemplatePools load_pools(const std::string& path) {
    return path.empty() ? builtin_template_pools() : load_template_pools(path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FashionX data and evaluation toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    int concurrency = 1;
    std::string cache_dir;
    app.add_option("--config", config_path, "JSON config file (flags win over file values)");
    app.add_option("--seed", seed, "run seed")->required();
    app.add_option("--concurrency", concurrency, "parallelism degree");
    app.add_option("--cache-dir", cache_dir, "oracle response cache directory");

    // annotate
    auto* annotate = app.add_subcommand("annotate", "annotate an image manifest via the chat oracle");
    std::string a_manifest, a_out, a_mock;
    int a_max_retries = 3;
    bool a_resume = false;
    annotate->add_option("--manifest", a_manifest, "file with one image_ref per line")->required();
    annotate->add_option("--out", a_out, "output directory")->required();
    annotate->add_option("--mock", a_mock, "mock oracle behavior (tests/smoke runs)");
    annotate->add_option("--max-retries", a_max_retries, "annotation attempts per image");
    annotate->add_flag("--resume", a_resume, "resume from checkpoint");

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "validate annotation shards");
    std::vector<std::string> v_shards;
    validate_cmd->add_option("--shards", v_shards, "annotation jsonl files")->required();

    // forge
    auto* forge = app.add_subcommand("forge", "forge the QA corpus from annotations");
    std::vector<std::string> f_annotations;
    std::string f_out, f_templates, f_passthrough, f_split = "train";
    std::size_t f_per_task = 0, f_alignment = 0, f_shard_size = 10000;
    int f_k = 4;
    forge->add_option("--annotations", f_annotations, "annotation jsonl files")->required();
    forge->add_option("--out", f_out, "output directory")->required();
    forge->add_option("--per-task", f_per_task, "QA pairs per subtask (overridden by config counts)");
    forge->add_option("--alignment-count", f_alignment, "alignment-stage pair count");
    forge->add_option("--templates", f_templates, "template pools file (default: built-in)");
    forge->add_option("--passthrough", f_passthrough, "general dialogue records to ingest verbatim");
    forge->add_option("--split", f_split, "split label (train|test)");
    forge->add_option("--k", f_k, "candidate-set size for multi-image tasks [2,8]");
    forge->add_option("--shard-size", f_shard_size, "records per shard");

    // split
    auto* split_cmd = app.add_subcommand("split", "split outfit ids into train/test");
    std::string s_ids, s_train, s_test;
    double s_ratio = 0.9;
    split_cmd->add_option("--ids", s_ids, "file with one outfit id per line")->required();
    split_cmd->add_option("--ratio", s_ratio, "train fraction");
    split_cmd->add_option("--out-train", s_train, "train ids output")->required();
    split_cmd->add_option("--out-test", s_test, "test ids output")->required();

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "corpus statistics table");
    std::vector<std::string> st_shards;
    stats_cmd->add_option("--shards", st_shards, "annotation jsonl files")->required();

    // rank
    auto* rank_cmd = app.add_subcommand("rank", "tournament ranking against a gallery");
    std::string r_queries, r_gallery, r_out, r_mock;
    BtParams r_params;
    rank_cmd->add_option("--queries", r_queries, "jsonl: {query_id, text, embedding}")->required();
    rank_cmd->add_option("--gallery", r_gallery, "jsonl: {id, embedding}")->required();
    rank_cmd->add_option("--out", r_out, "diagnostics jsonl output")->required();
    rank_cmd->add_option("--mock", r_mock, "mock oracle behavior");
    rank_cmd->add_option("--m", r_params.pool_size, "candidate pool size");
    rank_cmd->add_option("--lambda", r_params.lambda, "pseudo-count");
    rank_cmd->add_option("--epsilon", r_params.epsilon, "convergence tolerance");
    rank_cmd->add_option("--max-iter", r_params.max_iter, "max MM iterations");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "score predictions / rankings");
    std::vector<std::string> e_gold;
    std::string e_pred, e_mock, e_rankings, e_qrels, e_out;
    double e_cir_threshold = 0.75;
    eval_cmd->add_option("--gold", e_gold, "gold QA shard files")->required();
    eval_cmd->add_option("--pred", e_pred, "predictions jsonl {qa_id, candidates[]}");
    eval_cmd->add_option("--mock", e_mock, "generate predictions with this mock behavior");
    eval_cmd->add_option("--rankings", e_rankings, "bt diagnostics jsonl for R@K/mAP");
    eval_cmd->add_option("--qrels", e_qrels, "jsonl {query_id, relevant[]}");
    eval_cmd->add_option("--cir-threshold", e_cir_threshold, "CIR similarity threshold");
    eval_cmd->add_option("--out", e_out, "report json output");

    CLI11_PARSE(app, argc, argv);

    try {
        json cfg = load_config_file(config_path);
        cfg["seed"] = seed;
        cfg["concurrency"] = concurrency;
        if (!cache_dir.empty()) cfg["cache_dir"] = cache_dir;

        if (*annotate) {
            json resolved = cfg;
            resolved["manifest"] = a_manifest;
            resolved["out"] = a_out;
            resolved["mock"] = a_mock;
            resolved["max_retries"] = a_max_retries;
            print_resolved_config("annotate", resolved);

            auto images = read_lines(a_manifest);
            fs::create_directories(a_out);
            fs::path record_path = fs::path(a_out) / "annotations.jsonl";
            fs::path attempts_path = fs::path(a_out) / "attempts.jsonl";
            fs::path checkpoint_path = fs::path(a_out) / "checkpoint.json";

            std::size_t skip = 0;
            if (a_resume && fs::exists(checkpoint_path)) {
                std::ifstream in(checkpoint_path);
                skip = json::parse(in).value("completed", 0u);
            }
            std::vector<std::string> todo(images.begin() + static_cast<long>(std::min(skip, images.size())),
                                          images.end());

            auto oracle = make_chat_oracle(a_mock, seed, cfg);
            std::ofstream records(record_path, skip ? std::ios::app : std::ios::trunc);
            std::ofstream attempts(attempts_path, skip ? std::ios::app : std::ios::trunc);
            AnnotateCorpusOptions opts;
            opts.max_retries = a_max_retries;
            opts.concurrency_limit = concurrency;
            opts.on_checkpoint = [&](std::size_t flushed) {
                records.flush();
                std::ofstream out(checkpoint_path);
                out << json{{"completed", skip + flushed}}.dump() << "\n";
            };
            auto summary = annotate_corpus(
                todo, *oracle, opts, [&](const std::string& line) { records << line << "\n"; },
                [&](const std::string& line) { attempts << line << "\n"; });
            records.flush();
            {
                std::ofstream out(checkpoint_path);
                out << json{{"completed", skip + summary.succeeded}}.dump() << "\n";
            }
            json s = {{"succeeded", summary.succeeded},
                      {"failed", summary.failed},
                      {"retried", summary.retried},
                      {"failed_images", summary.failed_images}};
            std::cout << "summary " << s.dump() << "\n";
            return summary.failed == 0 ? 0 : 1;
        }

        if (*validate_cmd) {
            print_resolved_config("validate", {{"shards", v_shards}});
            std::size_t passed = 0, failed = 0;
            std::map<std::string, std::size_t> by_check;
            for (const auto& f : v_shards) {
                for (const auto& line : read_lines(f)) {
                    try {
                        auto a = parse_annotation(line);
                        auto report = fashionx::validate(a);
                        if (report.passed) {
                            ++passed;
                        } else {
                            ++failed;
                            for (const auto& v : report.violations) ++by_check[to_string(v.check)];
                        }
                    } catch (const FormatError& ex) {
                        ++failed;
                        ++by_check[to_string(ex.check())];
                    }
                }
            }
            json s = {{"passed", passed}, {"failed", failed}, {"violations", by_check}};
            std::cout << "summary " << s.dump() << "\n";
            return 0;
        }

        if (*forge) {
            ForgeConfig config;
            config.seed = seed;
            config.k_multi = f_k;
            config.shard_size = f_shard_size;
            if (cfg.contains("counts")) {
                for (auto it = cfg["counts"].begin(); it != cfg["counts"].end(); ++it) {
                    config.counts[task_from_string(it.key())] = it.value().get<std::size_t>();
                }
            }
            if (f_per_task > 0) {
                for (TaskKind t : subtask_kinds()) config.counts[t] = f_per_task;
            }
            if (f_alignment > 0) config.counts[TaskKind::alignment] = f_alignment;
            json resolved = cfg;
            resolved["out"] = f_out;
            resolved["split"] = f_split;
            resolved["k"] = f_k;
            print_resolved_config("forge", resolved);

            auto annotations = load_annotations(f_annotations);
            std::vector<std::string> passthrough;
            if (!f_passthrough.empty()) {
                passthrough = read_lines(f_passthrough);
                if (!config.counts.count(TaskKind::general_passthrough)) {
                    config.counts[TaskKind::general_passthrough] = passthrough.size();
                }
            }
            auto pools = load_pools(f_templates);
            auto result = compose_corpus(annotations, config, pools, passthrough, f_split);
            CorpusManifest manifest = write_shards(result.records, config.shard_size, f_out,
                                                   result.manifest.corpus_id);
            manifest.per_task_counts = result.manifest.per_task_counts;
            manifest.split = result.manifest.split;
            manifest.seed = result.manifest.seed;
            manifest.warnings = result.manifest.warnings;
            write_manifest(manifest, (fs::path(f_out) / "manifest.json").string());
            json s = {{"records", result.records.size()},
                      {"per_task", manifest.per_task_counts},
                      {"warnings", manifest.warnings}};
            std::cout << "summary " << s.dump() << "\n";
            return 0;
        }

        if (*split_cmd) {
            print_resolved_config("split", {{"ids", s_ids}, {"ratio", s_ratio}, {"seed", seed}});
            auto ids = read_lines(s_ids);
            auto [train, test] = split_outfits(ids, s_ratio, seed);
            write_lines(s_train, train);
            write_lines(s_test, test);
            json s = {{"train", train.size()}, {"test", test.size()}};
            std::cout << "summary " << s.dump() << "\n";
            return 0;
        }

        if (*stats_cmd) {
            print_resolved_config("stats", {{"shards", st_shards}});
            auto annotations = load_annotations(st_shards);
            StatsReport report = stats_for(annotations);
            std::cout << render_stats_table(report);
            json s = {{"outfits", report.outfit_count},
                      {"total_items", report.total_items()},
                      {"total_attributes", report.total_attributes()}};
            std::cout << "summary " << s.dump() << "\n";
            return 0;
        }

        if (*rank_cmd) {
            json resolved = {{"queries", r_queries}, {"gallery", r_gallery}, {"m", r_params.pool_size},
                             {"lambda", r_params.lambda}, {"epsilon", r_params.epsilon},
                             {"max_iter", r_params.max_iter}, {"seed", seed}};
            print_resolved_config("rank", resolved);
            std::vector<GalleryItem> gallery;
            for (const auto& line : read_lines(r_gallery)) {
                json j = json::parse(line);
                gallery.push_back(
                    {j.at("id").get<std::string>(), j.at("embedding").get<std::vector<double>>()});
            }
            auto oracle = make_chat_oracle(r_mock, seed, cfg);
            std::ofstream out(r_out);
            std::size_t n = 0;
            for (const auto& line : read_lines(r_queries)) {
                json j = json::parse(line);
                auto d = retrieve(j.at("query_id").get<std::string>(),
                                  j.value("text", std::string()),
                                  j.at("embedding").get<std::vector<double>>(), gallery, *oracle,
                                  r_params, seed, concurrency);
                out << diagnostics_to_json(d) << "\n";
                ++n;
            }
            std::cout << "summary " << json{{"queries", n}}.dump() << "\n";
            return 0;
        }

        if (*eval_cmd) {
            print_resolved_config("eval", {{"gold", e_gold}, {"pred", e_pred}, {"mock", e_mock},
                                           {"cir_threshold", e_cir_threshold}, {"seed", seed}});
            std::map<std::string, std::vector<QAPair>> shards_by_task;
            std::vector<QAPair> all;
            for (const auto& f : e_gold) {
                for (const auto& line : read_lines(f)) {
                    QAPair qa = parse_qa(line);
                    shards_by_task[to_string(qa.task)].push_back(qa);
                    all.push_back(std::move(qa));
                }
            }

            std::vector<DialoguePrediction> predictions;
            if (!e_pred.empty()) {
                for (const auto& line : read_lines(e_pred)) {
                    json j = json::parse(line);
                    predictions.push_back({j.at("qa_id").get<std::string>(),
                                           j.at("candidates").get<std::vector<std::string>>()});
                }
            } else if (!e_mock.empty()) {
                std::map<std::string, std::string> gold;
                for (const auto& qa : all) {
                    gold[gold_key(qa.question, qa.image_refs)] = qa.answers.front();
                }
                auto oracle = make_mock_oracle(e_mock, seed, std::move(gold));
                predictions = predict_with_oracle(all, *oracle);
            } else {
                throw std::runtime_error("eval needs --pred or --mock");
            }

            std::map<std::string, const DialoguePrediction*> pred_by_id;
            for (const auto& p : predictions) pred_by_id[p.qa_id] = &p;

            std::map<std::string, TaskScore> per_task;
            std::optional<TaskScore> cir_score;
            auto embed_oracle = make_mock_oracle("hash-embedding", seed);
            for (const auto& [task, shard] : shards_by_task) {
                if (task == to_string(TaskKind::ret_cir)) {
                    TaskScore s;
                    s.n = shard.size();
                    std::size_t correct = 0;
                    for (const auto& qa : shard) {
                        auto it = pred_by_id.find(qa.qa_id);
                        if (it == pred_by_id.end() || it->second->candidates.empty()) continue;
                        if (score_cir(it->second->candidates.front(), qa.answers.front(),
                                      *embed_oracle, e_cir_threshold)) {
                            ++correct;
                        }
                    }
                    s.acc = s.n ? static_cast<double>(correct) / static_cast<double>(s.n) : 0;
                    s.a_at_1 = s.acc;
                    cir_score = s;
                    continue;
                }
                std::vector<DialoguePrediction> task_preds;
                for (const auto& qa : shard) {
                    auto it = pred_by_id.find(qa.qa_id);
                    if (it != pred_by_id.end()) task_preds.push_back(*it->second);
                }
                per_task[task] = score_dialogue(task_preds, shard);
            }

            std::optional<RetrievalScore> retrieval;
            if (!e_rankings.empty()) {
                std::map<std::string, std::set<std::string>> qrels;
                if (!e_qrels.empty()) {
                    for (const auto& line : read_lines(e_qrels)) {
                        json j = json::parse(line);
                        auto rel = j.at("relevant").get<std::vector<std::string>>();
                        qrels[j.at("query_id").get<std::string>()] =
                            std::set<std::string>(rel.begin(), rel.end());
                    }
                }
                std::vector<RankingJudgment> judgments;
                for (const auto& line : read_lines(e_rankings)) {
                    json j = json::parse(line);
                    RankingJudgment rj;
                    rj.query_id = j.at("query_id").get<std::string>();
                    rj.ranking = j.at("ranking").get<std::vector<std::string>>();
                    auto it = qrels.find(rj.query_id);
                    if (it == qrels.end()) continue;
                    rj.relevant = it->second;
                    judgments.push_back(std::move(rj));
                }
                retrieval = score_retrieval(judgments);
            }

            ScoreReport report = aggregate_report(per_task, retrieval, cir_score, e_cir_threshold);
            std::cout << render_report_table(report);
            json rj = report_to_json(report);
            if (!e_out.empty()) {
                std::ofstream out(e_out);
                out << rj.dump(2) << "\n";
            }
            std::cout << "summary " << rj.dump() << "\n";
            return 0;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
