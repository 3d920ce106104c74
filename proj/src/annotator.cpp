#include "fashionx/annotator.hpp"

#include <future>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fashionx {

using nlohmann::json;

PromptBundle build_prompt(const std::string& image_ref, const std::string& schema_version) {
    if (schema_version != "v1") {
        throw UnknownSchemaVersion("unknown schema version: " + schema_version);
    }
    PromptBundle bundle;
    bundle.schema_version = schema_version;
    bundle.image_refs = {image_ref};
    bundle.system_text =
        "You are a fashion annotation assistant. Examine the outfit in the image and produce a "
        "single strict JSON object, with no surrounding prose, using exactly this schema:\n"
        "{\n"
        "  \"outfit_id\": string,\n"
        "  \"image_ref\": string,\n"
        "  \"description_general\": string (focused on the garments themselves),\n"
        "  \"description_concise\": string (include broader context such as environment or "
        "activity),\n"
        "  \"overall\": {\"styles\": [string], \"occasions\": [string], \"seasons\": [string]},\n"
        "  \"garment_count\": integer,\n"
        "  \"parts\": {\"one_piece\"|\"top\"|\"bottom\"|\"footwear\"|\"accessory\": [\n"
        "      {\"term\": string, \"colors\": [string], \"materials\": [string], "
        "\"patterns\": [string], \"design\": string, \"style\": string}]}\n"
        "}\n"
        "Rules:\n"
        "1. First count every visible garment, including layered and partially occluded items, "
        "then list each one under its category. garment_count must equal the number of listed "
        "items.\n"
        "2. Each category key (one_piece, top, bottom, footwear, accessory) may appear at most "
        "once; put multiple garments of one category in that category's list.\n"
        "3. Before answering, self-check: no duplicate category keys, the count matches the "
        "listed items, and the output is valid JSON with no extra fields.";
    bundle.user_text = "Annotate the outfit in image '" + image_ref +
                       "'. Use outfit_id derived from the image name and set image_ref to '" +
                       image_ref + "'.";
    return bundle;
}

std::string extract_payload(const std::string& raw) {
    // Scan for the first balanced top-level object, ignoring braces inside
    // JSON strings.
    std::size_t start = raw.find('{');
    while (start != std::string::npos) {
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < raw.size(); ++i) {
            char c = raw[i];
            if (in_string) {
                if (escaped) {
                    escaped = false;
                } else if (c == '\\') {
                    escaped = true;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                --depth;
                if (depth == 0) return raw.substr(start, i - start + 1);
            }
        }
        start = raw.find('{', start + 1);
    }
    throw NoPayloadFound("no balanced object found in oracle response");
}

namespace {

std::string repair_prompt(const std::vector<CheckId>& checks, const std::string& detail) {
    std::ostringstream ss;
    ss << "Your previous annotation failed validation with these check ids: [";
    for (std::size_t i = 0; i < checks.size(); ++i) {
        if (i) ss << ", ";
        ss << to_string(checks[i]);
    }
    ss << "]. Details: " << detail
       << "\nProduce a corrected JSON object that satisfies every rule. Output only the JSON.";
    return ss.str();
}

}  // namespace

AnnotateResult annotate_outfit(const std::string& image_ref, ChatOracle& oracle, int max_retries,
                               const std::string& schema_version) {
    PromptBundle bundle = build_prompt(image_ref, schema_version);
    ChatRequest req;
    req.messages = {{"system", bundle.system_text}, {"user", bundle.user_text}};
    req.image_refs = bundle.image_refs;
    req.temperature = 0.0;

    AnnotateResult result;
    std::vector<CheckId> last_checks;
    for (int attempt = 1; attempt <= max_retries; ++attempt) {
        AnnotationAttempt log;
        log.attempt_index = attempt;
        try {
            log.raw_response = oracle.chat(req);
        } catch (const OracleError&) {
            result.attempts.push_back(log);
            throw;
        }
        try {
            std::string payload = extract_payload(log.raw_response);
            OutfitAnnotation a = parse_annotation(payload);
            ValidationReport report = validate(a);
            if (report.passed) {
                log.parsed = true;
                result.attempts.push_back(log);
                result.annotation = std::move(a);
                return result;
            }
            std::ostringstream detail;
            for (const auto& v : report.violations) {
                log.failed_checks.push_back(v.check);
                detail << v.detail << "; ";
            }
            log.failure_detail = detail.str();
        } catch (const FormatError& ex) {
            log.failed_checks.push_back(ex.check());
            log.failure_detail = ex.what();
        } catch (const NoPayloadFound& ex) {
            log.failed_checks.push_back(CheckId::C3_FORMAT);
            log.failure_detail = ex.what();
        }
        last_checks = log.failed_checks;
        std::string repair = repair_prompt(log.failed_checks, log.failure_detail);
        req.messages.push_back({"assistant", log.raw_response});
        req.messages.push_back({"user", repair});
        result.attempts.push_back(std::move(log));
    }
    throw AnnotationFailed(image_ref, last_checks);
}

CorpusSummary annotate_corpus(const std::vector<std::string>& image_refs, ChatOracle& oracle,
                              const AnnotateCorpusOptions& opts,
                              const std::function<void(const std::string&)>& record_sink,
                              const std::function<void(const std::string&)>& attempt_sink) {
    CorpusSummary summary;
    struct Outcome {
        bool ok = false;
        std::string record;
        std::vector<AnnotationAttempt> attempts;
        std::string image_ref;
    };

    const std::size_t n = image_refs.size();
    const std::size_t batch = static_cast<std::size_t>(std::max(1, opts.concurrency_limit));
    std::size_t flushed = 0;

    auto run_one = [&](const std::string& ref) {
        Outcome out;
        out.image_ref = ref;
        try {
            AnnotateResult res = annotate_outfit(ref, oracle, opts.max_retries, opts.schema_version);
            out.ok = true;
            out.record = serialize(res.annotation);
            out.attempts = std::move(res.attempts);
        } catch (const AnnotationFailed& ex) {
            out.attempts.push_back({opts.max_retries, "", false, ex.last_checks, ex.what()});
        }
        return out;
    };

    for (std::size_t base = 0; base < n; base += batch) {
        std::size_t end = std::min(n, base + batch);
        std::vector<std::future<Outcome>> futures;
        futures.reserve(end - base);
        for (std::size_t i = base; i < end; ++i) {
            if (batch == 1) {
                std::promise<Outcome> p;
                p.set_value(run_one(image_refs[i]));
                futures.push_back(p.get_future());
            } else {
                futures.push_back(std::async(std::launch::async, run_one, image_refs[i]));
            }
        }
        // Resequence: emit in input order.
        for (auto& f : futures) {
            Outcome out = f.get();
            if (out.ok) {
                ++summary.succeeded;
                record_sink(out.record);
                ++flushed;
                if (opts.on_checkpoint && flushed % opts.checkpoint_every == 0) {
                    opts.on_checkpoint(flushed);
                }
            } else {
                ++summary.failed;
                summary.failed_images.push_back(out.image_ref);
            }
            if (out.attempts.size() > 1 || !out.ok) ++summary.retried;
            if (attempt_sink) {
                for (const auto& att : out.attempts) {
                    json line = {{"image_ref", out.image_ref},
                                 {"attempt_index", att.attempt_index},
                                 {"outcome", att.parsed ? "parsed" : "failed"}};
                    json checks = json::array();
                    for (CheckId c : att.failed_checks) checks.push_back(to_string(c));
                    line["check_ids"] = std::move(checks);
                    attempt_sink(line.dump());
                }
            }
        }
    }
    return summary;
}

}  // namespace fashionx
