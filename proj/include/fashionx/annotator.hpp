#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "fashionx/annotation.hpp"
#include "fashionx/oracle.hpp"

namespace fashionx {

struct PromptBundle {
    std::string system_text;
    std::string user_text;
    std::vector<std::string> image_refs;  // length 1
    std::string schema_version;
};

class UnknownSchemaVersion : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoPayloadFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AnnotationAttempt {
    int attempt_index = 1;  // 1-based
    std::string raw_response;
    bool parsed = false;
    std::vector<CheckId> failed_checks;  // empty when parsed && valid
    std::string failure_detail;
};

class AnnotationFailed : public std::runtime_error {
public:
    AnnotationFailed(const std::string& image_ref, std::vector<CheckId> last)
        : std::runtime_error("annotation failed for " + image_ref), last_checks(std::move(last)) {}
    std::vector<CheckId> last_checks;
};

PromptBundle build_prompt(const std::string& image_ref, const std::string& schema_version);

// First balanced top-level {...} object in a possibly prose- or fence-wrapped
// oracle reply.
std::string extract_payload(const std::string& raw_response);

struct AnnotateResult {
    OutfitAnnotation annotation;
    std::vector<AnnotationAttempt> attempts;
};

AnnotateResult annotate_outfit(const std::string& image_ref, ChatOracle& oracle,
                               int max_retries = 3, const std::string& schema_version = "v1");

struct CorpusSummary {
    std::size_t succeeded = 0;
    std::size_t failed = 0;
    std::size_t retried = 0;  // images that needed more than one attempt
    std::vector<std::string> failed_images;
};

struct AnnotateCorpusOptions {
    int max_retries = 3;
    int concurrency_limit = 1;
    std::string schema_version = "v1";
    std::size_t checkpoint_every = 1000;
    // Called after each flushed block with the number of records flushed so far.
    std::function<void(std::size_t)> on_checkpoint;
};

// Runs annotate_outfit over every image; record sink receives one serialized
// annotation line per success, in input order regardless of completion order.
// attempt_sink (optional) receives one line per attempt.
CorpusSummary annotate_corpus(const std::vector<std::string>& image_refs, ChatOracle& oracle,
                              const AnnotateCorpusOptions& opts,
                              const std::function<void(const std::string&)>& record_sink,
                              const std::function<void(const std::string&)>& attempt_sink = nullptr);

}  // namespace fashionx
