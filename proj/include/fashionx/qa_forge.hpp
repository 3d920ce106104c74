#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fashionx/annotation.hpp"
#include "fashionx/corpus_store.hpp"
#include "fashionx/rng.hpp"
#include "fashionx/templates.hpp"

namespace fashionx {

struct QAPair {
    std::string qa_id;
    TaskKind task = TaskKind::alignment;
    std::vector<std::string> image_refs;
    std::string question;
    std::vector<std::string> answers;        // acceptable answer texts
    std::optional<int> target_index;         // 1-based, choice-form tasks
    std::vector<std::string> source_outfits;
    std::string seed_path;
};

nlohmann::json to_json(const QAPair& qa);
QAPair qa_from_json(const nlohmann::json& j);
QAPair parse_qa(const std::string& line);

struct ForgeConfig {
    std::map<TaskKind, std::size_t> counts;
    int k_multi = 4;  // candidate-set size, in [2,8]
    std::uint64_t seed = 0;
    std::size_t shard_size = 10000;

    static ForgeConfig toy(std::size_t per_task, std::uint64_t seed);
};

class ForgeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyDescription : public ForgeError {
public:
    using ForgeError::ForgeError;
};
class InsufficientDistractors : public ForgeError {
public:
    using ForgeError::ForgeError;
};
class NoDifference : public ForgeError {
public:
    using ForgeError::ForgeError;
};
class AttributeMissing : public ForgeError {
public:
    using ForgeError::ForgeError;
};
class VocabularyExhausted : public ForgeError {
public:
    using ForgeError::ForgeError;
};
class NoItemGroup : public ForgeError {
public:
    using ForgeError::ForgeError;
};

// Corpus-wide value sets, used for distractor and negative sampling.
struct Vocabulary {
    std::vector<std::string> styles;
    std::vector<std::string> occasions;
    std::vector<std::string> seasons;
    std::vector<std::string> colors;
    std::vector<std::string> designs;
};

Vocabulary build_vocabulary(const std::vector<OutfitAnnotation>& annotations);

// Multi-view item group of an image, derived from the image filename stem
// convention "<group>_<view>.<ext>". Empty when the image carries no view tag.
std::string item_group_of(const OutfitAnnotation& a);

// Index over a pool of annotations for multi-image sampling.
struct ForgeContext {
    std::vector<OutfitAnnotation> annotations;
    Vocabulary vocab;
    std::map<std::string, std::vector<std::size_t>> style_index;     // style -> indices
    std::map<std::string, std::vector<std::size_t>> occasion_index;  // occasion -> indices
    std::map<std::string, std::vector<std::size_t>> groups;          // item group -> indices

    static ForgeContext build(std::vector<OutfitAnnotation> annotations);
};

// Single-annotation forges.
QAPair forge_alignment(const OutfitAnnotation& a, const TemplatePool& pool, Rng& rng);
QAPair forge_style_single(const OutfitAnnotation& a, const TemplatePool& pool, Rng& rng);
QAPair forge_scene_single(const OutfitAnnotation& a, const TemplatePool& pool, Rng& rng);
QAPair forge_attribute(const OutfitAnnotation& a, TaskKind kind, const TemplatePool& pool, Rng& rng);
QAPair forge_assist(const OutfitAnnotation& a, TaskKind scope, bool positive,
                    const Vocabulary& vocab, const TemplatePool& pool, Rng& rng);

// Multi-image / pairwise forges against a context.
QAPair forge_style_multi(const ForgeContext& ctx, const std::string& style_term, int k,
                         const TemplatePool& pool, Rng& rng);
QAPair forge_scene_multi(const ForgeContext& ctx, const std::string& occasion_term, int k,
                         const TemplatePool& pool, Rng& rng);
QAPair forge_retrieval(const ForgeContext& ctx, TaskKind task, std::size_t target_idx, int k,
                       const TemplatePool& pool, Rng& rng);
QAPair forge_cir(const OutfitAnnotation& a, const OutfitAnnotation& b, const TemplatePool& pool,
                 Rng& rng);

// Canonical attribute difference statement, fixed slot order. Empty when the
// annotations do not differ.
std::string attribute_diff(const OutfitAnnotation& a, const OutfitAnnotation& b);

struct ForgeResult {
    CorpusManifest manifest;
    std::vector<std::string> records;  // serialized QA lines, task order
};

// Builds the whole corpus: exact per-task counts when satisfiable, otherwise
// scaled down with a manifest warning. Deterministic for fixed inputs.
ForgeResult compose_corpus(const std::vector<OutfitAnnotation>& annotations,
                           const ForgeConfig& config, const TemplatePools& pools,
                           const std::vector<std::string>& passthrough_records = {},
                           const std::string& split_label = "train");

}  // namespace fashionx
