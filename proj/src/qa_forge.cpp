#include "fashionx/qa_forge.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fashionx {

using nlohmann::json;

json to_json(const QAPair& qa) {
    json j = {{"qa_id", qa.qa_id},
              {"task", to_string(qa.task)},
              {"image_refs", qa.image_refs},
              {"question", qa.question},
              {"answers", qa.answers},
              {"source_outfits", qa.source_outfits},
              {"seed_path", qa.seed_path}};
    if (qa.target_index) j["target_index"] = *qa.target_index;
    return j;
}

QAPair qa_from_json(const json& j) {
    QAPair qa;
    qa.qa_id = j.at("qa_id").get<std::string>();
    qa.task = task_from_string(j.at("task").get<std::string>());
    qa.image_refs = j.at("image_refs").get<std::vector<std::string>>();
    qa.question = j.at("question").get<std::string>();
    qa.answers = j.at("answers").get<std::vector<std::string>>();
    qa.source_outfits = j.at("source_outfits").get<std::vector<std::string>>();
    qa.seed_path = j.at("seed_path").get<std::string>();
    if (j.contains("target_index")) qa.target_index = j["target_index"].get<int>();
    return qa;
}

QAPair parse_qa(const std::string& line) { return qa_from_json(json::parse(line)); }

ForgeConfig ForgeConfig::toy(std::size_t per_task, std::uint64_t seed) {
    ForgeConfig cfg;
    cfg.seed = seed;
    for (TaskKind t : subtask_kinds()) cfg.counts[t] = per_task;
    return cfg;
}

namespace {

std::string human_category(PartCategory c) {
    return c == PartCategory::one_piece ? "one-piece" : to_string(c);
}

void insert_sorted_unique(std::vector<std::string>& out, const std::string& v) {
    auto it = std::lower_bound(out.begin(), out.end(), v);
    if (it == out.end() || *it != v) out.insert(it, v);
}

// Small bidirectional color synonym table for negative sampling.
const std::vector<std::pair<std::string, std::string>>& color_synonyms() {
    static const std::vector<std::pair<std::string, std::string>> table = {
        {"gray", "grey"},         {"navy", "navy blue"},   {"navy", "dark blue"},
        {"beige", "tan"},         {"beige", "khaki"},      {"off-white", "cream"},
        {"off-white", "ivory"},   {"burgundy", "maroon"},  {"burgundy", "wine"},
        {"turquoise", "teal"},
    };
    return table;
}

std::set<std::string> synonym_closure(const std::string& color) {
    std::set<std::string> out = {color};
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [a, b] : color_synonyms()) {
            if (out.count(a) && !out.count(b)) { out.insert(b); changed = true; }
            if (out.count(b) && !out.count(a)) { out.insert(a); changed = true; }
        }
    }
    return out;
}

const Template& pick_template(const std::vector<Template>& templates, Rng& rng,
                              const std::string& required_placeholder = "",
                              const std::string& forbidden_placeholder = "") {
    std::vector<const Template*> eligible;
    for (const auto& t : templates) {
        bool has_req = required_placeholder.empty() ||
                       std::find(t.placeholders.begin(), t.placeholders.end(),
                                 required_placeholder) != t.placeholders.end();
        bool has_forb = !forbidden_placeholder.empty() &&
                        std::find(t.placeholders.begin(), t.placeholders.end(),
                                  forbidden_placeholder) != t.placeholders.end();
        if (has_req && !has_forb) eligible.push_back(&t);
    }
    if (eligible.empty()) throw TemplateError("no eligible template for slot selection");
    return *eligible[rng.index(eligible.size())];
}

std::string image_options_text(int k) {
    std::ostringstream ss;
    ss << "Candidates:";
    for (int i = 1; i <= k; ++i) ss << (i == 1 ? " " : ", ") << "Image " << i;
    ss << ".";
    return ss.str();
}

std::string text_options_text(const std::vector<std::string>& texts) {
    std::ostringstream ss;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        ss << "Option " << (i + 1) << ": \"" << texts[i] << "\" ";
    }
    return ss.str();
}

// Sample `count` distinct elements of `eligible` uniformly without replacement.
std::vector<std::size_t> sample_distinct(std::vector<std::size_t> eligible, std::size_t count,
                                         Rng& rng) {
    if (eligible.size() < count) throw InsufficientDistractors("not enough eligible distractors");
    std::vector<std::size_t> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t j = rng.index(eligible.size());
        out.push_back(eligible[j]);
        eligible[j] = eligible.back();
        eligible.pop_back();
    }
    return out;
}

bool has_style(const OutfitAnnotation& a, const std::string& style) {
    return std::find(a.overall.styles.begin(), a.overall.styles.end(), style) !=
           a.overall.styles.end();
}

bool has_occasion(const OutfitAnnotation& a, const std::string& occ) {
    return std::find(a.overall.occasions.begin(), a.overall.occasions.end(), occ) !=
           a.overall.occasions.end();
}

std::string join(const std::vector<std::string>& items, const char* sep = "/") {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

}  // namespace

Vocabulary build_vocabulary(const std::vector<OutfitAnnotation>& annotations) {
    Vocabulary v;
    for (const auto& a : annotations) {
        for (const auto& s : a.overall.styles) insert_sorted_unique(v.styles, s);
        for (const auto& s : a.overall.occasions) insert_sorted_unique(v.occasions, s);
        for (const auto& s : a.overall.seasons) insert_sorted_unique(v.seasons, s);
        for (const auto& [cat, items] : a.parts) {
            for (const auto& item : items) {
                for (const auto& c : item.colors) insert_sorted_unique(v.colors, c);
                if (!item.design.empty()) insert_sorted_unique(v.designs, item.design);
            }
        }
    }
    return v;
}

std::string item_group_of(const OutfitAnnotation& a) {
    // "<dir>/<group>_<view>.<ext>" convention from multi-view source data.
    std::string name = a.image_ref;
    auto slash = name.find_last_of('/');
    if (slash != std::string::npos) name = name.substr(slash + 1);
    auto dot = name.find_last_of('.');
    if (dot != std::string::npos) name = name.substr(0, dot);
    auto us = name.find_last_of('_');
    if (us == std::string::npos || us == 0 || us + 1 >= name.size()) return {};
    return name.substr(0, us);
}

ForgeContext ForgeContext::build(std::vector<OutfitAnnotation> annotations) {
    ForgeContext ctx;
    ctx.annotations = std::move(annotations);
    ctx.vocab = build_vocabulary(ctx.annotations);
    for (std::size_t i = 0; i < ctx.annotations.size(); ++i) {
        const auto& a = ctx.annotations[i];
        for (const auto& s : a.overall.styles) ctx.style_index[s].push_back(i);
        for (const auto& s : a.overall.occasions) ctx.occasion_index[s].push_back(i);
        std::string group = item_group_of(a);
        if (!group.empty()) ctx.groups[group].push_back(i);
    }
    return ctx;
}

QAPair forge_alignment(const OutfitAnnotation& a, const TemplatePool& pool, Rng& rng) {
    if (a.description_general.empty()) throw EmptyDescription("empty description_general");
    QAPair qa;
    qa.task = TaskKind::alignment;
    qa.image_refs = {a.image_ref};
    qa.source_outfits = {a.outfit_id};
    std::size_t qi = rng.index(pool.questions.size());
    std::size_t ai = rng.index(pool.answers.size());
    qa.question = pool.questions[qi].text;
    qa.answers = {instantiate(pool.answers[ai], {{"description", a.description_general}})};
    qa.seed_path = "q=" + std::to_string(qi) + ";a=" + std::to_string(ai);
    return qa;
}

QAPair forge_style_single(const OutfitAnnotation& a, const TemplatePool& pool, Rng& rng) {
    if (a.overall.styles.empty()) throw ForgeError("annotation has no overall styles");
    QAPair qa;
    qa.task = TaskKind::style_single;
    qa.image_refs = {a.image_ref};
    qa.source_outfits = {a.outfit_id};

    std::vector<std::pair<PartCategory, const PartItem*>> styled_parts;
    for (const auto& [cat, items] : a.parts) {
        for (const auto& item : items) {
            if (!item.style.empty()) styled_parts.emplace_back(cat, &item);
        }
    }
    bool part_scope = rng.coin();
    if (part_scope && styled_parts.empty()) part_scope = false;  // NoStyledPart fallback

    if (part_scope) {
        std::size_t pi = rng.index(styled_parts.size());
        auto [cat, item] = styled_parts[pi];
        const Template& q = pick_template(pool.questions, rng, "category");
        qa.question = instantiate(q, {{"category", human_category(cat)}, {"term", item->term}});
        qa.answers = {item->style};
        qa.seed_path = "scope=part;part=" + std::to_string(pi);
    } else {
        const Template& q = pick_template(pool.questions, rng, "", "category");
        qa.question = q.text;
        qa.answers = a.overall.styles;
        qa.seed_path = "scope=overall";
    }
    return qa;
}

QAPair forge_scene_single(const OutfitAnnotation& a, const TemplatePool& pool, Rng& rng) {
    if (a.overall.occasions.empty()) throw ForgeError("annotation has no occasions");
    QAPair qa;
    qa.task = TaskKind::scene_single;
    qa.image_refs = {a.image_ref};
    qa.source_outfits = {a.outfit_id};
    std::size_t qi = rng.index(pool.questions.size());
    qa.question = pool.questions[qi].text;
    qa.answers = a.overall.occasions;
    qa.seed_path = "q=" + std::to_string(qi);
    return qa;
}

namespace {

QAPair forge_choice_over_annotations(const ForgeContext& ctx, TaskKind task,
                                     const std::string& term, int k, const TemplatePool& pool,
                                     Rng& rng, const std::string& slot_name,
                                     const std::map<std::string, std::vector<std::size_t>>& index,
                                     bool (*matches)(const OutfitAnnotation&, const std::string&)) {
    auto it = index.find(term);
    if (it == index.end() || it->second.empty()) {
        throw InsufficientDistractors("no annotation matches '" + term + "'");
    }
    std::size_t target = it->second[rng.index(it->second.size())];

    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < ctx.annotations.size(); ++i) {
        if (i != target && !matches(ctx.annotations[i], term)) eligible.push_back(i);
    }
    auto distractors = sample_distinct(std::move(eligible), static_cast<std::size_t>(k - 1), rng);

    int position = static_cast<int>(rng.index(static_cast<std::size_t>(k))) + 1;
    QAPair qa;
    qa.task = task;
    qa.target_index = position;
    std::size_t d = 0;
    for (int p = 1; p <= k; ++p) {
        std::size_t idx = (p == position) ? target : distractors[d++];
        qa.image_refs.push_back(ctx.annotations[idx].image_ref);
        qa.source_outfits.push_back(ctx.annotations[idx].outfit_id);
    }
    const Template& q = pick_template(pool.questions, rng, slot_name);
    qa.question = instantiate(q, {{slot_name, term}, {"options", image_options_text(k)}});
    qa.answers = {"Image " + std::to_string(position)};
    qa.seed_path = slot_name + "=" + term + ";pos=" + std::to_string(position);
    return qa;
}

}  // namespace

QAPair forge_style_multi(const ForgeContext& ctx, const std::string& style_term, int k,
                         const TemplatePool& pool, Rng& rng) {
    return forge_choice_over_annotations(ctx, TaskKind::style_multi, style_term, k, pool, rng,
                                         "style", ctx.style_index, &has_style);
}

QAPair forge_scene_multi(const ForgeContext& ctx, const std::string& occasion_term, int k,
                         const TemplatePool& pool, Rng& rng) {
    return forge_choice_over_annotations(ctx, TaskKind::scene_multi, occasion_term, k, pool, rng,
                                         "occasion", ctx.occasion_index, &has_occasion);
}

QAPair forge_retrieval(const ForgeContext& ctx, TaskKind task, std::size_t target_idx, int k,
                       const TemplatePool& pool, Rng& rng) {
    const OutfitAnnotation& target = ctx.annotations.at(target_idx);
    QAPair qa;
    qa.task = task;

    if (task == TaskKind::ret_i2t) {
        const std::string& gold_desc = target.description_general;
        std::vector<std::size_t> eligible;
        for (std::size_t i = 0; i < ctx.annotations.size(); ++i) {
            if (i != target_idx &&
                canonical_token(ctx.annotations[i].description_general) !=
                    canonical_token(gold_desc)) {
                eligible.push_back(i);
            }
        }
        auto distractors = sample_distinct(std::move(eligible), static_cast<std::size_t>(k - 1), rng);
        int position = static_cast<int>(rng.index(static_cast<std::size_t>(k))) + 1;
        std::vector<std::string> options;
        std::size_t d = 0;
        for (int p = 1; p <= k; ++p) {
            std::size_t idx = (p == position) ? target_idx : distractors[d++];
            options.push_back(ctx.annotations[idx].description_general);
            qa.source_outfits.push_back(ctx.annotations[idx].outfit_id);
        }
        qa.image_refs = {target.image_ref};
        qa.target_index = position;
        const Template& q = pick_template(pool.questions, rng, "options");
        qa.question = instantiate(q, {{"options", text_options_text(options)}});
        qa.answers = {gold_desc, "Option " + std::to_string(position)};
        qa.seed_path = "pos=" + std::to_string(position);
        return qa;
    }

    if (task == TaskKind::ret_t2i) {
        const std::string& query_desc = target.description_concise;
        std::vector<std::size_t> eligible;
        for (std::size_t i = 0; i < ctx.annotations.size(); ++i) {
            if (i != target_idx &&
                canonical_token(ctx.annotations[i].description_concise) !=
                    canonical_token(query_desc)) {
                eligible.push_back(i);
            }
        }
        auto distractors = sample_distinct(std::move(eligible), static_cast<std::size_t>(k - 1), rng);
        int position = static_cast<int>(rng.index(static_cast<std::size_t>(k))) + 1;
        std::size_t d = 0;
        for (int p = 1; p <= k; ++p) {
            std::size_t idx = (p == position) ? target_idx : distractors[d++];
            qa.image_refs.push_back(ctx.annotations[idx].image_ref);
            qa.source_outfits.push_back(ctx.annotations[idx].outfit_id);
        }
        qa.target_index = position;
        const Template& q = pick_template(pool.questions, rng, "description");
        qa.question = instantiate(
            q, {{"description", query_desc}, {"options", image_options_text(k)}});
        qa.answers = {"Image " + std::to_string(position)};
        qa.seed_path = "pos=" + std::to_string(position);
        return qa;
    }

    if (task == TaskKind::ret_i2i) {
        std::string group = item_group_of(target);
        auto git = group.empty() ? ctx.groups.end() : ctx.groups.find(group);
        if (git == ctx.groups.end() || git->second.size() < 2) {
            throw NoItemGroup("target has no multi-view group: " + target.outfit_id);
        }
        std::vector<std::size_t> mates;
        for (std::size_t i : git->second) {
            if (i != target_idx) mates.push_back(i);
        }
        std::size_t positive = mates[rng.index(mates.size())];
        std::vector<std::size_t> eligible;
        for (std::size_t i = 0; i < ctx.annotations.size(); ++i) {
            if (i != target_idx && item_group_of(ctx.annotations[i]) != group) eligible.push_back(i);
        }
        auto distractors = sample_distinct(std::move(eligible), static_cast<std::size_t>(k - 1), rng);
        int position = static_cast<int>(rng.index(static_cast<std::size_t>(k))) + 1;
        qa.image_refs = {target.image_ref};
        qa.source_outfits = {target.outfit_id};
        std::size_t d = 0;
        for (int p = 1; p <= k; ++p) {
            std::size_t idx = (p == position) ? positive : distractors[d++];
            qa.image_refs.push_back(ctx.annotations[idx].image_ref);
            qa.source_outfits.push_back(ctx.annotations[idx].outfit_id);
        }
        qa.target_index = position;
        const Template& q = pick_template(pool.questions, rng, "options");
        qa.question = instantiate(q, {{"options", image_options_text(k)}});
        qa.answers = {"Image " + std::to_string(position)};
        qa.seed_path = "group=" + group + ";pos=" + std::to_string(position);
        return qa;
    }

    throw ForgeError("forge_retrieval: unsupported task " + to_string(task));
}

std::string attribute_diff(const OutfitAnnotation& raw_a, const OutfitAnnotation& raw_b) {
    OutfitAnnotation a = canonicalize(raw_a);
    OutfitAnnotation b = canonicalize(raw_b);
    std::vector<std::string> lines;
    for (PartCategory cat : all_part_categories()) {
        auto ita = a.parts.find(cat);
        auto itb = b.parts.find(cat);
        const std::vector<PartItem> empty;
        const auto& items_a = ita == a.parts.end() ? empty : ita->second;
        const auto& items_b = itb == b.parts.end() ? empty : itb->second;
        const std::string label = human_category(cat);
        if (items_a.size() != items_b.size()) {
            lines.push_back(label + ": " + std::to_string(items_a.size()) + " -> " +
                            std::to_string(items_b.size()) + " items");
        }
        std::size_t n = std::min(items_a.size(), items_b.size());
        for (std::size_t i = 0; i < n; ++i) {
            const PartItem& x = items_a[i];
            const PartItem& y = items_b[i];
            if (x.term != y.term) lines.push_back(label + " term: " + x.term + " -> " + y.term);
            if (x.colors != y.colors)
                lines.push_back(label + " color: " + join(x.colors) + " -> " + join(y.colors));
            if (x.materials != y.materials)
                lines.push_back(label + " material: " + join(x.materials) + " -> " +
                                join(y.materials));
            if (x.patterns != y.patterns)
                lines.push_back(label + " pattern: " + join(x.patterns) + " -> " + join(y.patterns));
            if (x.design != y.design)
                lines.push_back(label + " design: " + x.design + " -> " + y.design);
            if (x.style != y.style) lines.push_back(label + " style: " + x.style + " -> " + y.style);
        }
    }
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out += "; ";
        out += lines[i];
    }
    return out;
}

QAPair forge_cir(const OutfitAnnotation& a, const OutfitAnnotation& b, const TemplatePool& pool,
                 Rng& rng) {
    std::string diff = attribute_diff(a, b);
    if (diff.empty()) throw NoDifference("annotations do not differ in any attribute slot");
    QAPair qa;
    qa.task = TaskKind::ret_cir;
    qa.image_refs = {a.image_ref, b.image_ref};
    qa.source_outfits = {a.outfit_id, b.outfit_id};
    std::size_t qi = rng.index(pool.questions.size());
    qa.question = pool.questions[qi].text;
    qa.answers = {diff};
    qa.seed_path = "q=" + std::to_string(qi);
    return qa;
}

QAPair forge_attribute(const OutfitAnnotation& a, TaskKind kind, const TemplatePool& pool,
                       Rng& rng) {
    std::vector<std::tuple<PartCategory, const PartItem*, std::vector<std::string>>> candidates;
    for (const auto& [cat, items] : a.parts) {
        for (const auto& item : items) {
            std::vector<std::string> values;
            if (kind == TaskKind::attr_color) values = item.colors;
            else if (kind == TaskKind::attr_material) values = item.materials;
            else if (kind == TaskKind::attr_design) {
                if (!item.design.empty()) values = {item.design};
            } else {
                throw ForgeError("forge_attribute: bad kind " + to_string(kind));
            }
            if (!values.empty()) candidates.emplace_back(cat, &item, std::move(values));
        }
    }
    if (candidates.empty()) throw AttributeMissing("no part has " + to_string(kind) + " populated");
    std::size_t pi = rng.index(candidates.size());
    auto& [cat, item, values] = candidates[pi];

    QAPair qa;
    qa.task = kind;
    qa.image_refs = {a.image_ref};
    qa.source_outfits = {a.outfit_id};
    const Template& q = pick_template(pool.questions, rng, "category");
    qa.question = instantiate(q, {{"category", human_category(cat)}, {"term", item->term}});
    qa.answers = values;
    qa.seed_path = "part=" + std::to_string(pi);
    return qa;
}

QAPair forge_assist(const OutfitAnnotation& a, TaskKind scope, bool positive,
                    const Vocabulary& vocab, const TemplatePool& pool, Rng& rng) {
    struct Candidate {
        std::string slot;  // occasion | season | color | design
        std::string value;
    };
    std::vector<Candidate> positives;
    if (scope == TaskKind::assist_global) {
        for (const auto& v : a.overall.occasions) positives.push_back({"occasion", v});
        for (const auto& v : a.overall.seasons) positives.push_back({"season", v});
    } else if (scope == TaskKind::assist_local) {
        for (const auto& [cat, items] : a.parts) {
            for (const auto& item : items) {
                for (const auto& c : item.colors) positives.push_back({"color", c});
                if (!item.design.empty()) positives.push_back({"design", item.design});
            }
        }
    } else {
        throw ForgeError("forge_assist: bad scope " + to_string(scope));
    }
    if (positives.empty()) throw ForgeError("annotation has no assist-relevant values");

    QAPair qa;
    qa.task = scope;
    qa.image_refs = {a.image_ref};
    qa.source_outfits = {a.outfit_id};

    std::string slot;
    std::string value;
    if (positive) {
        const Candidate& c = positives[rng.index(positives.size())];
        slot = c.slot;
        value = c.value;
    } else {
        // Corpus vocab of the same slots, minus the annotation's own values
        // and their color synonyms.
        std::set<std::string> own;
        std::vector<std::string> slots_present;
        for (const auto& c : positives) {
            if (c.slot == "color") {
                for (const auto& s : synonym_closure(c.value)) own.insert("color\x1f" + s);
            } else {
                own.insert(c.slot + "\x1f" + c.value);
            }
            if (std::find(slots_present.begin(), slots_present.end(), c.slot) ==
                slots_present.end()) {
                slots_present.push_back(c.slot);
            }
        }
        std::vector<Candidate> negatives;
        auto add_negatives = [&](const std::string& s, const std::vector<std::string>& pool_vals) {
            for (const auto& v : pool_vals) {
                if (!own.count(s + "\x1f" + v)) negatives.push_back({s, v});
            }
        };
        if (scope == TaskKind::assist_global) {
            add_negatives("occasion", vocab.occasions);
            add_negatives("season", vocab.seasons);
        } else {
            add_negatives("color", vocab.colors);
            add_negatives("design", vocab.designs);
        }
        if (negatives.empty()) throw VocabularyExhausted("no negative candidate for " + to_string(scope));
        const Candidate& c = negatives[rng.index(negatives.size())];
        slot = c.slot;
        value = c.value;
    }

    const Template& q = pick_template(pool.questions, rng, slot);
    qa.question = instantiate(q, {{slot, value}});
    qa.answers = {positive ? "yes" : "no"};
    qa.seed_path = "slot=" + slot + ";value=" + value + ";polarity=" + (positive ? "pos" : "neg");
    return qa;
}

namespace {

std::string pad_index(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%08zu", i);
    return buf;
}

}  // namespace

ForgeResult compose_corpus(const std::vector<OutfitAnnotation>& raw_annotations,
                           const ForgeConfig& config, const TemplatePools& pools,
                           const std::vector<std::string>& passthrough_records,
                           const std::string& split_label) {
    if (config.k_multi < 2 || config.k_multi > 8) {
        throw ForgeError("k_multi must be in [2,8]");
    }
    ForgeContext ctx = ForgeContext::build(raw_annotations);
    const std::size_t n = ctx.annotations.size();

    ForgeResult result;
    result.manifest.corpus_id = "fashionx-qa";
    result.manifest.split = split_label;
    result.manifest.seed = config.seed;
    Rng base(config.seed);

    auto pool_for = [&](TaskKind task) -> const TemplatePool& {
        auto it = pools.find(task);
        if (it == pools.end()) throw TemplateError("no template pool for task " + to_string(task));
        return it->second;
    };

    for (TaskKind task : all_task_kinds()) {
        auto cit = config.counts.find(task);
        if (cit == config.counts.end() || cit->second == 0) continue;
        std::size_t want = cit->second;

        if (task == TaskKind::general_passthrough) {
            std::size_t take = std::min(want, passthrough_records.size());
            for (std::size_t i = 0; i < take; ++i) result.records.push_back(passthrough_records[i]);
            if (take < want) {
                result.manifest.warnings.push_back("general_passthrough reduced to " +
                                                   std::to_string(take) + " of " +
                                                   std::to_string(want));
            }
            result.manifest.per_task_counts[to_string(task)] = take;
            continue;
        }

        if (n == 0) throw ForgeError("no annotations to forge from");
        if (task == TaskKind::ret_i2i) {
            bool any_group = false;
            for (const auto& [g, members] : ctx.groups) {
                if (members.size() >= 2) { any_group = true; break; }
            }
            if (!any_group) {
                result.manifest.warnings.push_back("ret_i2i skipped: no multi-view item groups");
                result.manifest.per_task_counts[to_string(task)] = 0;
                continue;
            }
        }

        Rng task_rng = base.child(to_string(task));
        std::size_t emitted = 0;
        for (std::size_t i = 0; i < want; ++i) {
            Rng rec_rng = task_rng.child(i);
            QAPair qa;
            bool ok = false;
            for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
                Rng try_rng = rec_rng.child(static_cast<std::uint64_t>(attempt) + 1);
                try {
                    switch (task) {
                        case TaskKind::alignment:
                            qa = forge_alignment(ctx.annotations[i % n], pool_for(task), try_rng);
                            break;
                        case TaskKind::style_single:
                            qa = forge_style_single(ctx.annotations[try_rng.index(n)],
                                                    pool_for(task), try_rng);
                            break;
                        case TaskKind::scene_single:
                            qa = forge_scene_single(ctx.annotations[try_rng.index(n)],
                                                    pool_for(task), try_rng);
                            break;
                        case TaskKind::style_multi: {
                            const auto& src = ctx.annotations[try_rng.index(n)];
                            if (src.overall.styles.empty()) throw ForgeError("no styles");
                            qa = forge_style_multi(ctx, src.overall.styles[try_rng.index(src.overall.styles.size())],
                                                   config.k_multi, pool_for(task), try_rng);
                            break;
                        }
                        case TaskKind::scene_multi: {
                            const auto& src = ctx.annotations[try_rng.index(n)];
                            if (src.overall.occasions.empty()) throw ForgeError("no occasions");
                            qa = forge_scene_multi(
                                ctx, src.overall.occasions[try_rng.index(src.overall.occasions.size())],
                                config.k_multi, pool_for(task), try_rng);
                            break;
                        }
                        case TaskKind::ret_i2t:
                        case TaskKind::ret_t2i:
                            qa = forge_retrieval(ctx, task, try_rng.index(n), config.k_multi,
                                                 pool_for(task), try_rng);
                            break;
                        case TaskKind::ret_i2i:
                            qa = forge_retrieval(ctx, task, try_rng.index(n), config.k_multi,
                                                 pool_for(task), try_rng);
                            break;
                        case TaskKind::ret_cir: {
                            std::size_t ia = try_rng.index(n);
                            std::size_t ib = try_rng.index(n);
                            if (ia == ib) throw ForgeError("same annotation");
                            qa = forge_cir(ctx.annotations[ia], ctx.annotations[ib], pool_for(task),
                                           try_rng);
                            break;
                        }
                        case TaskKind::attr_color:
                        case TaskKind::attr_design:
                        case TaskKind::attr_material:
                            qa = forge_attribute(ctx.annotations[try_rng.index(n)], task,
                                                 pool_for(task), try_rng);
                            break;
                        case TaskKind::assist_global:
                        case TaskKind::assist_local:
                            qa = forge_assist(ctx.annotations[try_rng.index(n)], task, i % 2 == 0,
                                              ctx.vocab, pool_for(task), try_rng);
                            break;
                        default:
                            throw ForgeError("unsupported task in compose");
                    }
                    ok = true;
                } catch (const ForgeError&) {
                    // resample with a fresh sub-stream
                }
            }
            if (!ok) break;  // scale down: corpus cannot satisfy this task
            qa.qa_id = to_string(task) + "-" + pad_index(i);
            qa.seed_path = "task=" + to_string(task) + ";i=" + std::to_string(i) + ";" + qa.seed_path;
            result.records.push_back(to_json(qa).dump());
            ++emitted;
        }
        if (emitted < want) {
            result.manifest.warnings.push_back(to_string(task) + " reduced to " +
                                               std::to_string(emitted) + " of " +
                                               std::to_string(want));
        }
        result.manifest.per_task_counts[to_string(task)] = emitted;
    }

    return result;
}

}  // namespace fashionx
