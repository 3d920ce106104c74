#include "fashionx/annotation.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fashionx {

using nlohmann::json;

const std::vector<PartCategory>& all_part_categories() {
    static const std::vector<PartCategory> cats = {
        PartCategory::one_piece, PartCategory::top, PartCategory::bottom,
        PartCategory::footwear, PartCategory::accessory};
    return cats;
}

std::string to_string(PartCategory c) {
    switch (c) {
        case PartCategory::one_piece: return "one_piece";
        case PartCategory::top: return "top";
        case PartCategory::bottom: return "bottom";
        case PartCategory::footwear: return "footwear";
        case PartCategory::accessory: return "accessory";
    }
    return "?";
}

std::optional<PartCategory> part_category_from_string(const std::string& s) {
    for (PartCategory c : all_part_categories()) {
        if (to_string(c) == s) return c;
    }
    return std::nullopt;
}

std::string to_string(CheckId id) {
    switch (id) {
        case CheckId::C1_CATEGORY_DUP: return "C1_CATEGORY_DUP";
        case CheckId::C2_COUNT_MISMATCH: return "C2_COUNT_MISMATCH";
        case CheckId::C3_FORMAT: return "C3_FORMAT";
    }
    return "?";
}

std::size_t OutfitAnnotation::total_items() const {
    std::size_t n = 0;
    for (const auto& [cat, items] : parts) n += items.size();
    return n;
}

std::string canonical_token(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool in_space = true;  // swallows leading whitespace
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out.push_back(' ');
        in_space = false;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

namespace {

std::vector<std::string> canonical_list(const std::vector<std::string>& in) {
    std::vector<std::string> out;
    for (const auto& s : in) {
        std::string c = canonical_token(s);
        if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
    }
    return out;
}

}  // namespace

OutfitAnnotation canonicalize(const OutfitAnnotation& a) {
    OutfitAnnotation out = a;
    out.overall.styles = canonical_list(a.overall.styles);
    out.overall.occasions = canonical_list(a.overall.occasions);
    out.overall.seasons = canonical_list(a.overall.seasons);
    for (auto& [cat, items] : out.parts) {
        for (auto& item : items) {
            item.term = canonical_token(item.term);
            item.colors = canonical_list(item.colors);
            item.materials = canonical_list(item.materials);
            item.patterns = canonical_list(item.patterns);
            item.design = canonical_token(item.design);
            item.style = canonical_token(item.style);
        }
    }
    return out;
}

namespace {

// DOM-building SAX handler that additionally records duplicate object keys,
// which the default parser would silently collapse.
class DupAwareSax {
public:
    json root;
    std::vector<std::string> duplicate_paths;

    bool null() { return emplace(nullptr); }
    bool boolean(bool v) { return emplace(v); }
    bool number_integer(json::number_integer_t v) { return emplace(v); }
    bool number_unsigned(json::number_unsigned_t v) { return emplace(v); }
    bool number_float(json::number_float_t v, const std::string&) { return emplace(v); }
    bool string(std::string& v) { return emplace(v); }
    bool binary(json::binary_t& v) { return emplace(v); }

    bool start_object(std::size_t) {
        push(json::object());
        seen_keys_.emplace_back();
        return true;
    }

    bool key(std::string& k) {
        auto& seen = seen_keys_.back();
        if (!seen.insert(k).second) duplicate_paths.push_back(current_path() + "/" + k);
        pending_key_ = k;
        have_key_ = true;
        return true;
    }

    bool end_object() {
        seen_keys_.pop_back();
        pop();
        return true;
    }

    bool start_array(std::size_t) {
        push(json::array());
        return true;
    }

    bool end_array() {
        pop();
        return true;
    }

    bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception& ex) {
        error_message = ex.what();
        return false;
    }

    std::string error_message;

private:
    struct Frame {
        json* node;
        std::string key_in_parent;
    };

    std::vector<Frame> stack_;
    std::vector<std::set<std::string>> seen_keys_;
    std::string pending_key_;
    bool have_key_ = false;

    std::string current_path() const {
        std::string p;
        for (const auto& f : stack_) {
            if (!f.key_in_parent.empty()) p += "/" + f.key_in_parent;
        }
        return p.empty() ? "" : p;
    }

    bool emplace(json v) {
        if (stack_.empty()) {
            root = std::move(v);
            return true;
        }
        attach(std::move(v));
        return true;
    }

    void attach(json v) {
        json& parent = *stack_.back().node;
        if (parent.is_array()) {
            parent.push_back(std::move(v));
        } else {
            parent[pending_key_] = std::move(v);
        }
    }

    void push(json v) {
        std::string key = have_key_ ? pending_key_ : std::string();
        have_key_ = false;
        if (stack_.empty()) {
            root = std::move(v);
            stack_.push_back({&root, key});
        } else {
            json& parent = *stack_.back().node;
            if (parent.is_array()) {
                parent.push_back(std::move(v));
                stack_.push_back({&parent.back(), key});
            } else {
                parent[key] = std::move(v);
                stack_.push_back({&parent[key], key});
            }
        }
    }

    void pop() { stack_.pop_back(); }
};

const json& require_field(const json& obj, const std::string& path, const char* name,
                          json::value_t type) {
    auto it = obj.find(name);
    if (it == obj.end()) {
        throw FormatError(CheckId::C3_FORMAT, path + name, "missing required field");
    }
    bool ok = it->type() == type ||
              (type == json::value_t::number_unsigned && it->is_number_integer() &&
               it->get<long long>() >= 0);
    if (!ok) {
        throw FormatError(CheckId::C3_FORMAT, path + name, "wrong value type");
    }
    return *it;
}

std::vector<std::string> string_list(const json& arr, const std::string& path) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_string()) {
            throw FormatError(CheckId::C3_FORMAT, path + "[" + std::to_string(i) + "]",
                              "expected string");
        }
        out.push_back(arr[i].get<std::string>());
    }
    return out;
}

void reject_unknown(const json& obj, const std::string& path,
                    const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw FormatError(CheckId::C3_FORMAT, path + it.key(), "unknown field");
        }
    }
}

PartItem parse_part_item(const json& obj, const std::string& path) {
    if (!obj.is_object()) throw FormatError(CheckId::C3_FORMAT, path, "expected object");
    reject_unknown(obj, path + "/", {"term", "colors", "materials", "patterns", "design", "style"});
    PartItem item;
    item.term = require_field(obj, path + "/", "term", json::value_t::string).get<std::string>();
    item.colors = string_list(require_field(obj, path + "/", "colors", json::value_t::array),
                              path + "/colors");
    item.materials = string_list(require_field(obj, path + "/", "materials", json::value_t::array),
                                 path + "/materials");
    item.patterns = string_list(require_field(obj, path + "/", "patterns", json::value_t::array),
                                path + "/patterns");
    item.design = require_field(obj, path + "/", "design", json::value_t::string).get<std::string>();
    item.style = require_field(obj, path + "/", "style", json::value_t::string).get<std::string>();
    return item;
}

}  // namespace

OutfitAnnotation parse_annotation(const std::string& raw_text) {
    DupAwareSax sax;
    bool ok = json::sax_parse(raw_text, &sax);
    if (!ok) {
        throw FormatError(CheckId::C3_FORMAT, "", "malformed document: " + sax.error_message);
    }
    for (const auto& p : sax.duplicate_paths) {
        // A repeated category key inside "parts" is the C1 failure mode; any
        // other repeated key is plain malformed JSON.
        if (p.rfind("/parts/", 0) == 0) {
            throw FormatError(CheckId::C1_CATEGORY_DUP, p, "duplicate category key");
        }
        throw FormatError(CheckId::C3_FORMAT, p, "duplicate key");
    }
    const json& doc = sax.root;
    if (!doc.is_object()) throw FormatError(CheckId::C3_FORMAT, "", "top level must be an object");
    reject_unknown(doc, "", {"outfit_id", "image_ref", "description_general", "description_concise",
                             "overall", "garment_count", "parts"});

    OutfitAnnotation a;
    a.outfit_id = require_field(doc, "", "outfit_id", json::value_t::string).get<std::string>();
    a.image_ref = require_field(doc, "", "image_ref", json::value_t::string).get<std::string>();
    a.description_general =
        require_field(doc, "", "description_general", json::value_t::string).get<std::string>();
    a.description_concise =
        require_field(doc, "", "description_concise", json::value_t::string).get<std::string>();

    const json& overall = require_field(doc, "", "overall", json::value_t::object);
    reject_unknown(overall, "overall/", {"styles", "occasions", "seasons"});
    a.overall.styles = string_list(require_field(overall, "overall/", "styles", json::value_t::array),
                                   "overall/styles");
    a.overall.occasions = string_list(
        require_field(overall, "overall/", "occasions", json::value_t::array), "overall/occasions");
    a.overall.seasons = string_list(
        require_field(overall, "overall/", "seasons", json::value_t::array), "overall/seasons");

    const json& count = require_field(doc, "", "garment_count", json::value_t::number_unsigned);
    a.garment_count = count.get<std::size_t>();

    const json& parts = require_field(doc, "", "parts", json::value_t::object);
    for (auto it = parts.begin(); it != parts.end(); ++it) {
        auto cat = part_category_from_string(it.key());
        if (!cat) {
            throw FormatError(CheckId::C3_FORMAT, "parts/" + it.key(), "unknown part category");
        }
        if (!it->is_array()) {
            throw FormatError(CheckId::C3_FORMAT, "parts/" + it.key(), "expected array of items");
        }
        std::vector<PartItem> items;
        for (std::size_t i = 0; i < it->size(); ++i) {
            items.push_back(
                parse_part_item((*it)[i], "parts/" + it.key() + "[" + std::to_string(i) + "]"));
        }
        a.parts[*cat] = std::move(items);
    }

    return canonicalize(a);
}

ValidationReport validate(const OutfitAnnotation& a) {
    ValidationReport report;
    report.outfit_id = a.outfit_id;

    auto flag = [&](CheckId check, std::string detail) {
        report.violations.push_back({check, std::move(detail)});
    };

    if (a.garment_count != a.total_items()) {
        std::ostringstream msg;
        msg << "garment_count=" << a.garment_count << " but " << a.total_items()
            << " items listed";
        flag(CheckId::C2_COUNT_MISMATCH, msg.str());
    }

    if (canonical_token(a.description_general).empty()) {
        flag(CheckId::C3_FORMAT, "description_general is empty");
    }
    if (canonical_token(a.description_concise).empty()) {
        flag(CheckId::C3_FORMAT, "description_concise is empty");
    }
    if (a.outfit_id.empty()) flag(CheckId::C3_FORMAT, "outfit_id is empty");

    auto check_list = [&](const std::vector<std::string>& list, const std::string& where,
                          bool must_be_nonempty) {
        if (must_be_nonempty && list.empty()) {
            flag(CheckId::C3_FORMAT, where + " is empty");
        }
        std::set<std::string> seen;
        for (const auto& v : list) {
            if (!seen.insert(canonical_token(v)).second) {
                flag(CheckId::C3_FORMAT, where + " has duplicate entry '" + v + "'");
            }
        }
    };

    check_list(a.overall.styles, "overall.styles", true);
    check_list(a.overall.occasions, "overall.occasions", true);
    check_list(a.overall.seasons, "overall.seasons", false);

    for (const auto& [cat, items] : a.parts) {
        for (std::size_t i = 0; i < items.size(); ++i) {
            const std::string where = "parts." + to_string(cat) + "[" + std::to_string(i) + "]";
            const PartItem& item = items[i];
            if (canonical_token(item.term).empty()) flag(CheckId::C3_FORMAT, where + ".term is empty");
            check_list(item.colors, where + ".colors", true);
            check_list(item.materials, where + ".materials", true);
            check_list(item.patterns, where + ".patterns", true);
        }
    }

    report.passed = report.violations.empty();
    return report;
}

nlohmann::json to_json(const OutfitAnnotation& a) {
    json overall = {{"styles", a.overall.styles},
                    {"occasions", a.overall.occasions},
                    {"seasons", a.overall.seasons}};
    json parts = json::object();
    for (const auto& [cat, items] : a.parts) {
        json arr = json::array();
        for (const auto& item : items) {
            arr.push_back({{"term", item.term},
                           {"colors", item.colors},
                           {"materials", item.materials},
                           {"patterns", item.patterns},
                           {"design", item.design},
                           {"style", item.style}});
        }
        parts[to_string(cat)] = std::move(arr);
    }
    return {{"outfit_id", a.outfit_id},
            {"image_ref", a.image_ref},
            {"description_general", a.description_general},
            {"description_concise", a.description_concise},
            {"overall", std::move(overall)},
            {"garment_count", a.garment_count},
            {"parts", std::move(parts)}};
}

std::string serialize(const OutfitAnnotation& a) { return to_json(a).dump(); }

}  // namespace fashionx
