#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace fashionx {

enum class PartCategory { one_piece, top, bottom, footwear, accessory };

constexpr std::size_t kPartCategoryCount = 5;

const std::vector<PartCategory>& all_part_categories();
std::string to_string(PartCategory c);
std::optional<PartCategory> part_category_from_string(const std::string& s);

struct PartItem {
    std::string term;
    std::vector<std::string> colors;
    std::vector<std::string> materials;
    std::vector<std::string> patterns;
    std::string design;
    std::string style;

    bool operator==(const PartItem&) const = default;
};

struct OverallAttributes {
    std::vector<std::string> styles;
    std::vector<std::string> occasions;
    std::vector<std::string> seasons;  // may be empty

    bool operator==(const OverallAttributes&) const = default;
};

struct OutfitAnnotation {
    std::string outfit_id;
    std::string image_ref;
    std::string description_general;
    std::string description_concise;
    OverallAttributes overall;
    std::size_t garment_count = 0;
    std::map<PartCategory, std::vector<PartItem>> parts;

    bool operator==(const OutfitAnnotation&) const = default;

    std::size_t total_items() const;
};

enum class CheckId { C1_CATEGORY_DUP, C2_COUNT_MISMATCH, C3_FORMAT };

std::string to_string(CheckId id);

struct Violation {
    CheckId check;
    std::string detail;
};

struct ValidationReport {
    std::string outfit_id;
    bool passed = true;
    std::vector<Violation> violations;
};

class FormatError : public std::runtime_error {
public:
    FormatError(CheckId check, const std::string& path, const std::string& detail)
        : std::runtime_error(to_string(check) + " at '" + path + "': " + detail),
          check_(check),
          path_(path) {}

    CheckId check() const { return check_; }
    const std::string& path() const { return path_; }

private:
    CheckId check_;
    std::string path_;
};

// Lowercase, trim, collapse internal whitespace.
std::string canonical_token(const std::string& s);

// Canonicalize every attribute string; drop duplicate list entries keeping
// first occurrence. Idempotent.
OutfitAnnotation canonicalize(const OutfitAnnotation& a);

// Strict parse of one serialized annotation document. Rejects malformed
// syntax, missing/extra fields, wrong types (C3) and duplicate category keys
// inside "parts" (C1). Returns a canonicalized annotation.
OutfitAnnotation parse_annotation(const std::string& raw_text);

ValidationReport validate(const OutfitAnnotation& a);

nlohmann::json to_json(const OutfitAnnotation& a);
std::string serialize(const OutfitAnnotation& a);

}  // namespace fashionx
