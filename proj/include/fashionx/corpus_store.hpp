#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fashionx/annotation.hpp"

namespace fashionx {

struct ShardEntry {
    std::string path;  // relative to the manifest directory
    std::size_t record_count = 0;
    std::string checksum;
};

struct CorpusManifest {
    std::string corpus_id;
    std::vector<ShardEntry> shards;
    std::map<std::string, std::size_t> per_task_counts;
    std::string split;  // "train" | "test" | ""
    std::uint64_t seed = 0;
    std::string schema_version = "v1";
    std::vector<std::string> warnings;
};

struct StatsReport {
    // Item and populated-attribute-value counts keyed by category.
    std::array<std::size_t, kPartCategoryCount> item_counts{};
    std::array<std::size_t, kPartCategoryCount> attribute_counts{};
    std::size_t outfit_count = 0;
    std::size_t zero_garment_outfits = 0;

    std::size_t total_items() const;
    std::size_t total_attributes() const;
    StatsReport& operator+=(const StatsReport& other);
};

class ChecksumMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyCorpus : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Seed-deterministic disjoint exhaustive split; |train| = round(ratio * n).
std::pair<std::vector<std::string>, std::vector<std::string>> split_outfits(
    std::vector<std::string> outfit_ids, double ratio, std::uint64_t seed);

StatsReport stats_for(const std::vector<OutfitAnnotation>& annotations);

// Renders the two-row category table (O/T/B/F/A + outfits, totals).
std::string render_stats_table(const StatsReport& report);

// Generic line-record shard IO. Records are opaque serialized lines.
CorpusManifest write_shards(const std::vector<std::string>& records, std::size_t shard_size,
                            const std::string& dir, const std::string& corpus_id = "corpus");

std::vector<std::string> read_shards(const CorpusManifest& manifest, const std::string& dir);

void write_manifest(const CorpusManifest& manifest, const std::string& path);
CorpusManifest read_manifest(const std::string& path);

std::vector<std::string> read_lines(const std::string& path);
void write_lines(const std::string& path, const std::vector<std::string>& lines);

}  // namespace fashionx
