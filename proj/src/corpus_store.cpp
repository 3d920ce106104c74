#include "fashionx/corpus_store.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fashionx/hash.hpp"
#include "fashionx/rng.hpp"

namespace fashionx {

using nlohmann::json;
namespace fs = std::filesystem;

std::size_t StatsReport::total_items() const {
    std::size_t n = 0;
    for (auto c : item_counts) n += c;
    return n;
}

std::size_t StatsReport::total_attributes() const {
    std::size_t n = 0;
    for (auto c : attribute_counts) n += c;
    return n;
}

StatsReport& StatsReport::operator+=(const StatsReport& other) {
    for (std::size_t i = 0; i < kPartCategoryCount; ++i) {
        item_counts[i] += other.item_counts[i];
        attribute_counts[i] += other.attribute_counts[i];
    }
    outfit_count += other.outfit_count;
    zero_garment_outfits += other.zero_garment_outfits;
    return *this;
}

std::pair<std::vector<std::string>, std::vector<std::string>> split_outfits(
    std::vector<std::string> outfit_ids, double ratio, std::uint64_t seed) {
    if (outfit_ids.empty()) throw EmptyCorpus("no outfit ids to split");
    if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("ratio must be in (0,1)");
    Rng rng(seed);
    rng.shuffle(outfit_ids);
    std::size_t n_train = static_cast<std::size_t>(
        std::llround(ratio * static_cast<double>(outfit_ids.size())));
    if (n_train > outfit_ids.size()) n_train = outfit_ids.size();
    std::vector<std::string> train(outfit_ids.begin(), outfit_ids.begin() + static_cast<long>(n_train));
    std::vector<std::string> test(outfit_ids.begin() + static_cast<long>(n_train), outfit_ids.end());
    return {std::move(train), std::move(test)};
}

StatsReport stats_for(const std::vector<OutfitAnnotation>& annotations) {
    StatsReport report;
    for (const auto& a : annotations) {
        ++report.outfit_count;
        if (a.total_items() == 0) ++report.zero_garment_outfits;
        for (const auto& [cat, items] : a.parts) {
            auto idx = static_cast<std::size_t>(cat);
            report.item_counts[idx] += items.size();
            for (const auto& item : items) {
                std::size_t attrs = item.colors.size() + item.materials.size() + item.patterns.size();
                if (!item.design.empty()) ++attrs;
                if (!item.style.empty()) ++attrs;
                report.attribute_counts[idx] += attrs;
            }
        }
    }
    return report;
}

std::string render_stats_table(const StatsReport& report) {
    static const char* headers[] = {"O", "T", "B", "F", "A"};
    std::ostringstream out;
    out << std::left << std::setw(12) << "";
    for (const char* h : headers) out << std::right << std::setw(12) << h;
    out << std::setw(12) << "Outfits" << "\n";
    out << std::left << std::setw(12) << "Num.";
    for (std::size_t i = 0; i < kPartCategoryCount; ++i) {
        out << std::right << std::setw(12) << report.item_counts[i];
    }
    out << std::setw(12) << report.outfit_count << "\n";
    out << std::left << std::setw(12) << "Attri. Num.";
    for (std::size_t i = 0; i < kPartCategoryCount; ++i) {
        out << std::right << std::setw(12) << report.attribute_counts[i];
    }
    out << "\n";
    out << "Total Items: " << report.total_items() << "\n";
    out << "Total Attri.: " << report.total_attributes() << "\n";
    if (report.zero_garment_outfits > 0) {
        out << "Zero-garment outfits: " << report.zero_garment_outfits << "\n";
    }
    return out.str();
}

CorpusManifest write_shards(const std::vector<std::string>& records, std::size_t shard_size,
                            const std::string& dir, const std::string& corpus_id) {
    if (shard_size == 0) throw std::invalid_argument("shard_size must be >= 1");
    if (records.empty()) throw EmptyCorpus("no records to shard");
    fs::create_directories(dir);
    CorpusManifest manifest;
    manifest.corpus_id = corpus_id;
    std::size_t shard_index = 0;
    for (std::size_t base = 0; base < records.size(); base += shard_size) {
        std::size_t end = std::min(records.size(), base + shard_size);
        std::ostringstream content;
        for (std::size_t i = base; i < end; ++i) content << records[i] << "\n";
        std::string body = content.str();
        char name[32];
        std::snprintf(name, sizeof(name), "shard-%05zu.jsonl", shard_index);
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        out << body;
        manifest.shards.push_back({name, end - base, content_digest(body)});
        ++shard_index;
    }
    return manifest;
}

std::vector<std::string> read_shards(const CorpusManifest& manifest, const std::string& dir) {
    std::vector<std::string> records;
    for (const auto& shard : manifest.shards) {
        fs::path p = fs::path(dir) / shard.path;
        std::ifstream in(p, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open shard: " + p.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        std::string body = ss.str();
        if (content_digest(body) != shard.checksum) {
            throw ChecksumMismatch("checksum mismatch in shard " + shard.path);
        }
        std::istringstream lines(body);
        std::string line;
        std::size_t count = 0;
        while (std::getline(lines, line)) {
            records.push_back(line);
            ++count;
        }
        if (count != shard.record_count) {
            throw ChecksumMismatch("record count mismatch in shard " + shard.path);
        }
    }
    return records;
}

void write_manifest(const CorpusManifest& manifest, const std::string& path) {
    json j;
    j["corpus_id"] = manifest.corpus_id;
    j["split"] = manifest.split;
    j["seed"] = manifest.seed;
    j["schema_version"] = manifest.schema_version;
    j["per_task_counts"] = manifest.per_task_counts;
    j["warnings"] = manifest.warnings;
    j["shards"] = json::array();
    for (const auto& s : manifest.shards) {
        j["shards"].push_back(
            {{"path", s.path}, {"record_count", s.record_count}, {"checksum", s.checksum}});
    }
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << "\n";
}

CorpusManifest read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    json j = json::parse(in);
    CorpusManifest m;
    m.corpus_id = j.value("corpus_id", "");
    m.split = j.value("split", "");
    m.seed = j.value("seed", 0ull);
    m.schema_version = j.value("schema_version", "v1");
    if (j.contains("per_task_counts")) {
        for (auto it = j["per_task_counts"].begin(); it != j["per_task_counts"].end(); ++it) {
            m.per_task_counts[it.key()] = it.value().get<std::size_t>();
        }
    }
    if (j.contains("warnings")) m.warnings = j["warnings"].get<std::vector<std::string>>();
    for (const auto& s : j.at("shards")) {
        m.shards.push_back({s.at("path").get<std::string>(), s.at("record_count").get<std::size_t>(),
                            s.at("checksum").get<std::string>()});
    }
    return m;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    for (const auto& line : lines) out << line << "\n";
}

}  // namespace fashionx
