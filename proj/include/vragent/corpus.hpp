#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "vragent/trajectory.hpp"

namespace vragent {

struct CorpusEntry {
    std::string page_id;
    std::string document_id;
    std::string image_path;  // resolved against the manifest directory on load
    int width_px = 0;
    int height_px = 0;
    std::string text;  // optional; input for text embedders (synthetic corpora)

    PageRef ref() const { return PageRef{page_id, width_px, height_px}; }
};

// Flat pooled corpus; document_id is kept only for SFT verification-page
// sampling.
class CorpusManifest {
public:
    static CorpusManifest load_jsonl(const std::string& path);
    void save_jsonl(const std::string& path) const;

    void add(CorpusEntry entry);
    const std::vector<CorpusEntry>& entries() const { return entries_; }
    const CorpusEntry* find(const std::string& page_id) const;
    const CorpusEntry& at(const std::string& page_id) const;
    bool empty() const { return entries_.empty(); }

private:
    std::vector<CorpusEntry> entries_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

std::vector<Query> load_eval_set(const std::string& path);
void save_eval_set(const std::string& path, const std::vector<Query>& samples);

std::vector<nlohmann::json> read_jsonl(const std::string& path);
void write_jsonl(const std::string& path, const std::vector<nlohmann::json>& rows);

}  // namespace vragent
