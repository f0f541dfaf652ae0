#include "vragent/corpus.hpp"

#include <filesystem>
#include <fstream>

#include "vragent/error.hpp"

namespace vragent {

namespace fs = std::filesystem;

std::vector<nlohmann::json> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::BadInput, "cannot open '" + path + "'");
    std::vector<nlohmann::json> rows;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            rows.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            raise(Errc::BadInput, path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return rows;
}

void write_jsonl(const std::string& path, const std::vector<nlohmann::json>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::BadInput, "cannot open '" + path + "' for writing");
    for (const auto& row : rows) {
        out << row.dump() << "\n";
    }
}

CorpusManifest CorpusManifest::load_jsonl(const std::string& path) {
    CorpusManifest m;
    const fs::path base = fs::path(path).parent_path();
    for (const auto& j : read_jsonl(path)) {
        CorpusEntry e;
        e.page_id = j.at("page_id").get<std::string>();
        e.document_id = j.value("document_id", std::string());
        e.image_path = j.at("image_path").get<std::string>();
        if (!e.image_path.empty() && fs::path(e.image_path).is_relative()) {
            e.image_path = (base / e.image_path).string();
        }
        e.width_px = j.at("width_px").get<int>();
        e.height_px = j.at("height_px").get<int>();
        e.text = j.value("text", std::string());
        if (e.width_px <= 0 || e.height_px <= 0) {
            raise(Errc::BadInput, "page '" + e.page_id + "' has non-positive dimensions");
        }
        m.add(std::move(e));
    }
    return m;
}

void CorpusManifest::save_jsonl(const std::string& path) const {
    std::vector<nlohmann::json> rows;
    for (const auto& e : entries_) {
        nlohmann::json j;
        j["page_id"] = e.page_id;
        j["document_id"] = e.document_id;
        j["image_path"] = e.image_path;
        j["width_px"] = e.width_px;
        j["height_px"] = e.height_px;
        if (!e.text.empty()) j["text"] = e.text;
        rows.push_back(std::move(j));
    }
    write_jsonl(path, rows);
}

void CorpusManifest::add(CorpusEntry entry) {
    if (by_id_.count(entry.page_id)) {
        raise(Errc::BadInput, "duplicate page_id '" + entry.page_id + "'");
    }
    by_id_[entry.page_id] = entries_.size();
    entries_.push_back(std::move(entry));
}

const CorpusEntry* CorpusManifest::find(const std::string& page_id) const {
    auto it = by_id_.find(page_id);
    return it == by_id_.end() ? nullptr : &entries_[it->second];
}

const CorpusEntry& CorpusManifest::at(const std::string& page_id) const {
    const CorpusEntry* e = find(page_id);
    if (!e) raise(Errc::BadInput, "unknown page_id '" + page_id + "'");
    return *e;
}

std::vector<Query> load_eval_set(const std::string& path) {
    std::vector<Query> out;
    for (const auto& j : read_jsonl(path)) {
        out.push_back(query_from_json(j));
    }
    return out;
}

void save_eval_set(const std::string& path, const std::vector<Query>& samples) {
    std::vector<nlohmann::json> rows;
    for (const auto& q : samples) rows.push_back(to_json(q));
    write_jsonl(path, rows);
}

}  // namespace vragent
