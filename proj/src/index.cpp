#include "vragent/index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_set>

#include "vragent/error.hpp"
#include "vragent/maxsim.hpp"

namespace vragent {

namespace {

constexpr char kMagic[4] = {'V', 'I', 'D', 'X'};
constexpr uint32_t kVersion = 1;

void check_finite(const EmbeddingMatrix& m, const std::string& what) {
    for (float v : m.data) {
        if (!std::isfinite(v)) {
            raise(Errc::BadInput, "non-finite value in " + what);
        }
    }
}

void put_u16(std::ostream& out, uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<const char*>(b), 2);
}

void put_u32(std::ostream& out, uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f32(std::ostream& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

uint16_t get_u16(std::istream& in) {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
    return v;
}

float get_f32(std::istream& in) {
    uint32_t bits = get_u32(in);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

}  // namespace

RetrievalIndex RetrievalIndex::build(std::size_t dim, std::vector<PageEmbedding> pages) {
    if (dim == 0) raise(Errc::BadInput, "dim must be positive");
    RetrievalIndex idx;
    idx.dim_ = dim;
    std::unordered_set<std::string> ids;
    for (auto& p : pages) {
        if (p.vectors.rows == 0) {
            raise(Errc::BadInput, "page '" + p.page_id + "' has no patch vectors");
        }
        if (p.vectors.dim != dim) {
            raise(Errc::DimensionMismatch,
                  "page '" + p.page_id + "' dim " + std::to_string(p.vectors.dim));
        }
        check_finite(p.vectors, "page '" + p.page_id + "'");
        if (!ids.insert(p.page_id).second) {
            raise(Errc::BadInput, "duplicate page_id '" + p.page_id + "'");
        }
    }
    idx.pages_ = std::move(pages);
    for (std::size_t i = 0; i < idx.pages_.size(); ++i) {
        idx.id_lookup_[idx.pages_[i].page_id] = i;
    }
    return idx;
}

const PageEmbedding* RetrievalIndex::find(const std::string& page_id) const {
    auto it = id_lookup_.find(page_id);
    return it == id_lookup_.end() ? nullptr : &pages_[it->second];
}

float maxsim_score(const QueryEmbedding& query, const PageEmbedding& page) {
    if (query.vectors.dim != page.vectors.dim) {
        raise(Errc::DimensionMismatch, "query dim " + std::to_string(query.vectors.dim) +
                                           " vs page dim " + std::to_string(page.vectors.dim));
    }
    static const kernels::MaxSimFn kernel = kernels::select_maxsim_kernel();
    return kernel(query.vectors.data.data(), query.vectors.rows, page.vectors.data.data(),
                  page.vectors.rows, query.vectors.dim);
}

std::vector<ScoredPage> RetrievalIndex::rank(const QueryEmbedding& query, std::size_t k) const {
    if (pages_.empty()) raise(Errc::EmptyIndex, "rank on empty index");
    if (query.vectors.dim != dim_) {
        raise(Errc::DimensionMismatch, "query dim " + std::to_string(query.vectors.dim));
    }
    if (k == 0) raise(Errc::BadInput, "k must be >= 1");
    std::vector<ScoredPage> scored;
    scored.reserve(pages_.size());
    for (const auto& p : pages_) {
        scored.push_back({p.page_id, maxsim_score(query, p)});
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const ScoredPage& a, const ScoredPage& b) { return a.score > b.score; });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

RetrievalHit RetrievalIndex::retrieve_next_unseen(const QueryEmbedding& query, std::size_t k,
                                                  const std::vector<std::string>& seen) const {
    auto ranked = rank(query, k);
    for (const auto& s : ranked) {
        if (std::find(seen.begin(), seen.end(), s.page_id) == seen.end()) {
            return RetrievalHit{s.page_id};
        }
    }
    return RetrievalHit{std::nullopt};
}

void RetrievalIndex::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::BadInput, "cannot open '" + path + "' for writing");
    out.write(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<uint32_t>(dim_));
    put_u32(out, static_cast<uint32_t>(pages_.size()));
    for (const auto& p : pages_) {
        if (p.page_id.size() > 0xffff) raise(Errc::BadInput, "page_id too long");
        put_u16(out, static_cast<uint16_t>(p.page_id.size()));
        out.write(p.page_id.data(), static_cast<std::streamsize>(p.page_id.size()));
        put_u32(out, static_cast<uint32_t>(p.vectors.rows));
        for (float v : p.vectors.data) put_f32(out, v);
    }
    if (!out) raise(Errc::BadInput, "write failed for '" + path + "'");
}

RetrievalIndex RetrievalIndex::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::BadIndexFile, "cannot open '" + path + "'");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        raise(Errc::BadIndexFile, "bad magic in '" + path + "'");
    }
    uint32_t version = get_u32(in);
    if (version != kVersion) {
        raise(Errc::BadIndexFile, "unsupported version " + std::to_string(version));
    }
    uint32_t dim = get_u32(in);
    uint32_t page_count = get_u32(in);
    std::vector<PageEmbedding> pages;
    pages.reserve(page_count);
    for (uint32_t i = 0; i < page_count; ++i) {
        PageEmbedding p;
        uint16_t id_len = get_u16(in);
        p.page_id.resize(id_len);
        in.read(p.page_id.data(), id_len);
        uint32_t patch_count = get_u32(in);
        p.vectors.rows = patch_count;
        p.vectors.dim = dim;
        p.vectors.data.resize(static_cast<std::size_t>(patch_count) * dim);
        for (auto& v : p.vectors.data) v = get_f32(in);
        if (!in) raise(Errc::BadIndexFile, "truncated index file '" + path + "'");
        pages.push_back(std::move(p));
    }
    return build(dim, std::move(pages));
}

}  // namespace vragent
