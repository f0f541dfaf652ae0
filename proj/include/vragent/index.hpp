#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace vragent {

// Row-major rows x dim block of finite 32-bit floats.
struct EmbeddingMatrix {
    std::size_t rows = 0;
    std::size_t dim = 0;
    std::vector<float> data;

    const float* row(std::size_t i) const { return data.data() + i * dim; }
    bool operator==(const EmbeddingMatrix&) const = default;
};

struct PageEmbedding {
    std::string page_id;
    EmbeddingMatrix vectors;  // P patch vectors x D
};

struct QueryEmbedding {
    EmbeddingMatrix vectors;  // Q token vectors x D
};

struct ScoredPage {
    std::string page_id;
    float score = 0.0f;
};

struct RetrievalHit {
    std::optional<std::string> page_id;  // empty = no new pages
    bool no_new_pages() const { return !page_id.has_value(); }
};

// Exact in-memory late-interaction index. Immutable after build; concurrent
// scoring requires no synchronization.
class RetrievalIndex {
public:
    static RetrievalIndex build(std::size_t dim, std::vector<PageEmbedding> pages);

    std::size_t dim() const { return dim_; }
    std::size_t page_count() const { return pages_.size(); }
    const std::vector<PageEmbedding>& pages() const { return pages_; }
    const PageEmbedding* find(const std::string& page_id) const;

    // Descending by score; ties keep page insertion order. Throws EmptyIndex
    // on an empty index, DimensionMismatch on a wrong query dim.
    std::vector<ScoredPage> rank(const QueryEmbedding& query, std::size_t k) const;

    // Scans rank(query, k) in order and returns the first id not in `seen`.
    RetrievalHit retrieve_next_unseen(const QueryEmbedding& query, std::size_t k,
                                      const std::vector<std::string>& seen) const;

    void save(const std::string& path) const;
    static RetrievalIndex load(const std::string& path);

private:
    std::size_t dim_ = 0;
    std::vector<PageEmbedding> pages_;
    std::unordered_map<std::string, std::size_t> id_lookup_;
};

float maxsim_score(const QueryEmbedding& query, const PageEmbedding& page);

}  // namespace vragent
