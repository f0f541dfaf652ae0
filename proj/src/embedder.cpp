#include "vragent/embedder.hpp"

#include <cctype>

#include "vragent/error.hpp"

namespace vragent {

uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

HashingTextEmbedder::HashingTextEmbedder(std::size_t dim, std::size_t max_tokens)
    : dim_(dim), max_tokens_(max_tokens) {
    if (dim_ == 0) raise(Errc::BadInput, "embedder dim must be positive");
}

EmbeddingMatrix HashingTextEmbedder::embed(const std::string& text) const {
    std::vector<std::string> tokens;
    std::string cur;
    for (char raw : text) {
        unsigned char c = static_cast<unsigned char>(raw);
        if (std::isalnum(c)) {
            cur += static_cast<char>(std::tolower(c));
        } else if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    if (tokens.size() > max_tokens_) tokens.resize(max_tokens_);

    EmbeddingMatrix m;
    m.dim = dim_;
    m.rows = tokens.empty() ? 1 : tokens.size();
    m.data.assign(m.rows * m.dim, 0.0f);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        m.data[i * dim_ + fnv1a64(tokens[i]) % dim_] = 1.0f;
    }
    return m;
}

std::unique_ptr<TextEmbedder> make_embedder(const std::string& spec, std::size_t dim) {
    if (spec == "hashing" || spec.empty()) {
        return std::make_unique<HashingTextEmbedder>(dim);
    }
    raise(Errc::EmbedderFailure, "unknown embedder '" + spec + "'");
}

}  // namespace vragent
