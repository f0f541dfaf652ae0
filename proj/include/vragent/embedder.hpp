#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "vragent/index.hpp"

namespace vragent {

// Encodes text into multi-vector embeddings in the index's space. Page
// encoding happens offline through the same interface (pages are embedded
// from their manifest text by synthetic embedders; neural embedders are
// plugged in behind this port).
class TextEmbedder {
public:
    virtual ~TextEmbedder() = default;
    virtual std::size_t dim() const = 0;
    virtual EmbeddingMatrix embed(const std::string& text) const = 0;
};

uint64_t fnv1a64(const std::string& s);

// Deterministic token-hash embedder: each whitespace token (lowercased,
// alphanumerics only) becomes a one-hot row at fnv1a64(token) % dim, so
// lexical overlap between query and page drives MaxSim by construction.
// Platform-stable; empty text yields a single zero row.
class HashingTextEmbedder final : public TextEmbedder {
public:
    explicit HashingTextEmbedder(std::size_t dim = 64, std::size_t max_tokens = 64);

    std::size_t dim() const override { return dim_; }
    EmbeddingMatrix embed(const std::string& text) const override;

private:
    std::size_t dim_;
    std::size_t max_tokens_;
};

std::unique_ptr<TextEmbedder> make_embedder(const std::string& spec, std::size_t dim);

}  // namespace vragent
