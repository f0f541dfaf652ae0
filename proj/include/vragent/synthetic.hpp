#pragma once

#include <string>

#include "vragent/corpus.hpp"

namespace vragent {

struct SyntheticCorpusSpec {
    int pages = 20;
    int page_width = 1000;
    int page_height = 1000;
    int docs = 2;  // pages are split evenly across this many document ids
};

// Renders numbered test pages into <dir>/pages and writes
// <dir>/manifest.jsonl. Each page carries its id, a unique marker word
// (stable across runs), a shared filler line, and a per-page colored
// rectangle so crop output can be checked by pixel assertions. The marker
// word also goes into the manifest text field, which drives the hashing
// embedder.
CorpusManifest generate_synthetic_corpus(const std::string& dir, const SyntheticCorpusSpec& spec);

// The unique marker word for page `i` ("marker<i>" tokens are distinct
// under the hashing embedder for desk-scale corpora).
std::string synthetic_marker(int i);

// The fill color (B, G, R) of page i's rectangle.
std::array<int, 3> synthetic_rect_color(int i);

// Rectangle position in page coordinates, identical on every page.
std::array<int, 4> synthetic_rect_box();

}  // namespace vragent
