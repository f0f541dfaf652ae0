#pragma once

#include <array>
#include <string>
#include <vector>

#include "vragent/action.hpp"
#include "vragent/trajectory.hpp"

namespace vragent {

struct OutputSize {
    int width = 1024;
    int height = 1024;
    bool operator==(const OutputSize&) const = default;
};

struct CropRequest {
    PageRef page;
    BBox bbox_displayed{};             // validated against displayed_space
    DisplayedSpace displayed_space{};
    int margin_px = 28;                // original-image pixels
    OutputSize output_size{};
};

struct CropRegion {
    std::array<int, 4> rect_original{};  // post-margin, post-clamp

    bool operator==(const CropRegion&) const = default;
};

// Displayed -> original linear mapping (floor/ceil cover), outward margin
// expansion, then clamp to the page extent.
CropRegion map_and_expand(const CropRequest& req);

// Cuts `region` out of the encoded image (PNG or JPEG) and resizes it to
// output_size, preserving aspect ratio with centered white padding. Returns
// PNG bytes. An identity crop at matching output size is pixel-exact.
std::vector<unsigned char> crop_image(const std::vector<unsigned char>& image_bytes,
                                      const CropRegion& region, OutputSize output_size);

std::vector<unsigned char> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const std::vector<unsigned char>& bytes);

}  // namespace vragent
