#include "vragent/crop.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "vragent/error.hpp"

namespace vragent {

CropRegion map_and_expand(const CropRequest& req) {
    const BBox& b = req.bbox_displayed;
    if (b[0] >= b[2] || b[1] >= b[3] || b[0] < 0 || b[1] < 0 ||
        b[2] > req.displayed_space.width || b[3] > req.displayed_space.height) {
        raise(Errc::BadInput, "bbox outside displayed space");
    }
    if (req.page.width_px <= 0 || req.page.height_px <= 0) {
        raise(Errc::BadInput, "page dimensions must be positive");
    }
    const double sx = static_cast<double>(req.page.width_px) / req.displayed_space.width;
    const double sy = static_cast<double>(req.page.height_px) / req.displayed_space.height;

    int x1 = static_cast<int>(std::floor(b[0] * sx)) - req.margin_px;
    int y1 = static_cast<int>(std::floor(b[1] * sy)) - req.margin_px;
    int x2 = static_cast<int>(std::ceil(b[2] * sx)) + req.margin_px;
    int y2 = static_cast<int>(std::ceil(b[3] * sy)) + req.margin_px;

    x1 = std::clamp(x1, 0, req.page.width_px);
    y1 = std::clamp(y1, 0, req.page.height_px);
    x2 = std::clamp(x2, 0, req.page.width_px);
    y2 = std::clamp(y2, 0, req.page.height_px);

    if (x1 >= x2 || y1 >= y2) {
        raise(Errc::DegenerateRegion, "clamped crop region is empty");
    }
    return CropRegion{{x1, y1, x2, y2}};
}

std::vector<unsigned char> crop_image(const std::vector<unsigned char>& image_bytes,
                                      const CropRegion& region, OutputSize output_size) {
    if (output_size.width <= 0 || output_size.height <= 0) {
        raise(Errc::BadInput, "output size must be positive");
    }
    cv::Mat img = cv::imdecode(cv::Mat(1, static_cast<int>(image_bytes.size()), CV_8UC1,
                                       const_cast<unsigned char*>(image_bytes.data())),
                               cv::IMREAD_COLOR);
    if (img.empty()) raise(Errc::DecodeFailure, "cannot decode image");

    const auto& r = region.rect_original;
    if (r[0] < 0 || r[1] < 0 || r[0] >= r[2] || r[1] >= r[3] || r[2] > img.cols ||
        r[3] > img.rows) {
        raise(Errc::RegionOutOfBounds, "region outside decoded image");
    }
    cv::Mat roi = img(cv::Rect(r[0], r[1], r[2] - r[0], r[3] - r[1]));

    const int w = roi.cols;
    const int h = roi.rows;
    std::vector<unsigned char> out;
    if (w == output_size.width && h == output_size.height) {
        // identity path: no resampling, pixel-exact
        if (!cv::imencode(".png", roi, out)) raise(Errc::BadInput, "png encode failed");
        return out;
    }

    const double scale = std::min(static_cast<double>(output_size.width) / w,
                                  static_cast<double>(output_size.height) / h);
    const int new_w = std::max(1, static_cast<int>(std::lround(w * scale)));
    const int new_h = std::max(1, static_cast<int>(std::lround(h * scale)));
    cv::Mat resized;
    cv::resize(roi, resized, cv::Size(new_w, new_h), 0, 0,
               scale < 1.0 ? cv::INTER_AREA : cv::INTER_LINEAR);

    cv::Mat canvas(output_size.height, output_size.width, img.type(),
                   cv::Scalar(255, 255, 255));
    const int ox = (output_size.width - new_w) / 2;
    const int oy = (output_size.height - new_h) / 2;
    resized.copyTo(canvas(cv::Rect(ox, oy, new_w, new_h)));

    if (!cv::imencode(".png", canvas, out)) raise(Errc::BadInput, "png encode failed");
    return out;
}

std::vector<unsigned char> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::MissingImage, "cannot open '" + path + "'");
    return std::vector<unsigned char>(std::istreambuf_iterator<char>(in),
                                      std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::BadInput, "cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

}  // namespace vragent
