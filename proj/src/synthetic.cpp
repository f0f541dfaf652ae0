#include "vragent/synthetic.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <filesystem>

#include "vragent/error.hpp"

namespace vragent {

namespace fs = std::filesystem;

std::string synthetic_marker(int i) {
    return "marker" + std::to_string(i);
}

std::array<int, 3> synthetic_rect_color(int i) {
    // distinct, saturated, deterministic
    return {(37 * i + 40) % 200 + 55, (83 * i + 90) % 200 + 55, (131 * i + 20) % 200 + 55};
}

std::array<int, 4> synthetic_rect_box() {
    return {600, 600, 900, 900};
}

CorpusManifest generate_synthetic_corpus(const std::string& dir,
                                         const SyntheticCorpusSpec& spec) {
    if (spec.pages < 1 || spec.docs < 1) raise(Errc::BadInput, "bad synthetic corpus spec");
    fs::create_directories(fs::path(dir) / "pages");

    CorpusManifest manifest;
    const int per_doc = (spec.pages + spec.docs - 1) / spec.docs;
    for (int i = 0; i < spec.pages; ++i) {
        char idbuf[16];
        std::snprintf(idbuf, sizeof(idbuf), "page_%03d", i);
        const std::string page_id = idbuf;
        const std::string filename = page_id + ".png";
        const fs::path img_path = fs::path(dir) / "pages" / filename;

        cv::Mat img(spec.page_height, spec.page_width, CV_8UC3, cv::Scalar(255, 255, 255));
        cv::rectangle(img, cv::Point(10, 10),
                      cv::Point(spec.page_width - 10, spec.page_height - 10),
                      cv::Scalar(0, 0, 0), 4);
        cv::putText(img, page_id, cv::Point(60, 140), cv::FONT_HERSHEY_SIMPLEX, 2.2,
                    cv::Scalar(0, 0, 0), 5);
        cv::putText(img, synthetic_marker(i), cv::Point(60, 280), cv::FONT_HERSHEY_SIMPLEX,
                    1.8, cv::Scalar(40, 40, 40), 4);
        cv::putText(img, "synthetic test document", cv::Point(60, 400),
                    cv::FONT_HERSHEY_SIMPLEX, 1.0, cv::Scalar(90, 90, 90), 2);

        const auto box = synthetic_rect_box();
        const auto c = synthetic_rect_color(i);
        cv::rectangle(img, cv::Point(box[0], box[1]), cv::Point(box[2], box[3]),
                      cv::Scalar(c[0], c[1], c[2]), cv::FILLED);

        if (!cv::imwrite(img_path.string(), img)) {
            raise(Errc::BadInput, "cannot write " + img_path.string());
        }

        CorpusEntry entry;
        entry.page_id = page_id;
        entry.document_id = "doc_" + std::to_string(i / per_doc);
        entry.image_path = img_path.string();
        entry.width_px = spec.page_width;
        entry.height_px = spec.page_height;
        // only discriminating tokens; the filler line stays paint-only so
        // hashed retrieval separation is driven by the markers
        entry.text = page_id + " " + synthetic_marker(i);
        manifest.add(std::move(entry));
    }

    // manifest references images relative to its own directory
    CorpusManifest rel;
    for (CorpusEntry e : manifest.entries()) {
        e.image_path = "pages/" + fs::path(e.image_path).filename().string();
        rel.add(std::move(e));
    }
    rel.save_jsonl((fs::path(dir) / "manifest.jsonl").string());
    return CorpusManifest::load_jsonl((fs::path(dir) / "manifest.jsonl").string());
}

}  // namespace vragent
