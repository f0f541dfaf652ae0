#include "vragent/templates.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "vragent/error.hpp"

namespace vragent {

namespace {

const char* kSystemDefault =
    "You are a document question answering agent. You answer questions by iteratively "
    "retrieving page images from a corpus and reading them.\n"
    "Every response must begin with your reasoning inside <think>...</think>, followed by "
    "exactly one action:\n"
    "- <search>query</search> retrieves one new relevant page image.\n"
    "- <bbox>[x1, y1, x2, y2]</bbox> zooms into a region of the current page when critical "
    "details are too small or unclear to read. Coordinates are in the displayed image space "
    "(0 to 1000 on each axis by default) with x1 < x2 and y1 < y2.\n"
    "- <answer>final answer</answer> ends the task.\n"
    "Record every potentially useful detail you see in your <think> notes, even when a page "
    "alone cannot answer the question; your notes are stored in a persistent evidence space "
    "shown to you at each turn. Once the evidence suffices, perform one final verification "
    "search to confirm nothing was missed, then answer.";

const char* kUserDefault = "Question: {question}";

const char* kImageObservationDefault =
    "Here is a newly retrieved page image.\n"
    "Original question: {question}\n"
    "Examine the page and record every potentially useful detail in your <think> notes, "
    "consulting the evidence space above for what you already know. Then issue your next "
    "action.";

const char* kCropEvaluationDefault =
    "Before acting, decide whether this page is already legible. Propose "
    "<bbox>[x1, y1, x2, y2]</bbox> only if critical details are visually unclear at the "
    "current scale; do not crop regions you can already read.";

const char* kCropCorrectionDefault =
    "Here is the zoomed view of the region you selected.\n"
    "Original question: {question}\n"
    "Record what the zoomed region shows in your <think> notes. If the crop turned out to be "
    "uninformative, fall back on your earlier notes about the full page. Your next action "
    "must be <search> or <answer>; do not issue another <bbox>.";

const char* kVerificationHintDefault =
    "This retrieval is a verification step. If the new page is consistent with your "
    "accumulated evidence, issue your final <answer> immediately. Continue searching only if "
    "this page directly contradicts your evidence.";

const char* kNoImageDefault =
    "No new pages are available: every candidate for this search has already been shown to "
    "you.\n"
    "Original question: {question}\n"
    "Produce your final <answer> now from the accumulated evidence.\n"
    "{evidence}";

const char* kForcedAnswerDefault =
    "The maximum number of turns has been reached.\n"
    "Original question: {question}\n"
    "You must produce a final <answer> now, grounded in the accumulated evidence.\n"
    "{evidence}";

const char* kInvalidActionDefault =
    "Your last response was not a valid action: {reason}.\n"
    "Original question: {question}\n"
    "Reply with <think>your reasoning</think> followed by exactly one action tag: "
    "<search>query</search>, <bbox>[x1, y1, x2, y2]</bbox>, or <answer>final answer</answer>.";

// Small-model variants: shorter sentences, same placeholders.
const char* kSystemSmall =
    "You answer questions using retrieved page images.\n"
    "Always reply as: <think>reasoning</think> then ONE action.\n"
    "Actions: <search>query</search> gets a new page. <bbox>[x1, y1, x2, y2]</bbox> zooms "
    "into the current page (coordinates 0 to 1000, x1 < x2, y1 < y2). "
    "<answer>final answer</answer> finishes.\n"
    "Write every useful detail you see inside <think>; it is saved as evidence. Do one last "
    "verification search before answering.";

const char* kUserSmall = "Question: {question}";

const char* kImageObservationSmall =
    "New page image.\n"
    "Question: {question}\n"
    "Note every useful detail in <think>, then act.";

const char* kCropEvaluationSmall =
    "Use <bbox> only if something important is too small to read. Otherwise do not crop.";

const char* kCropCorrectionSmall =
    "Zoomed view of your region.\n"
    "Question: {question}\n"
    "Note what it shows in <think>. If it is not helpful, use your earlier notes. Next action "
    "must be <search> or <answer>, not <bbox>.";

const char* kVerificationHintSmall =
    "Verification step: if this page agrees with your evidence, give the final <answer> now. "
    "Search again only on a direct contradiction.";

const char* kNoImageSmall =
    "No new pages left for this search.\n"
    "Question: {question}\n"
    "Give your final <answer> from the evidence.\n"
    "{evidence}";

const char* kForcedAnswerSmall =
    "Turn limit reached.\n"
    "Question: {question}\n"
    "Give a final <answer> now using the evidence.\n"
    "{evidence}";

const char* kInvalidActionSmall =
    "Invalid action: {reason}.\n"
    "Question: {question}\n"
    "Reply as <think>reasoning</think> plus one action: <search>...</search>, "
    "<bbox>[x1, y1, x2, y2]</bbox>, or <answer>...</answer>.";

const std::vector<std::string>& supported_placeholders() {
    static const std::vector<std::string> kSet = {"question", "evidence", "turn", "reason"};
    return kSet;
}

bool placeholder_supported(const std::string& name) {
    const auto& s = supported_placeholders();
    return std::find(s.begin(), s.end(), name) != s.end();
}

// Extracts {identifier} occurrences (lowercase letters and underscores).
std::vector<std::string> find_placeholders(const std::string& tmpl) {
    std::vector<std::string> out;
    for (size_t i = 0; i < tmpl.size(); ++i) {
        if (tmpl[i] != '{') continue;
        size_t j = i + 1;
        while (j < tmpl.size() && (std::islower(static_cast<unsigned char>(tmpl[j])) || tmpl[j] == '_')) {
            ++j;
        }
        if (j > i + 1 && j < tmpl.size() && tmpl[j] == '}') {
            out.push_back(tmpl.substr(i + 1, j - i - 1));
            i = j;
        }
    }
    return out;
}

std::string read_file_or(const std::string& path, const std::string& fallback) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return fallback;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

PromptTemplateSet PromptTemplateSet::builtin_default() {
    PromptTemplateSet t;
    t.system = kSystemDefault;
    t.user = kUserDefault;
    t.image_observation = kImageObservationDefault;
    t.crop_evaluation = kCropEvaluationDefault;
    t.crop_correction = kCropCorrectionDefault;
    t.verification_hint = kVerificationHintDefault;
    t.no_image = kNoImageDefault;
    t.forced_answer = kForcedAnswerDefault;
    t.invalid_action = kInvalidActionDefault;
    return t;
}

PromptTemplateSet PromptTemplateSet::builtin_small() {
    PromptTemplateSet t;
    t.system = kSystemSmall;
    t.user = kUserSmall;
    t.image_observation = kImageObservationSmall;
    t.crop_evaluation = kCropEvaluationSmall;
    t.crop_correction = kCropCorrectionSmall;
    t.verification_hint = kVerificationHintSmall;
    t.no_image = kNoImageSmall;
    t.forced_answer = kForcedAnswerSmall;
    t.invalid_action = kInvalidActionSmall;
    return t;
}

PromptTemplateSet PromptTemplateSet::load_dir(const std::string& dir) {
    PromptTemplateSet t = builtin_default();
    namespace fs = std::filesystem;
    auto path = [&](const char* name) { return (fs::path(dir) / (std::string(name) + ".txt")).string(); };
    t.system = read_file_or(path("system"), t.system);
    t.user = read_file_or(path("user"), t.user);
    t.image_observation = read_file_or(path("image_observation"), t.image_observation);
    t.crop_evaluation = read_file_or(path("crop_evaluation"), t.crop_evaluation);
    t.crop_correction = read_file_or(path("crop_correction"), t.crop_correction);
    t.verification_hint = read_file_or(path("verification_hint"), t.verification_hint);
    t.no_image = read_file_or(path("no_image"), t.no_image);
    t.forced_answer = read_file_or(path("forced_answer"), t.forced_answer);
    t.invalid_action = read_file_or(path("invalid_action"), t.invalid_action);
    t.validate();
    return t;
}

void PromptTemplateSet::validate() const {
    const std::string* all[] = {&system,          &user,        &image_observation,
                                &crop_evaluation, &crop_correction, &verification_hint,
                                &no_image,        &forced_answer,   &invalid_action};
    for (const std::string* tmpl : all) {
        for (const std::string& name : find_placeholders(*tmpl)) {
            if (!placeholder_supported(name)) {
                raise(Errc::UnknownTemplatePlaceholder, "{" + name + "}");
            }
        }
    }
}

std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tmpl.size());
    for (size_t i = 0; i < tmpl.size(); ++i) {
        if (tmpl[i] != '{') {
            out += tmpl[i];
            continue;
        }
        size_t j = i + 1;
        while (j < tmpl.size() && (std::islower(static_cast<unsigned char>(tmpl[j])) || tmpl[j] == '_')) {
            ++j;
        }
        if (j > i + 1 && j < tmpl.size() && tmpl[j] == '}') {
            const std::string name = tmpl.substr(i + 1, j - i - 1);
            auto it = values.find(name);
            if (it == values.end()) {
                raise(Errc::UnknownTemplatePlaceholder, "{" + name + "}");
            }
            out += it->second;
            i = j;
        } else {
            out += tmpl[i];
        }
    }
    return out;
}

}  // namespace vragent
