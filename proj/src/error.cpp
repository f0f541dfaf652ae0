#include "vragent/error.hpp"

namespace vragent {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::PostCropWithoutPre: return "PostCropWithoutPre";
        case Errc::AppendAfterTerminal: return "AppendAfterTerminal";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::EmptyIndex: return "EmptyIndex";
        case Errc::DegenerateRegion: return "DegenerateRegion";
        case Errc::DecodeFailure: return "DecodeFailure";
        case Errc::RegionOutOfBounds: return "RegionOutOfBounds";
        case Errc::UnknownTemplatePlaceholder: return "UnknownTemplatePlaceholder";
        case Errc::EmptyTranscript: return "EmptyTranscript";
        case Errc::NoUnseenPageAvailable: return "NoUnseenPageAvailable";
        case Errc::AlreadyAugmented: return "AlreadyAugmented";
        case Errc::PolicyFailure: return "PolicyFailure";
        case Errc::JudgeFailure: return "JudgeFailure";
        case Errc::MissingImage: return "MissingImage";
        case Errc::EmbedderFailure: return "EmbedderFailure";
        case Errc::BadIndexFile: return "BadIndexFile";
        case Errc::BadInput: return "BadInput";
        case Errc::ConfigError: return "ConfigError";
    }
    return "UnknownError";
}

}  // namespace vragent
