#pragma once

#include <stdexcept>
#include <string>

namespace vragent {

// Engine error codes. Invalid agent output is NOT an error (see ParseOutcome);
// these cover caller bugs, malformed inputs, and backend failures.
enum class Errc {
    PostCropWithoutPre,
    AppendAfterTerminal,
    DimensionMismatch,
    EmptyIndex,
    DegenerateRegion,
    DecodeFailure,
    RegionOutOfBounds,
    UnknownTemplatePlaceholder,
    EmptyTranscript,
    NoUnseenPageAvailable,
    AlreadyAugmented,
    PolicyFailure,
    JudgeFailure,
    MissingImage,
    EmbedderFailure,
    BadIndexFile,
    BadInput,
    ConfigError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace vragent
