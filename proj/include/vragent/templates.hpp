#pragma once

#include <map>
#include <string>

namespace vragent {

// Editable prompt texts with {placeholder} syntax. Supported placeholders:
// {question}, {evidence}, {turn}, {reason}. Loaded from a directory of
// <name>.txt files; missing files fall back to the built-in defaults.
struct PromptTemplateSet {
    std::string system;
    std::string user;
    std::string image_observation;
    std::string crop_evaluation;
    std::string crop_correction;
    std::string verification_hint;
    std::string no_image;
    std::string forced_answer;
    std::string invalid_action;

    static PromptTemplateSet builtin_default();
    // Shorter wording for small policies; same placeholders and contracts.
    static PromptTemplateSet builtin_small();
    static PromptTemplateSet load_dir(const std::string& dir);

    // Throws UnknownTemplatePlaceholder if any template references a
    // placeholder outside the supported set.
    void validate() const;
};

// Substitutes {name} occurrences from `values`. A {name} not present in
// `values` throws UnknownTemplatePlaceholder. Brace runs that are not a
// bare lowercase identifier are left untouched.
std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& values);

}  // namespace vragent
