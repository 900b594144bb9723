#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "apx/action_pattern.hpp"

namespace apx {

enum class TemplateId {
    SlotTool,
    SlotStateBefore,
    SlotStateAfter,
    SlotSpatial,
    BulkPatterns,
    ClozeTool,
    ClozeStateBefore,
    ClozeStateAfter,
};

const char* to_string(TemplateId id);

/// Canonical template body for the id, with $placeholders unresolved.
/// These texts are frozen; the copies under data/templates/ mirror them.
const std::string& template_body(TemplateId id);

/// Generic mask marker used in cloze templates; backends translate it to
/// their model-specific token.
inline constexpr const char* kMaskMarker = "[MASK]";

struct RenderedPrompt {
    TemplateId id;
    std::map<std::string, std::string> bindings;
    std::string text;
};

class PromptError : public std::runtime_error {
public:
    enum class Code { EmptyCandidates, MissingTool, InvalidNumber, UnsupportedKind };

    PromptError(Code code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

/// Renders the slot-extraction prompt for one open slot of an action
/// pattern. Candidates are joined with ", " in the given order. Spatial
/// prompts require the tool. Unless allow_ungrounded is set, an empty
/// candidate list is an error.
RenderedPrompt render_slot_prompt(ExtractionKind kind, const Label& action,
                                  const Label& object,
                                  const std::vector<Label>& candidates,
                                  const std::optional<Label>& tool = std::nullopt,
                                  bool allow_ungrounded = false);

/// Renders the bulk pattern-extraction prompt for a domain of interest.
RenderedPrompt render_bulk_prompt(long number, const std::string& domain);

/// Renders the demasking sentence for tool / state kinds. Contains exactly
/// one kMaskMarker. Spatial cloze is not defined.
RenderedPrompt render_cloze(ExtractionKind kind, const Label& action,
                            const Label& object);

}  // namespace apx
