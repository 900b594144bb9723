#include "apx/prompting.hpp"

#include <array>

namespace apx {

namespace {

const std::string kSlotPreamble =
    "In the following, I will ask you a question. In your response, I want "
    "you to answer with nothing but a list of suitable comma-separated words "
    "sorted by relevance.\n";

const std::string kCandidatesClause =
    "\nChoose only from the following candidates: $candidates.";

const std::string kSlotTool =
    kSlotPreamble + "Which tool can I use to $action $object?" + kCandidatesClause;

const std::string kSlotStateBefore =
    kSlotPreamble + "Which state is the $object in before I $action it?" +
    kCandidatesClause;

const std::string kSlotStateAfter =
    kSlotPreamble + "Which state is the $object in after I $action it?" +
    kCandidatesClause;

const std::string kSlotSpatial =
    kSlotPreamble +
    "How is the $object spatially related to the $tool when I $action the "
    "$object?" + kCandidatesClause;

const std::string kBulkPatterns =
    "Please respond with nothing but lists of the form '(action, agent, "
    "object, tool)'. An action pattern is defined by an action, i.e., a "
    "verb, an agent who executes the action, an object, which is modified, "
    "and optionally a tool. Generate $number action patterns for the domain "
    "of interest '$domain_of_interest'.";

const std::string kClozeTool = "To $action $object, I use a [MASK].";
const std::string kClozeStateBefore =
    "Before I $action the $object, the $object is [MASK].";
const std::string kClozeStateAfter =
    "After I $action the $object, the $object is [MASK].";

// Longest names first so shorter placeholder names never shadow longer ones.
constexpr std::array<const char*, 6> kPlaceholders = {
    "domain_of_interest", "candidates", "action", "object", "number", "tool"};

std::string substitute(const std::string& body,
                       const std::map<std::string, std::string>& bindings) {
    std::string text = body;
    for (const char* name : kPlaceholders) {
        auto it = bindings.find(name);
        if (it == bindings.end()) continue;
        const std::string needle = std::string("$") + name;
        std::size_t pos = 0;
        while ((pos = text.find(needle, pos)) != std::string::npos) {
            text.replace(pos, needle.size(), it->second);
            pos += it->second.size();
        }
    }
    return text;
}

std::string join(const std::vector<Label>& labels) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) out += ", ";
        out += labels[i];
    }
    return out;
}

}  // namespace

const char* to_string(TemplateId id) {
    switch (id) {
        case TemplateId::SlotTool: return "slot_tool";
        case TemplateId::SlotStateBefore: return "slot_state_before";
        case TemplateId::SlotStateAfter: return "slot_state_after";
        case TemplateId::SlotSpatial: return "slot_spatial";
        case TemplateId::BulkPatterns: return "bulk_patterns";
        case TemplateId::ClozeTool: return "cloze_tool";
        case TemplateId::ClozeStateBefore: return "cloze_state_before";
        case TemplateId::ClozeStateAfter: return "cloze_state_after";
    }
    return "unknown";
}

const std::string& template_body(TemplateId id) {
    switch (id) {
        case TemplateId::SlotTool: return kSlotTool;
        case TemplateId::SlotStateBefore: return kSlotStateBefore;
        case TemplateId::SlotStateAfter: return kSlotStateAfter;
        case TemplateId::SlotSpatial: return kSlotSpatial;
        case TemplateId::BulkPatterns: return kBulkPatterns;
        case TemplateId::ClozeTool: return kClozeTool;
        case TemplateId::ClozeStateBefore: return kClozeStateBefore;
        case TemplateId::ClozeStateAfter: return kClozeStateAfter;
    }
    throw std::logic_error("unknown template id");
}

RenderedPrompt render_slot_prompt(ExtractionKind kind, const Label& action,
                                  const Label& object,
                                  const std::vector<Label>& candidates,
                                  const std::optional<Label>& tool,
                                  bool allow_ungrounded) {
    if (candidates.empty() && !allow_ungrounded) {
        throw PromptError(PromptError::Code::EmptyCandidates,
                          "slot prompt requires a non-empty candidate list");
    }
    TemplateId id;
    switch (kind) {
        case ExtractionKind::Tool: id = TemplateId::SlotTool; break;
        case ExtractionKind::StateBefore: id = TemplateId::SlotStateBefore; break;
        case ExtractionKind::StateAfter: id = TemplateId::SlotStateAfter; break;
        case ExtractionKind::Spatial: id = TemplateId::SlotSpatial; break;
        default: throw std::logic_error("unreachable");
    }
    RenderedPrompt prompt;
    prompt.id = id;
    prompt.bindings["action"] = action;
    prompt.bindings["object"] = object;
    prompt.bindings["candidates"] = join(candidates);
    if (kind == ExtractionKind::Spatial) {
        if (!tool || tool->empty()) {
            throw PromptError(PromptError::Code::MissingTool,
                              "spatial slot prompt requires a tool");
        }
        prompt.bindings["tool"] = *tool;
    }
    prompt.text = substitute(template_body(id), prompt.bindings);
    return prompt;
}

RenderedPrompt render_bulk_prompt(long number, const std::string& domain) {
    if (number < 1) {
        throw PromptError(PromptError::Code::InvalidNumber,
                          "pattern count must be >= 1, got " + std::to_string(number));
    }
    if (domain.empty()) {
        throw PromptError(PromptError::Code::InvalidNumber,
                          "domain of interest must be non-empty");
    }
    RenderedPrompt prompt;
    prompt.id = TemplateId::BulkPatterns;
    prompt.bindings["number"] = std::to_string(number);
    prompt.bindings["domain_of_interest"] = domain;
    prompt.text = substitute(template_body(prompt.id), prompt.bindings);
    return prompt;
}

RenderedPrompt render_cloze(ExtractionKind kind, const Label& action,
                            const Label& object) {
    TemplateId id;
    switch (kind) {
        case ExtractionKind::Tool: id = TemplateId::ClozeTool; break;
        case ExtractionKind::StateBefore: id = TemplateId::ClozeStateBefore; break;
        case ExtractionKind::StateAfter: id = TemplateId::ClozeStateAfter; break;
        default:
            throw PromptError(PromptError::Code::UnsupportedKind,
                              "no cloze template for kind 'spatial'");
    }
    RenderedPrompt prompt;
    prompt.id = id;
    prompt.bindings["action"] = action;
    prompt.bindings["object"] = object;
    prompt.text = substitute(template_body(id), prompt.bindings);
    return prompt;
}

}  // namespace apx
