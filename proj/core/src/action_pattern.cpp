#include "apx/action_pattern.hpp"

#include <stdexcept>
#include <unordered_set>

namespace apx {

const char* to_string(ExtractionKind kind) {
    switch (kind) {
        case ExtractionKind::Tool: return "tool";
        case ExtractionKind::StateBefore: return "state-before";
        case ExtractionKind::StateAfter: return "state-after";
        case ExtractionKind::Spatial: return "spatial";
    }
    return "unknown";
}

ExtractionKind extraction_kind_from_string(std::string_view name) {
    if (name == "tool") return ExtractionKind::Tool;
    if (name == "state-before") return ExtractionKind::StateBefore;
    if (name == "state-after") return ExtractionKind::StateAfter;
    if (name == "spatial") return ExtractionKind::Spatial;
    throw std::invalid_argument("unknown extraction kind: " + std::string(name));
}

namespace {

void check_labels(const std::vector<Label>& labels, const char* field,
                  std::vector<std::string>& violations) {
    std::unordered_set<std::string> seen;
    for (const auto& label : labels) {
        if (label.empty()) {
            violations.push_back(std::string("empty label in ") + field);
        } else if (!is_normalized(label)) {
            violations.push_back(std::string("non-normalized label in ") + field + ": '" + label + "'");
        }
        if (!seen.insert(label).second) {
            violations.push_back(std::string("duplicate label in ") + field + ": '" + label + "'");
        }
    }
}

}  // namespace

std::vector<std::string> validate_pattern(const ActionPattern& pattern) {
    std::vector<std::string> violations;
    if (pattern.action.empty()) {
        violations.emplace_back("action must be non-empty");
    } else if (!is_normalized(pattern.action)) {
        violations.emplace_back("action must be normalized");
    }
    if (pattern.agents.empty()) violations.emplace_back("agents must be non-empty");
    if (pattern.objects.empty()) violations.emplace_back("objects must be non-empty");
    check_labels(pattern.agents, "agents", violations);
    check_labels(pattern.objects, "objects", violations);
    check_labels(pattern.tools, "tools", violations);
    check_labels(pattern.states_before, "states_before", violations);
    check_labels(pattern.states_after, "states_after", violations);
    for (const auto& rel : pattern.spatial_relations) {
        if (rel.subject.empty() || rel.relation.empty() || rel.relatum.empty()) {
            violations.emplace_back("spatial relation fields must be non-empty");
        }
    }
    return violations;
}

}  // namespace apx
