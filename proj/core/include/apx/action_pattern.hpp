#pragma once

#include <string>
#include <vector>

#include "apx/labels.hpp"

namespace apx {

/// The four slot-extraction targets of an action pattern.
enum class ExtractionKind { Tool, StateBefore, StateAfter, Spatial };

const char* to_string(ExtractionKind kind);

/// Parses "tool" / "state-before" / "state-after" / "spatial".
/// Throws std::invalid_argument on anything else.
ExtractionKind extraction_kind_from_string(std::string_view name);

/// A binary spatial statement such as "bread near knife". Ground-truth
/// strings that do not match the `<subject> <relation> <relatum>` shape are
/// kept whole in `relation` with freeform set.
struct SpatialRelation {
    Label subject;
    Label relation;
    Label relatum;
    bool freeform = false;

    bool operator==(const SpatialRelation&) const = default;
};

/// One action pattern: an action applied by agents to objects, optionally
/// with tools, plus before/after object states and spatial relations.
/// Label lists are ordered (relevance / insertion order) and duplicate-free.
struct ActionPattern {
    Label action;
    std::vector<Label> agents;
    std::vector<Label> objects;
    std::vector<Label> tools;
    std::vector<Label> states_before;
    std::vector<Label> states_after;
    std::vector<SpatialRelation> spatial_relations;

    bool operator==(const ActionPattern&) const = default;
};

/// Returns all violated invariants; empty means the pattern is valid.
std::vector<std::string> validate_pattern(const ActionPattern& pattern);

}  // namespace apx
