#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "apx/action_pattern.hpp"

namespace apx {

/// A relevance-ordered list of normalized labels recovered from raw model
/// text, plus the number of fragments dropped by candidate filtering.
struct RankedLabels {
    std::vector<Label> labels;
    std::size_t rejected = 0;
};

class EmptyParseError : public std::runtime_error {
public:
    explicit EmptyParseError(std::string message)
        : std::runtime_error(std::move(message)) {}
};

/// Parses a comma/newline separated answer into ranked labels. Strips a
/// conversational preamble (text up to the last colon on the first line, if
/// what follows still yields at least one item), normalizes items, drops
/// empties and duplicates. With a candidate set, out-of-set items are
/// dropped and counted in `rejected`.
/// Throws EmptyParseError when nothing survives.
RankedLabels parse_ranked_list(
    const std::string& raw,
    const std::optional<std::unordered_set<Label>>& candidates = std::nullopt);

struct MalformedLine {
    std::size_t line_number;  // 1-based
    std::string text;
    std::string reason;
};

/// Outcome of parsing a bulk '(action, agent, object, tool)' response.
/// Every tuple-candidate line lands in exactly one of the two lists.
struct TupleParseReport {
    std::vector<ActionPattern> patterns;
    std::vector<MalformedLine> malformed;
};

/// Parses tuple lines from a bulk response. Lines without parentheses are
/// conversational noise and ignored. Numbering prefixes ("1.", "-") are
/// skipped; a 4th field that is empty or a none-marker ("none", "n/a", "-")
/// leaves tools empty.
TupleParseReport parse_pattern_tuples(const std::string& raw);

/// Splits a ground-truth spatial string of shape "<object> <relation> <tool>"
/// into a SpatialRelation; anything else comes back freeform with the whole
/// normalized string as the relation.
SpatialRelation parse_spatial_ground_truth(const std::string& raw,
                                           const Label& object,
                                           const Label& tool);

}  // namespace apx
