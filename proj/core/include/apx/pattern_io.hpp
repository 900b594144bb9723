#pragma once

#include <filesystem>
#include <vector>

#include "apx/action_pattern.hpp"

namespace apx {

/// Extracted-pattern file: a JSON array of records with keys
/// action, agents, object, tools (ground-truth shape minus the state and
/// spatial keys, plus agents). Objects collapse to one `object` per record.
std::string patterns_to_json(const std::vector<ActionPattern>& patterns);

void write_patterns(const std::vector<ActionPattern>& patterns,
                    const std::filesystem::path& path);

std::vector<ActionPattern> load_patterns(const std::filesystem::path& path);

}  // namespace apx
