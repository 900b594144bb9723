#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace apx {

/// A normalized label: lowercase, trimmed of surrounding punctuation and
/// whitespace, internal whitespace runs collapsed to single spaces.
using Label = std::string;

/// Normalizes arbitrary text into a Label. Total: never throws, may return
/// an empty string when nothing survives normalization.
Label normalize_label(std::string_view raw);

/// True iff the text is already a fixed point of normalize_label.
bool is_normalized(std::string_view text);

/// Normalizes every element, dropping empties and duplicates while keeping
/// first-occurrence order.
std::vector<Label> normalize_unique(const std::vector<std::string>& raw);

}  // namespace apx
