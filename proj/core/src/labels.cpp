#include "apx/labels.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace apx {

namespace {

bool is_surrounding_punct(char c) {
    switch (c) {
        case '.': case ',': case ';': case ':': case '!': case '?':
        case '"': case '\'': case '(': case ')':
            return true;
        default:
            return false;
    }
}

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

Label normalize_label(std::string_view raw) {
    std::size_t begin = 0;
    std::size_t end = raw.size();
    while (begin < end && (is_space(raw[begin]) || is_surrounding_punct(raw[begin]))) ++begin;
    while (end > begin && (is_space(raw[end - 1]) || is_surrounding_punct(raw[end - 1]))) --end;

    Label out;
    out.reserve(end - begin);
    bool pending_space = false;
    for (std::size_t i = begin; i < end; ++i) {
        char c = raw[i];
        if (is_space(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

bool is_normalized(std::string_view text) {
    return normalize_label(text) == text;
}

std::vector<Label> normalize_unique(const std::vector<std::string>& raw) {
    std::vector<Label> out;
    std::unordered_set<std::string> seen;
    out.reserve(raw.size());
    for (const auto& item : raw) {
        Label label = normalize_label(item);
        if (label.empty()) continue;
        if (seen.insert(label).second) out.push_back(std::move(label));
    }
    return out;
}

}  // namespace apx
