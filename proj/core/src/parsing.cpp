#include "apx/parsing.hpp"

#include <algorithm>
#include <cctype>

namespace apx {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = text.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(text.substr(start));
            break;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

std::string strip(const std::string& text) {
    std::size_t begin = 0, end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return text.substr(begin, end - begin);
}

// "1.", "2)", "-", "*" list prefixes at the start of a line.
std::string strip_numbering(const std::string& line) {
    std::size_t i = 0;
    const std::size_t n = line.size();
    while (i < n && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t digits = i;
    while (digits < n && std::isdigit(static_cast<unsigned char>(line[digits]))) ++digits;
    if (digits > i && digits < n && (line[digits] == '.' || line[digits] == ')')) {
        return line.substr(digits + 1);
    }
    if (i < n && (line[i] == '-' || line[i] == '*') &&
        (i + 1 == n || line[i + 1] == ' ' || line[i + 1] == '(')) {
        return line.substr(i + 1);
    }
    return line.substr(i);
}

bool is_none_marker(const Label& label) {
    return label.empty() || label == "none" || label == "n/a" || label == "-";
}

}  // namespace

RankedLabels parse_ranked_list(
    const std::string& raw,
    const std::optional<std::unordered_set<Label>>& candidates) {
    std::string body = raw;

    // Preamble such as "Sure! Here are the tools:" ends with a colon on the
    // first line; drop it if items still remain afterwards.
    std::size_t first_newline = body.find('\n');
    std::string first_line =
        first_newline == std::string::npos ? body : body.substr(0, first_newline);
    std::size_t colon = first_line.rfind(':');
    if (colon != std::string::npos) {
        std::string remainder = body.substr(colon + 1);
        if (!normalize_label(remainder).empty()) body = std::move(remainder);
    }

    RankedLabels result;
    std::unordered_set<Label> seen;
    for (const std::string& line : split(body, '\n')) {
        for (const std::string& fragment : split(line, ',')) {
            Label label = normalize_label(strip_numbering(fragment));
            if (label.empty()) continue;
            if (candidates && !candidates->count(label)) {
                ++result.rejected;
                continue;
            }
            if (seen.insert(label).second) result.labels.push_back(std::move(label));
        }
    }
    if (result.labels.empty()) {
        throw EmptyParseError("no labels recovered from response of " +
                              std::to_string(raw.size()) + " bytes");
    }
    return result;
}

TupleParseReport parse_pattern_tuples(const std::string& raw) {
    TupleParseReport report;
    std::size_t line_number = 0;
    for (const std::string& original : split(raw, '\n')) {
        ++line_number;
        std::string line = strip_numbering(strip(original));
        std::size_t open = line.find('(');
        if (open == std::string::npos) continue;  // conversational noise

        std::size_t close = line.rfind(')');
        if (close == std::string::npos || close < open) {
            report.malformed.push_back({line_number, strip(original),
                                        "missing closing parenthesis"});
            continue;
        }
        std::vector<std::string> fields =
            split(line.substr(open + 1, close - open - 1), ',');
        if (fields.size() != 3 && fields.size() != 4) {
            report.malformed.push_back(
                {line_number, strip(original),
                 "expected 3 or 4 fields, got " + std::to_string(fields.size())});
            continue;
        }
        Label action = normalize_label(fields[0]);
        Label agent = normalize_label(fields[1]);
        Label object = normalize_label(fields[2]);
        if (action.empty() || agent.empty() || object.empty()) {
            report.malformed.push_back({line_number, strip(original),
                                        "empty action, agent or object field"});
            continue;
        }
        ActionPattern pattern;
        pattern.action = std::move(action);
        pattern.agents = {std::move(agent)};
        pattern.objects = {std::move(object)};
        if (fields.size() == 4) {
            Label tool = normalize_label(fields[3]);
            if (!is_none_marker(tool)) pattern.tools = {std::move(tool)};
        }
        report.patterns.push_back(std::move(pattern));
    }
    return report;
}

SpatialRelation parse_spatial_ground_truth(const std::string& raw,
                                           const Label& object,
                                           const Label& tool) {
    const Label text = normalize_label(raw);
    SpatialRelation rel;
    if (!object.empty() && !tool.empty() &&
        text.size() > object.size() + tool.size() + 1 &&
        text.compare(0, object.size(), object) == 0 &&
        text[object.size()] == ' ' &&
        text.compare(text.size() - tool.size(), tool.size(), tool) == 0 &&
        text[text.size() - tool.size() - 1] == ' ') {
        rel.subject = object;
        rel.relatum = tool;
        rel.relation = text.substr(
            object.size() + 1, text.size() - object.size() - tool.size() - 2);
        if (!rel.relation.empty()) return rel;
    }
    rel.subject = object;
    rel.relatum = tool;
    rel.relation = text;
    rel.freeform = true;
    return rel;
}

}  // namespace apx
