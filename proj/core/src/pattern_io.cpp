#include "apx/pattern_io.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace apx {

namespace {
using nlohmann::json;
}

std::string patterns_to_json(const std::vector<ActionPattern>& patterns) {
    json doc = json::array();
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        const ActionPattern& p = patterns[i];
        if (p.objects.size() != 1) {
            throw std::runtime_error("pattern " + std::to_string(i) +
                                     ": pattern files hold exactly one object per "
                                     "record, got " +
                                     std::to_string(p.objects.size()));
        }
        json record;
        record["action"] = p.action;
        record["agents"] = p.agents;
        record["object"] = p.objects.front();
        record["tools"] = p.tools;
        doc.push_back(std::move(record));
    }
    return doc.dump(2) + "\n";
}

void write_patterns(const std::vector<ActionPattern>& patterns,
                    const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write pattern file: " + path.string());
    out << patterns_to_json(patterns);
}

std::vector<ActionPattern> load_patterns(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open pattern file: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("pattern file parse error: ") + e.what());
    }
    if (!doc.is_array()) {
        throw std::runtime_error("pattern file must contain a top-level array");
    }
    std::vector<ActionPattern> patterns;
    patterns.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& record = doc[i];
        for (const char* key : {"action", "agents", "object", "tools"}) {
            if (!record.contains(key)) {
                throw std::runtime_error("pattern " + std::to_string(i) +
                                         ": missing key '" + key + "'");
            }
        }
        ActionPattern p;
        p.action = normalize_label(record["action"].get<std::string>());
        p.agents = normalize_unique(record["agents"].get<std::vector<std::string>>());
        p.objects = {normalize_label(record["object"].get<std::string>())};
        p.tools = normalize_unique(record["tools"].get<std::vector<std::string>>());
        patterns.push_back(std::move(p));
    }
    return patterns;
}

}  // namespace apx
