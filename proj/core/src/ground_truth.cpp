#include "apx/ground_truth.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

namespace apx {

namespace {

using nlohmann::json;

constexpr const char* kKeys[] = {
    "action", "object", "tools", "object_states_before",
    "object_states_after", "spatial_relations"};

std::vector<Label> read_list(const json& record, long index, const char* key,
                             bool preserve_raw) {
    const json& value = record.at(key);
    if (!value.is_array()) {
        throw GroundTruthError(GroundTruthError::Code::MalformedFile,
                               "entry " + std::to_string(index) + ": key '" + key +
                                   "' must be an array",
                               index, key);
    }
    std::vector<Label> out;
    out.reserve(value.size());
    for (const auto& item : value) {
        if (!item.is_string()) {
            throw GroundTruthError(GroundTruthError::Code::MalformedFile,
                                   "entry " + std::to_string(index) + ": key '" + key +
                                       "' contains a non-string element",
                                   index, key);
        }
        // Spatial strings are normalized as whole phrases so word order and
        // rank survive; parsing into subject/relation/relatum happens later.
        Label label = normalize_label(item.get<std::string>());
        if (!label.empty()) out.push_back(std::move(label));
        (void)preserve_raw;
    }
    if (out.empty()) {
        throw GroundTruthError(GroundTruthError::Code::EmptyList,
                               "entry " + std::to_string(index) + ": key '" + key +
                                   "' must be a non-empty list",
                               index, key);
    }
    return out;
}

}  // namespace

std::vector<GroundTruthEntry> load_ground_truth(const std::filesystem::path& path,
                                                bool strict,
                                                std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) {
        throw GroundTruthError(GroundTruthError::Code::MalformedFile,
                               "cannot open ground-truth file: " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw GroundTruthError(GroundTruthError::Code::MalformedFile,
                               "ground-truth parse error at byte " +
                                   std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_array()) {
        throw GroundTruthError(GroundTruthError::Code::MalformedFile,
                               "ground-truth file must contain a top-level array");
    }

    std::vector<GroundTruthEntry> entries;
    entries.reserve(doc.size());
    for (long index = 0; index < static_cast<long>(doc.size()); ++index) {
        const json& record = doc[static_cast<std::size_t>(index)];
        if (!record.is_object()) {
            throw GroundTruthError(GroundTruthError::Code::MalformedFile,
                                   "entry " + std::to_string(index) + " is not an object",
                                   index);
        }
        for (const char* key : kKeys) {
            if (!record.contains(key)) {
                throw GroundTruthError(GroundTruthError::Code::MissingKey,
                                       "entry " + std::to_string(index) +
                                           ": missing key '" + key + "'",
                                       index, key);
            }
        }
        for (const auto& [key, value] : record.items()) {
            bool known = false;
            for (const char* k : kKeys) {
                if (key == k) { known = true; break; }
            }
            if (!known) {
                std::string message = "entry " + std::to_string(index) +
                                      ": unexpected key '" + key + "'";
                if (strict) {
                    throw GroundTruthError(GroundTruthError::Code::UnexpectedKey,
                                           message, index, key);
                }
                if (warnings) warnings->push_back(message);
            }
        }

        GroundTruthEntry entry;
        if (!record.at("action").is_string() || !record.at("object").is_string()) {
            throw GroundTruthError(GroundTruthError::Code::MalformedFile,
                                   "entry " + std::to_string(index) +
                                       ": 'action' and 'object' must be strings",
                                   index);
        }
        entry.action = normalize_label(record.at("action").get<std::string>());
        entry.object = normalize_label(record.at("object").get<std::string>());
        if (entry.action.empty()) {
            throw GroundTruthError(GroundTruthError::Code::EmptyField,
                                   "entry " + std::to_string(index) +
                                       ": 'action' is empty after normalization",
                                   index, "action");
        }
        if (entry.object.empty()) {
            throw GroundTruthError(GroundTruthError::Code::EmptyField,
                                   "entry " + std::to_string(index) +
                                       ": 'object' is empty after normalization",
                                   index, "object");
        }
        entry.tools = read_list(record, index, "tools", false);
        entry.object_states_before = read_list(record, index, "object_states_before", false);
        entry.object_states_after = read_list(record, index, "object_states_after", false);
        entry.spatial_relations = read_list(record, index, "spatial_relations", true);
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::string ground_truth_to_json(const std::vector<GroundTruthEntry>& entries) {
    json doc = json::array();
    for (const auto& entry : entries) {
        json record;
        record["action"] = entry.action;
        record["object"] = entry.object;
        record["tools"] = entry.tools;
        record["object_states_before"] = entry.object_states_before;
        record["object_states_after"] = entry.object_states_after;
        record["spatial_relations"] = entry.spatial_relations;
        doc.push_back(std::move(record));
    }
    return doc.dump(2) + "\n";
}

void write_ground_truth(const std::vector<GroundTruthEntry>& entries,
                        const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw GroundTruthError(GroundTruthError::Code::MalformedFile,
                               "cannot write ground-truth file: " + path.string());
    }
    out << ground_truth_to_json(entries);
}

}  // namespace apx
