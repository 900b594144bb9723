#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "apx/labels.hpp"

namespace apx {

/// One ground-truth record: a single action/object pair with
/// relevance-ranked answer lists. List order is meaningful and preserved.
struct GroundTruthEntry {
    Label action;
    Label object;
    std::vector<Label> tools;
    std::vector<Label> object_states_before;
    std::vector<Label> object_states_after;
    std::vector<std::string> spatial_relations;  // raw strings, normalized but unparsed

    bool operator==(const GroundTruthEntry&) const = default;
};

class GroundTruthError : public std::runtime_error {
public:
    enum class Code { MissingKey, EmptyList, MalformedFile, UnexpectedKey, EmptyField };

    GroundTruthError(Code code, std::string message, long entry_index = -1,
                     std::string key = {})
        : std::runtime_error(std::move(message)),
          code_(code), entry_index_(entry_index), key_(std::move(key)) {}

    Code code() const { return code_; }
    long entry_index() const { return entry_index_; }
    const std::string& key() const { return key_; }

private:
    Code code_;
    long entry_index_;
    std::string key_;
};

/// Loads a UTF-8 JSON array of Listing-style records. Labels are normalized,
/// list order preserved. In strict mode unknown keys raise UnexpectedKey;
/// otherwise they are collected into `warnings` (when given) and ignored.
std::vector<GroundTruthEntry> load_ground_truth(
    const std::filesystem::path& path, bool strict = false,
    std::vector<std::string>* warnings = nullptr);

/// Serializes entries back to the on-disk record format.
std::string ground_truth_to_json(const std::vector<GroundTruthEntry>& entries);

void write_ground_truth(const std::vector<GroundTruthEntry>& entries,
                        const std::filesystem::path& path);

}  // namespace apx
