#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>

#include "apx/action_pattern.hpp"

namespace apx {

/// Fixed class and property names minted under a base IRI.
struct OntologyVocabulary {
    std::string base_iri = "http://example.org/action-patterns#";

    // classes
    std::string cls_action = "Action";
    std::string cls_object = "Object";
    std::string cls_state = "State";
    std::string cls_location = "Location";
    std::string cls_time = "Time";

    // properties
    std::string prop_has_agent = "has_agent";
    std::string prop_has_object = "has_object";
    std::string prop_has_tool = "has_tool";
    std::string prop_has_location = "has_location";
    std::string prop_has_time = "has_time";
    std::string prop_has_state = "has_state";
    std::string prop_has_state_before = "has_state_before";
    std::string prop_has_state_after = "has_state_after";
    std::string prop_spatially_related = "spatially_related_to";
};

class OntologyError : public std::runtime_error {
public:
    explicit OntologyError(std::string message)
        : std::runtime_error(std::move(message)) {}
};

/// Validates that the base IRI is absolute and ends in '/' or '#'.
void validate_vocabulary(const OntologyVocabulary& vocab);

struct OntologyDocument {
    std::string turtle;
    std::size_t triple_count = 0;
    std::map<std::string, std::size_t> individuals_per_class;
};

/// Deterministic IRI for a label: spaces become '_', everything outside
/// [A-Za-z0-9_] is percent-encoded, an optional discriminator is appended
/// with '_'. Throws OntologyError on an empty label.
std::string mint_iri(const std::string& base_iri, const Label& label,
                     const std::string& discriminator = {});

/// Local name under the base IRI (same encoding as mint_iri, no base).
std::string mint_local_name(const Label& label,
                            const std::string& discriminator = {});

/// Emits the terminology: the five classes, the object properties with
/// their domains and ranges, and the cardinality restrictions on Action and
/// Object. has_tool deliberately carries no minimum restriction.
OntologyDocument emit_tbox(const OntologyVocabulary& vocab = {});

/// Emits TBox plus one Action individual per pattern (discriminated by
/// position) with shared, label-keyed Object individuals, state links and
/// spatial-relation triples.
OntologyDocument populate(std::span<const ActionPattern> patterns,
                          const OntologyVocabulary& vocab = {});

}  // namespace apx
