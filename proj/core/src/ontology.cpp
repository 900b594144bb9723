#include "apx/ontology.hpp"

#include <unordered_set>
#include <vector>

namespace apx {

namespace {

bool is_unreserved(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_';
}

std::string percent_encode(const std::string& text) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (is_unreserved(c)) {
            out.push_back(c);
        } else {
            unsigned char byte = static_cast<unsigned char>(c);
            out.push_back('%');
            out.push_back(hex[byte >> 4]);
            out.push_back(hex[byte & 0xf]);
        }
    }
    return out;
}

/// Accumulates Turtle text while counting the triples it writes.
class TurtleWriter {
public:
    explicit TurtleWriter(const std::string& base_iri) {
        text_ += "@prefix ap: <" + base_iri + "> .\n";
        text_ += "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n";
        text_ += "@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .\n";
        text_ += "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n";
        text_ += "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n";
    }

    void blank_line() { text_ += "\n"; }
    void comment(const std::string& line) { text_ += "# " + line + "\n"; }

    void triple(const std::string& s, const std::string& p, const std::string& o) {
        text_ += s + " " + p + " " + o + " .\n";
        ++count_;
    }

    /// One subject with several predicate/object pairs, ';'-chained.
    void block(const std::string& subject,
               const std::vector<std::pair<std::string, std::string>>& pairs) {
        text_ += subject;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            text_ += i == 0 ? " " : " ;\n    ";
            text_ += pairs[i].first + " " + pairs[i].second;
            ++count_;
        }
        text_ += " .\n";
    }

    /// rdfs:subClassOf a qualified-cardinality restriction (5 triples).
    void restriction(const std::string& cls, const std::string& property,
                     const std::string& cardinality_predicate,
                     const std::string& on_class) {
        text_ += cls + " rdfs:subClassOf [ a owl:Restriction ;\n";
        text_ += "    owl:onProperty " + property + " ;\n";
        text_ += "    " + cardinality_predicate +
                 " \"1\"^^xsd:nonNegativeInteger ;\n";
        text_ += "    owl:onClass " + on_class + " ] .\n";
        count_ += 5;
    }

    std::string take() { return std::move(text_); }
    std::size_t count() const { return count_; }

private:
    std::string text_;
    std::size_t count_ = 0;
};

void write_tbox(TurtleWriter& writer, const OntologyVocabulary& vocab) {
    const std::string action = "ap:" + vocab.cls_action;
    const std::string object = "ap:" + vocab.cls_object;
    const std::string state = "ap:" + vocab.cls_state;
    const std::string location = "ap:" + vocab.cls_location;
    const std::string time = "ap:" + vocab.cls_time;

    writer.blank_line();
    writer.comment("classes");
    for (const std::string& cls : {action, object, state, location, time}) {
        writer.triple(cls, "a", "owl:Class");
    }

    writer.blank_line();
    writer.comment("object properties");
    auto property = [&](const std::string& name, const std::string& domain,
                        const std::string& range) {
        writer.block("ap:" + name, {{"a", "owl:ObjectProperty"},
                                    {"rdfs:domain", domain},
                                    {"rdfs:range", range}});
    };
    property(vocab.prop_has_agent, action, object);
    property(vocab.prop_has_object, action, object);
    property(vocab.prop_has_tool, action, object);
    property(vocab.prop_has_location, action, location);
    property(vocab.prop_has_time, action, time);
    property(vocab.prop_has_state, object, state);
    writer.block("ap:" + vocab.prop_has_state_before,
                 {{"a", "owl:ObjectProperty"},
                  {"rdfs:subPropertyOf", "ap:" + vocab.prop_has_state}});
    writer.block("ap:" + vocab.prop_has_state_after,
                 {{"a", "owl:ObjectProperty"},
                  {"rdfs:subPropertyOf", "ap:" + vocab.prop_has_state}});
    property(vocab.prop_spatially_related, object, object);

    writer.blank_line();
    writer.comment("cardinality restrictions");
    writer.restriction(action, "ap:" + vocab.prop_has_agent,
                       "owl:minQualifiedCardinality", object);
    writer.restriction(action, "ap:" + vocab.prop_has_object,
                       "owl:minQualifiedCardinality", object);
    // has_tool is optional (min 0): a vacuous restriction, so none is emitted.
    writer.restriction(action, "ap:" + vocab.prop_has_location,
                       "owl:qualifiedCardinality", location);
    writer.restriction(action, "ap:" + vocab.prop_has_time,
                       "owl:qualifiedCardinality", time);
    writer.restriction(object, "ap:" + vocab.prop_has_state,
                       "owl:minQualifiedCardinality", state);
}

}  // namespace

void validate_vocabulary(const OntologyVocabulary& vocab) {
    const std::string& iri = vocab.base_iri;
    if (iri.find("://") == std::string::npos) {
        throw OntologyError("base IRI must be absolute: " + iri);
    }
    if (iri.empty() || (iri.back() != '/' && iri.back() != '#')) {
        throw OntologyError("base IRI must end in '/' or '#': " + iri);
    }
}

std::string mint_local_name(const Label& label, const std::string& discriminator) {
    if (label.empty()) throw OntologyError("cannot mint an IRI for an empty label");
    std::string name = label;
    for (char& c : name) {
        if (c == ' ') c = '_';
    }
    name = percent_encode(name);
    if (!discriminator.empty()) name += "_" + percent_encode(discriminator);
    return name;
}

std::string mint_iri(const std::string& base_iri, const Label& label,
                     const std::string& discriminator) {
    return base_iri + mint_local_name(label, discriminator);
}

OntologyDocument emit_tbox(const OntologyVocabulary& vocab) {
    validate_vocabulary(vocab);
    TurtleWriter writer(vocab.base_iri);
    write_tbox(writer, vocab);
    OntologyDocument doc;
    doc.triple_count = writer.count();
    doc.turtle = writer.take();
    return doc;
}

OntologyDocument populate(std::span<const ActionPattern> patterns,
                          const OntologyVocabulary& vocab) {
    validate_vocabulary(vocab);
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        auto violations = validate_pattern(patterns[i]);
        if (!violations.empty()) {
            throw OntologyError("pattern " + std::to_string(i) +
                                " is invalid: " + violations.front());
        }
    }

    TurtleWriter writer(vocab.base_iri);
    write_tbox(writer, vocab);

    // first-use orderings keep re-emission byte-stable
    std::vector<Label> object_labels, state_labels, relation_labels;
    std::unordered_set<std::string> seen_objects, seen_states, seen_relations;
    auto note = [](const Label& label, std::vector<Label>& order,
                   std::unordered_set<std::string>& seen) {
        if (seen.insert(label).second) order.push_back(label);
    };

    for (const ActionPattern& p : patterns) {
        for (const auto& a : p.agents) note(a, object_labels, seen_objects);
        for (const auto& o : p.objects) note(o, object_labels, seen_objects);
        for (const auto& t : p.tools) note(t, object_labels, seen_objects);
        for (const auto& s : p.states_before) note(s, state_labels, seen_states);
        for (const auto& s : p.states_after) note(s, state_labels, seen_states);
        for (const auto& r : p.spatial_relations) {
            note(r.subject, object_labels, seen_objects);
            note(r.relatum, object_labels, seen_objects);
            note(r.relation, relation_labels, seen_relations);
        }
    }

    if (!relation_labels.empty()) {
        writer.blank_line();
        writer.comment("spatial relation properties");
        for (const auto& relation : relation_labels) {
            writer.block("ap:" + mint_local_name(relation),
                         {{"a", "owl:ObjectProperty"},
                          {"rdfs:subPropertyOf",
                           "ap:" + vocab.prop_spatially_related}});
        }
    }

    if (!patterns.empty()) {
        writer.blank_line();
        writer.comment("action patterns");
    }
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        const ActionPattern& p = patterns[i];
        std::string action_name =
            "ap:" + mint_local_name(p.action, "ap" + std::to_string(i));
        std::vector<std::pair<std::string, std::string>> pairs;
        pairs.emplace_back("a", "ap:" + vocab.cls_action);
        for (const auto& a : p.agents)
            pairs.emplace_back("ap:" + vocab.prop_has_agent,
                               "ap:" + mint_local_name(a));
        for (const auto& o : p.objects)
            pairs.emplace_back("ap:" + vocab.prop_has_object,
                               "ap:" + mint_local_name(o));
        for (const auto& t : p.tools)
            pairs.emplace_back("ap:" + vocab.prop_has_tool,
                               "ap:" + mint_local_name(t));
        writer.block(action_name, pairs);

        for (const auto& o : p.objects) {
            for (const auto& s : p.states_before) {
                writer.triple("ap:" + mint_local_name(o),
                              "ap:" + vocab.prop_has_state_before,
                              "ap:" + mint_local_name(s));
            }
            for (const auto& s : p.states_after) {
                writer.triple("ap:" + mint_local_name(o),
                              "ap:" + vocab.prop_has_state_after,
                              "ap:" + mint_local_name(s));
            }
        }
        for (const auto& r : p.spatial_relations) {
            writer.triple("ap:" + mint_local_name(r.subject),
                          "ap:" + mint_local_name(r.relation),
                          "ap:" + mint_local_name(r.relatum));
        }
    }

    if (!object_labels.empty() || !state_labels.empty()) {
        writer.blank_line();
        writer.comment("individuals");
    }
    for (const auto& label : object_labels) {
        writer.triple("ap:" + mint_local_name(label), "a", "ap:" + vocab.cls_object);
    }
    for (const auto& label : state_labels) {
        writer.triple("ap:" + mint_local_name(label), "a", "ap:" + vocab.cls_state);
    }

    OntologyDocument doc;
    doc.triple_count = writer.count();
    doc.individuals_per_class[vocab.cls_action] = patterns.size();
    doc.individuals_per_class[vocab.cls_object] = object_labels.size();
    doc.individuals_per_class[vocab.cls_state] = state_labels.size();
    doc.turtle = writer.take();
    return doc;
}

}  // namespace apx
