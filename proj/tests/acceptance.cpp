// Acceptance suite: one pass/fail line per criterion. Always-on checks,
// exits non-zero on the first failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "apx/action_pattern.hpp"
#include "apx/backend.hpp"
#include "apx/evaluation.hpp"
#include "apx/ground_truth.hpp"
#include "apx/ontology.hpp"
#include "apx/parsing.hpp"
#include "apx/prompting.hpp"
#include "test_support.hpp"
#include "turtle_reader.hpp"

namespace fs = std::filesystem;
using namespace apx;
using namespace apx::testsupport;

namespace {

#define REQUIRE(cond, msg)                                                      \
    do {                                                                        \
        if (!(cond)) {                                                          \
            std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << msg \
                      << "\n";                                                  \
            std::exit(1);                                                       \
        }                                                                       \
    } while (0)

const fs::path kSourceDir = fs::path(APX_SOURCE_DIR);
const fs::path kDataDir = kSourceDir / "data";

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(static_cast<bool>(in), "cannot open " << path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Brute-force reference: score the truncated prefixes as plain sets.
AtNMetrics oracle_at_n(const std::vector<Label>& predicted,
                       const std::vector<Label>& truth, int n,
                       Truncation truncation) {
    auto prefix = [](const std::vector<Label>& labels, std::size_t k) {
        std::set<Label> out;
        for (std::size_t i = 0; i < labels.size() && out.size() < k; ++i) {
            out.insert(labels[i]);
        }
        return out;
    };
    std::set<Label> p = prefix(predicted, static_cast<std::size_t>(n));
    std::set<Label> t = truncation == Truncation::Symmetric
                            ? prefix(truth, static_cast<std::size_t>(n))
                            : std::set<Label>(truth.begin(), truth.end());
    std::size_t tp = 0;
    for (const auto& label : p) tp += t.count(label);
    AtNMetrics m;
    m.n = n;
    m.precision = p.empty() ? 0.0 : static_cast<double>(tp) / p.size();
    m.recall = t.empty() ? 0.0 : static_cast<double>(tp) / t.size();
    m.f1 = (m.precision + m.recall) == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

void criterion_1_metric_oracle() {
    auto start = std::chrono::steady_clock::now();
    std::vector<Label> vocab = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
    std::mt19937_64 rng(20230907);
    std::uniform_int_distribution<std::size_t> len(0, 6);
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
    std::uniform_int_distribution<int> n_dist(1, 6);

    auto random_list = [&] {
        std::set<Label> seen;
        std::vector<Label> out;
        std::size_t target = len(rng);
        while (out.size() < target) {
            Label label = vocab[pick(rng)];
            if (seen.insert(label).second) out.push_back(label);
        }
        return out;
    };

    for (int i = 0; i < 1500; ++i) {
        std::vector<Label> predicted = random_list();
        std::vector<Label> truth = random_list();
        int n = n_dist(rng);
        for (Truncation mode : {Truncation::Symmetric, Truncation::PredictionOnly}) {
            AtNMetrics got = metrics_at_n(predicted, truth, n, mode);
            AtNMetrics want = oracle_at_n(predicted, truth, n, mode);
            REQUIRE(got.precision == want.precision && got.recall == want.recall &&
                        got.f1 == want.f1,
                    "metric mismatch at case " << i << " n=" << n);
        }
    }
    double seconds = elapsed_seconds(start);
    REQUIRE(seconds < 5.0, "oracle sweep took " << seconds << "s");
    std::cout << "[PASS] criterion 1: metrics_at_n matches brute-force oracle on "
                 "1500 cases x 2 truncation modes ("
              << seconds << "s)\n";
}

void criterion_2_ground_truth() {
    auto entries = load_ground_truth(kDataDir / "ground_truth.json");
    REQUIRE(entries.size() == 97, "expected 97 entries, got " << entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        REQUIRE(!e.action.empty() && !e.object.empty() && !e.tools.empty() &&
                    !e.object_states_before.empty() &&
                    !e.object_states_after.empty() && !e.spatial_relations.empty(),
                "entry " << i << " violates non-empty invariants");
        for (const auto& label : e.tools) {
            REQUIRE(is_normalized(label), "entry " << i << " tool not normalized");
        }
    }

    bool caught = false;
    try {
        load_ground_truth(kDataDir / "corrupt" / "ground_truth_missing_tools.json");
    } catch (const GroundTruthError& e) {
        caught = true;
        REQUIRE(e.code() == GroundTruthError::Code::MissingKey,
                "wrong error code for corrupted file");
        REQUIRE(e.entry_index() == 12, "wrong entry index: " << e.entry_index());
        REQUIRE(e.key() == "tools", "wrong key: " << e.key());
    }
    REQUIRE(caught, "corrupted ground truth loaded without error");
    std::cout << "[PASS] criterion 2: 97-entry dataset loads; corrupted copy "
                 "rejected with entry 12 / key 'tools'\n";
}

void criterion_3_bulk_validity() {
    auto start = std::chrono::steady_clock::now();
    BackendConfig cfg;
    cfg.kind = BackendKind::Replay;
    cfg.model = "demo";
    cfg.fixture_dir = kDataDir / "fixtures" / "demo";
    auto backend = make_backend(cfg);

    RenderedPrompt prompt = render_bulk_prompt(100, "kitchen");
    CompletionResult result =
        backend->complete({prompt.text, cfg.model, cfg.temperature, "acceptance"});

    TupleParseReport report = parse_pattern_tuples(result.raw);
    REQUIRE(report.malformed.empty(),
            report.malformed.size() << " malformed lines");
    REQUIRE(report.patterns.size() == 100,
            "expected 100 patterns, got " << report.patterns.size());
    for (std::size_t i = 0; i < report.patterns.size(); ++i) {
        auto violations = validate_pattern(report.patterns[i]);
        REQUIRE(violations.empty(), "pattern " << i << ": " << violations.front());
    }
    double seconds = elapsed_seconds(start);
    REQUIRE(seconds < 1.0, "bulk replay took " << seconds << "s");
    std::cout << "[PASS] criterion 3: replayed 100-tuple fixture parses to 100 "
                 "valid patterns, 0 malformed ("
              << seconds << "s)\n";
}

void criterion_4_prompt_fidelity() {
    RenderedPrompt slot = render_slot_prompt(ExtractionKind::Tool, "bake", "bread",
                                             {"bowl", "oven", "knife"});
    REQUIRE(slot.text.find("Which tool can I use to bake bread?") !=
                std::string::npos,
            "slot question sentence missing");
    REQUIRE(slot.text.find("Choose only from the following candidates:") !=
                std::string::npos,
            "candidate clause missing");

    RenderedPrompt bulk = render_bulk_prompt(100, "kitchen");
    REQUIRE(bulk.text.find("Generate 100 action patterns for the domain of "
                           "interest 'kitchen'.") != std::string::npos,
            "bulk instruction sentence missing");
    std::cout << "[PASS] criterion 4: rendered prompts contain the frozen "
                 "sentences byte for byte\n";
}

constexpr const char* kRdfType =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

Label decode_local(const std::string& iri, const std::string& base) {
    std::string local = iri.substr(base.size());
    Label label;
    for (std::size_t i = 0; i < local.size(); ++i) {
        if (local[i] == '_') {
            label.push_back(' ');
        } else if (local[i] == '%') {
            label.push_back(static_cast<char>(
                std::stoi(local.substr(i + 1, 2), nullptr, 16)));
            i += 2;
        } else {
            label.push_back(local[i]);
        }
    }
    return label;
}

void criterion_5_ontology_round_trip() {
    std::string raw = read_file(kDataDir / "fixtures" / "bulk_kitchen_100.txt");
    TupleParseReport report = parse_pattern_tuples(raw);
    REQUIRE(report.patterns.size() >= 10, "fixture yields too few patterns");
    std::vector<ActionPattern> patterns(report.patterns.begin(),
                                        report.patterns.begin() + 10);

    OntologyVocabulary vocab;
    OntologyDocument doc = populate(patterns, vocab);
    turtle::Graph graph = turtle::parse(doc.turtle);
    const std::string base = vocab.base_iri;

    // reconstruct, ordered by the _ap<i> discriminator
    std::vector<ActionPattern> rebuilt(patterns.size());
    std::vector<bool> seen(patterns.size(), false);
    for (const auto& typing : graph.with_predicate(kRdfType)) {
        if (typing.object != base + "Action") continue;
        std::string local = typing.subject.substr(base.size());
        std::size_t marker = local.rfind("_ap");
        REQUIRE(marker != std::string::npos, "action IRI lacks discriminator");
        std::size_t index = std::stoul(local.substr(marker + 3));
        REQUIRE(index < rebuilt.size() && !seen[index],
                "bad action discriminator " << local);
        seen[index] = true;
        ActionPattern& p = rebuilt[index];
        p.action = decode_local(base + local.substr(0, marker), base);
        for (const auto& t : graph.triples) {
            if (t.subject != typing.subject) continue;
            if (t.predicate == base + "has_agent")
                p.agents.push_back(decode_local(t.object, base));
            if (t.predicate == base + "has_object")
                p.objects.push_back(decode_local(t.object, base));
            if (t.predicate == base + "has_tool")
                p.tools.push_back(decode_local(t.object, base));
        }
    }
    auto label_set = [](std::vector<Label> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        REQUIRE(seen[i], "pattern " << i << " missing from the graph");
        REQUIRE(rebuilt[i].action == patterns[i].action,
                "action mismatch at " << i);
        REQUIRE(label_set(rebuilt[i].agents) == label_set(patterns[i].agents),
                "agent set mismatch at " << i);
        REQUIRE(label_set(rebuilt[i].objects) == label_set(patterns[i].objects),
                "object set mismatch at " << i);
        REQUIRE(label_set(rebuilt[i].tools) == label_set(patterns[i].tools),
                "tool set mismatch at " << i);
    }

    // TBox axioms: cardinality restrictions per class, none on has_tool
    std::string golden = read_file(kSourceDir / "tests" / "golden" / "tbox.ttl");
    REQUIRE(emit_tbox().turtle == golden, "TBox differs from golden file");
    turtle::Graph tbox = turtle::parse(golden);
    const std::string sub_class = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
    const std::string on_property = "http://www.w3.org/2002/07/owl#onProperty";
    const std::string min_card =
        "http://www.w3.org/2002/07/owl#minQualifiedCardinality";
    const std::string exact_card =
        "http://www.w3.org/2002/07/owl#qualifiedCardinality";

    auto restriction_kind = [&](const std::string& cls,
                                const std::string& property) -> std::string {
        for (const auto& sub : tbox.with_predicate(sub_class)) {
            if (sub.subject != base + cls) continue;
            if (!tbox.contains(sub.object, on_property, base + property)) continue;
            for (const auto& t : tbox.triples) {
                if (t.subject == sub.object &&
                    (t.predicate == min_card || t.predicate == exact_card)) {
                    return t.predicate;
                }
            }
        }
        return "";
    };
    REQUIRE(restriction_kind("Action", "has_agent") == min_card,
            "missing min-1 has_agent");
    REQUIRE(restriction_kind("Action", "has_object") == min_card,
            "missing min-1 has_object");
    REQUIRE(restriction_kind("Action", "has_location") == exact_card,
            "missing exactly-1 has_location");
    REQUIRE(restriction_kind("Action", "has_time") == exact_card,
            "missing exactly-1 has_time");
    REQUIRE(restriction_kind("Object", "has_state") == min_card,
            "missing min-1 has_state");
    REQUIRE(restriction_kind("Action", "has_tool").empty(),
            "unexpected restriction on has_tool");
    std::cout << "[PASS] criterion 5: 10 patterns survive a Turtle round trip; "
                 "TBox carries the cardinality axioms, none on has_tool\n";
}

int run_cli(const std::string& args) {
    std::string command = std::string(APX_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    return WEXITSTATUS(std::system(command.c_str()));
}

fs::path write_replay_config(const fs::path& dir, const fs::path& fixtures) {
    nlohmann::json doc = {
        {"n_max", 5},
        {"seed", 42},
        {"distractor_pool", (kDataDir / "distractors.json").string()},
        {"backends",
         {{"replay",
           {{"kind", "replay"},
            {"model", "fixture-model"},
            {"fixture_dir", fixtures.string()}}}}}};
    fs::path config = dir / "apx.json";
    std::ofstream out(config);
    out << doc.dump(2);
    return config;
}

void criterion_6_end_to_end_determinism() {
    auto entries = load_ground_truth(kDataDir / "ground_truth.json");

    EvaluationOptions options;
    options.distractors = load_distractor_pool(kDataDir / "distractors.json");
    fs::path work = fresh_dir("apx_acceptance_e2e");
    fs::path fixtures = work / "fixtures";
    fs::create_directories(fixtures);
    seed_slot_fixtures(entries, options, fixtures, "fixture-model", 0.0,
                       FixtureAnswer::Truth);
    fs::path config = write_replay_config(work, fixtures);

    const std::vector<std::string> kinds = {"tool", "state-before", "state-after",
                                            "spatial"};
    for (const fs::path& out_dir : {work / "run1", work / "run2"}) {
        int code = run_cli("--config " + config.string() + " evaluate" +
                           " --ground-truth " +
                           (kDataDir / "ground_truth.json").string() +
                           " --kinds tool,state-before,state-after,spatial" +
                           " --backends replay --n-max 5 --out-dir " +
                           out_dir.string());
        REQUIRE(code == 0, "evaluate exited with " << code);
    }
    for (const auto& kind : kinds) {
        std::string name = "replay_" + kind + ".csv";
        std::string a = read_file(work / "run1" / name);
        std::string b = read_file(work / "run2" / name);
        REQUIRE(a == b, name << " differs between runs");

        std::istringstream lines(a);
        std::string line;
        std::getline(lines, line);  // header
        std::size_t rows = 0;
        while (std::getline(lines, line)) ++rows;
        REQUIRE(rows == 97 * 5 + 5,
                name << " has " << rows << " rows, expected " << 97 * 5 + 5);
    }
    std::cout << "[PASS] criterion 6: evaluate over 97 entries x 4 kinds is "
                 "byte-identical across runs (490 rows per CSV)\n";
}

void criterion_7_perfect_and_useless_backends() {
    auto entries = load_ground_truth(kDataDir / "ground_truth.json");
    EvaluationOptions options;
    options.distractors = load_distractor_pool(kDataDir / "distractors.json");

    const std::vector<ExtractionKind> kinds = {
        ExtractionKind::Tool, ExtractionKind::StateBefore,
        ExtractionKind::StateAfter, ExtractionKind::Spatial};

    fs::path perfect_dir = fresh_dir("apx_acceptance_perfect");
    seed_slot_fixtures(entries, options, perfect_dir, "fixture-model", 0.0,
                       FixtureAnswer::Truth);
    fs::path useless_dir = fresh_dir("apx_acceptance_useless");
    seed_slot_fixtures(entries, options, useless_dir, "fixture-model", 0.0,
                       FixtureAnswer::Distractors);

    BackendConfig cfg;
    cfg.kind = BackendKind::Replay;
    cfg.model = "fixture-model";

    cfg.fixture_dir = perfect_dir;
    auto perfect = make_backend(cfg);
    cfg.fixture_dir = useless_dir;
    auto useless = make_backend(cfg);

    for (ExtractionKind kind : kinds) {
        auto report =
            evaluate_dataset(entries, kind, *perfect, "perfect", options);
        for (const auto& m : report.aggregate) {
            REQUIRE(m.f1 == 1.0, "perfect backend " << to_string(kind) << " F1@"
                                                    << m.n << " = " << m.f1);
        }
        report = evaluate_dataset(entries, kind, *useless, "useless", options);
        for (const auto& row : report.rows) {
            REQUIRE(row.incident.empty(), "useless backend incident '"
                                              << row.incident << "' at entry "
                                              << row.entry_index);
        }
        for (const auto& m : report.aggregate) {
            REQUIRE(m.f1 == 0.0, "useless backend " << to_string(kind) << " F1@"
                                                    << m.n << " = " << m.f1);
        }
    }
    std::cout << "[PASS] criterion 7: perfect backend scores mean F1@n = 1.0 and "
                 "useless backend 0.0, exactly, for all kinds and n\n";
}

}  // namespace

int main() {
    criterion_1_metric_oracle();
    criterion_2_ground_truth();
    criterion_3_bulk_validity();
    criterion_4_prompt_fidelity();
    criterion_5_ontology_round_trip();
    criterion_6_end_to_end_determinism();
    criterion_7_perfect_and_useless_backends();
    std::cout << "all acceptance criteria passed\n";
    return 0;
}
