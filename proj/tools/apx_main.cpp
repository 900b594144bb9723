// apx: command-line pipeline for extracting robot common-sense action
// patterns from LLM backends, scoring them against a ground truth, and
// populating an OWL ontology.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "apx/backend.hpp"
#include "apx/evaluation.hpp"
#include "apx/ground_truth.hpp"
#include "apx/ontology.hpp"
#include "apx/parsing.hpp"
#include "apx/pattern_io.hpp"
#include "apx/prompting.hpp"
#include "apx/run_config.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBackend = 3;
constexpr int kExitParse = 4;

struct GlobalOptions {
    std::string config_path = "apx.json";
    bool record = false;
    std::string record_dir;
};

std::shared_ptr<apx::Backend> open_backend(const apx::RunConfig& config,
                                           const std::string& name,
                                           const GlobalOptions& global,
                                           bool warn_temperature = false) {
    const apx::BackendConfig& cfg = config.backend(name);
    if (warn_temperature && cfg.temperature > 0) {
        std::cerr << "warning: backend '" << name << "' has temperature "
                  << cfg.temperature
                  << "; evaluation results will not be reproducible\n";
    }
    auto backend = apx::make_backend(cfg);
    if (global.record) {
        std::filesystem::path dir = global.record_dir.empty()
                                        ? cfg.fixture_dir
                                        : std::filesystem::path(global.record_dir);
        if (dir.empty()) {
            throw apx::ConfigError(
                "--record requires --record-dir or a backend fixture_dir");
        }
        backend = apx::make_recording_backend(backend, dir);
    }
    return backend;
}

std::vector<apx::Label> resolve_candidates(const std::string& inline_list,
                                           const std::string& file) {
    std::vector<std::string> raw;
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) throw apx::ConfigError("cannot open candidates file: " + file);
        std::string line;
        while (std::getline(in, line)) {
            std::stringstream ss(line);
            std::string item;
            while (std::getline(ss, item, ',')) raw.push_back(item);
        }
    } else if (!inline_list.empty()) {
        std::stringstream ss(inline_list);
        std::string item;
        while (std::getline(ss, item, ',')) raw.push_back(item);
    }
    return apx::normalize_unique(raw);
}

std::string csv_quote(const std::string& text) {
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv_flag(const std::string& value) {
    std::vector<std::string> parts;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

int cmd_extract_slot(const GlobalOptions& global, const std::string& kind_name,
                     const std::string& action, const std::string& object,
                     const std::string& candidates_inline,
                     const std::string& candidates_file, const std::string& tool,
                     const std::string& backend_name, const std::string& out_path,
                     bool allow_ungrounded) {
    apx::RunConfig config = apx::load_run_config(global.config_path);
    apx::ExtractionKind kind = apx::extraction_kind_from_string(kind_name);
    std::vector<apx::Label> candidates =
        resolve_candidates(candidates_inline, candidates_file);

    std::optional<apx::Label> tool_label;
    if (!tool.empty()) tool_label = apx::normalize_label(tool);

    apx::RenderedPrompt prompt = apx::render_slot_prompt(
        kind, apx::normalize_label(action), apx::normalize_label(object),
        candidates, tool_label, allow_ungrounded);

    auto backend = open_backend(config, backend_name, global);
    apx::CompletionRequest request{prompt.text, backend->config().model,
                                   backend->config().temperature, "cli-slot"};
    apx::CompletionResult result = backend->complete(request);

    std::optional<std::unordered_set<apx::Label>> candidate_set;
    if (!candidates.empty()) {
        candidate_set.emplace(candidates.begin(), candidates.end());
    }
    apx::RankedLabels ranked = apx::parse_ranked_list(result.raw, candidate_set);

    std::string listing;
    for (const auto& label : ranked.labels) listing += label + "\n";
    std::cout << listing;
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw apx::ConfigError("cannot write output file: " + out_path);
        out << listing;
    }
    return kExitOk;
}

int cmd_extract_patterns(const GlobalOptions& global, const std::string& domain,
                         long count, const std::string& backend_name,
                         const std::string& out_path,
                         const std::string& review_path) {
    apx::RunConfig config = apx::load_run_config(global.config_path);
    apx::RenderedPrompt prompt = apx::render_bulk_prompt(count, domain);

    auto backend = open_backend(config, backend_name, global);
    apx::CompletionRequest request{prompt.text, backend->config().model,
                                   backend->config().temperature, "cli-bulk"};
    apx::CompletionResult result = backend->complete(request);

    apx::TupleParseReport report = apx::parse_pattern_tuples(result.raw);
    apx::write_patterns(report.patterns, out_path);

    if (!review_path.empty()) {
        std::ofstream review(review_path, std::ios::binary);
        if (!review) {
            throw apx::ConfigError("cannot write review sheet: " + review_path);
        }
        review << "index,tuple,valid_format,human_judgment\n";
        std::size_t index = 0;
        for (const auto& p : report.patterns) {
            std::string tuple = "(" + p.action + ", " + p.agents.front() + ", " +
                                p.objects.front() + ", " +
                                (p.tools.empty() ? "none" : p.tools.front()) + ")";
            review << index++ << ',' << csv_quote(tuple) << ",yes,\n";
        }
        for (const auto& line : report.malformed) {
            review << index++ << ',' << csv_quote(line.text) << ",no,\n";
        }
    }
    std::cout << "parsed " << report.patterns.size() << " patterns, "
              << report.malformed.size() << " malformed lines\n";
    return kExitOk;
}

int cmd_evaluate(const GlobalOptions& global, const std::string& ground_truth_path,
                 const std::string& kinds_flag, const std::string& backends_flag,
                 int n_max_flag, const std::string& out_dir,
                 const std::string& truncation_flag, bool strict_flag) {
    apx::RunConfig config = apx::load_run_config(global.config_path);

    bool strict = strict_flag || config.strict_ground_truth;
    std::vector<std::string> warnings;
    std::vector<apx::GroundTruthEntry> entries =
        apx::load_ground_truth(ground_truth_path, strict, &warnings);
    for (const auto& warning : warnings) {
        std::cerr << "warning: " << warning << "\n";
    }

    apx::EvaluationOptions options;
    options.n_max = n_max_flag > 0 ? n_max_flag : config.n_max;
    options.truncation = truncation_flag.empty()
                             ? config.truncation
                             : apx::truncation_from_string(truncation_flag);
    options.seed = config.seed;
    options.max_concurrency = config.max_concurrency;
    if (!config.distractor_pool_file.empty()) {
        options.distractors = apx::load_distractor_pool(config.distractor_pool_file);
    }

    std::vector<std::string> kind_names = split_csv_flag(
        kinds_flag.empty() ? "tool,state-before,state-after,spatial" : kinds_flag);
    std::vector<std::string> backend_names;
    if (backends_flag.empty()) {
        for (const auto& [name, _] : config.backends) backend_names.push_back(name);
    } else {
        backend_names = split_csv_flag(backends_flag);
    }

    std::filesystem::create_directories(out_dir);
    for (const auto& backend_name : backend_names) {
        auto backend = open_backend(config, backend_name, global, true);
        for (const auto& kind_name : kind_names) {
            apx::ExtractionKind kind = apx::extraction_kind_from_string(kind_name);
            apx::MetricsReport report = apx::evaluate_dataset(
                entries, kind, *backend, backend_name, options);

            std::filesystem::path base = std::filesystem::path(out_dir) /
                                         (backend_name + "_" + kind_name);
            apx::write_report(report, base.string() + ".csv");
            apx::write_f1_summary(report, base.string() + "_f1.csv");

            std::cout << backend_name << " " << kind_name << " mean F1:";
            for (const auto& m : report.aggregate) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), " @%d=%.4f", m.n, m.f1);
                std::cout << buf;
            }
            std::cout << "\n";
        }
    }
    return kExitOk;
}

int cmd_populate(const GlobalOptions& global, const std::string& patterns_path,
                 const std::string& base_iri_flag, const std::string& out_path) {
    apx::RunConfig config = apx::load_run_config(global.config_path);
    std::vector<apx::ActionPattern> patterns = apx::load_patterns(patterns_path);

    std::string invalid;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        if (!apx::validate_pattern(patterns[i]).empty()) {
            invalid += (invalid.empty() ? "" : ", ") + std::to_string(i);
        }
    }
    if (!invalid.empty()) {
        throw apx::ConfigError("invalid patterns at indices: " + invalid);
    }

    apx::OntologyVocabulary vocab;
    vocab.base_iri = base_iri_flag.empty() ? config.base_iri : base_iri_flag;
    apx::OntologyDocument doc = apx::populate(patterns, vocab);

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw apx::ConfigError("cannot write ontology file: " + out_path);
    out << doc.turtle;

    std::cout << doc.triple_count << " triples, "
              << doc.individuals_per_class.at(vocab.cls_action) << " actions, "
              << doc.individuals_per_class.at(vocab.cls_object) << " objects, "
              << doc.individuals_per_class.at(vocab.cls_state) << " states\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Action-pattern extraction, evaluation and ontology population"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--config", global.config_path, "Run configuration file")
        ->capture_default_str();
    app.add_flag("--record", global.record,
                 "Record live responses as replayable fixtures");
    app.add_option("--record-dir", global.record_dir,
                   "Directory for recorded fixtures");

    auto* extract = app.add_subcommand("extract", "Query a backend");
    extract->require_subcommand(1);

    std::string kind, action, object, candidates_inline, candidates_file, tool;
    std::string backend_name, out_path;
    bool allow_ungrounded = false;
    auto* slot = extract->add_subcommand("slot", "Fill one action-pattern slot");
    slot->add_option("--kind", kind, "tool | state-before | state-after | spatial")
        ->required();
    slot->add_option("--action", action)->required();
    slot->add_option("--object", object)->required();
    slot->add_option("--candidates", candidates_inline, "Comma-separated candidates");
    slot->add_option("--candidates-file", candidates_file,
                     "File with one candidate per line");
    slot->add_option("--tool", tool, "Tool label (spatial kind only)");
    slot->add_option("--backend", backend_name)->required();
    slot->add_option("--out", out_path, "Also write labels to this file");
    slot->add_flag("--allow-ungrounded", allow_ungrounded,
                   "Permit an empty candidate list");

    std::string domain, patterns_out, review_out;
    long count = 0;
    auto* bulk = extract->add_subcommand("patterns", "Bulk-extract action patterns");
    bulk->add_option("--domain", domain, "Domain of interest")->required();
    bulk->add_option("--count", count, "Number of patterns to request")->required();
    bulk->add_option("--backend", backend_name)->required();
    bulk->add_option("--out", patterns_out, "Pattern file (JSON)")->required();
    bulk->add_option("--review-sheet", review_out, "Manual-review CSV");

    std::string ground_truth, kinds_flag, backends_flag, out_dir, truncation_flag;
    int n_max = 0;
    bool strict = false;
    auto* evaluate = app.add_subcommand("evaluate",
                                        "Score backends against the ground truth");
    evaluate->add_option("--ground-truth", ground_truth)->required();
    evaluate->add_option("--kinds", kinds_flag,
                         "Comma-separated kinds (default: all four)");
    evaluate->add_option("--backends", backends_flag,
                         "Comma-separated backend names (default: all configured)");
    evaluate->add_option("--n-max", n_max, "Largest n for F1@n");
    evaluate->add_option("--out-dir", out_dir, "Report directory")->required();
    evaluate->add_option("--truncation", truncation_flag,
                         "symmetric | prediction-only");
    evaluate->add_flag("--strict", strict, "Reject unknown ground-truth keys");

    std::string patterns_in, base_iri, turtle_out;
    auto* populate = app.add_subcommand("populate",
                                        "Emit a Turtle ontology from patterns");
    populate->add_option("--patterns", patterns_in)->required();
    populate->add_option("--base-iri", base_iri);
    populate->add_option("--out", turtle_out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (slot->parsed()) {
            return cmd_extract_slot(global, kind, action, object, candidates_inline,
                                    candidates_file, tool, backend_name, out_path,
                                    allow_ungrounded);
        }
        if (bulk->parsed()) {
            return cmd_extract_patterns(global, domain, count, backend_name,
                                        patterns_out, review_out);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(global, ground_truth, kinds_flag, backends_flag,
                                n_max, out_dir, truncation_flag, strict);
        }
        if (populate->parsed()) {
            return cmd_populate(global, patterns_in, base_iri, turtle_out);
        }
    } catch (const apx::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const apx::GroundTruthError& e) {
        std::cerr << "ground-truth error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const apx::PromptError& e) {
        std::cerr << "prompt error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const apx::OntologyError& e) {
        std::cerr << "ontology error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const apx::EvaluationError& e) {
        std::cerr << "evaluation error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const apx::BackendError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return e.code() == apx::BackendError::Code::Config ? kExitConfig
                                                           : kExitBackend;
    } catch (const apx::EmptyParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
