#include "apx/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <random>
#include <thread>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "apx/parsing.hpp"
#include "apx/prompting.hpp"

namespace apx {

namespace {

std::vector<Label> distinct_prefix(std::span<const Label> labels, std::size_t limit) {
    std::vector<Label> out;
    std::unordered_set<std::string> seen;
    for (const auto& label : labels) {
        if (out.size() >= limit) break;
        if (seen.insert(label).second) out.push_back(label);
    }
    return out;
}

std::string format_real(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

const char* incident_name(BackendError::Code code) {
    switch (code) {
        case BackendError::Code::RateLimited: return "RateLimited";
        case BackendError::Code::Timeout: return "Timeout";
        case BackendError::Code::FixtureMiss: return "FixtureMiss";
        case BackendError::Code::MalformedResponse: return "MalformedResponse";
        case BackendError::Code::Http: return "HttpError";
        case BackendError::Code::NoMask: return "NoMask";
        case BackendError::Code::MultipleMasks: return "MultipleMasks";
        default: return "BackendError";
    }
}

std::vector<AtNMetrics> zero_metrics(int n_max) {
    std::vector<AtNMetrics> out;
    out.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) out.push_back(AtNMetrics{n, 0.0, 0.0, 0.0});
    return out;
}

}  // namespace

Truncation truncation_from_string(std::string_view name) {
    if (name == "symmetric") return Truncation::Symmetric;
    if (name == "prediction-only") return Truncation::PredictionOnly;
    throw EvaluationError("unknown truncation mode: " + std::string(name));
}

const char* to_string(Truncation mode) {
    return mode == Truncation::Symmetric ? "symmetric" : "prediction-only";
}

AtNMetrics metrics_at_n(std::span<const Label> predicted,
                        std::span<const Label> truth, int n, Truncation mode) {
    if (n < 1) throw EvaluationError("n must be >= 1, got " + std::to_string(n));

    std::vector<Label> top_predicted =
        distinct_prefix(predicted, static_cast<std::size_t>(n));
    std::vector<Label> top_truth = distinct_prefix(
        truth, mode == Truncation::Symmetric ? static_cast<std::size_t>(n)
                                             : truth.size());

    std::unordered_set<std::string> truth_set(top_truth.begin(), top_truth.end());
    std::size_t true_positives = 0;
    for (const auto& label : top_predicted) {
        if (truth_set.count(label)) ++true_positives;
    }

    AtNMetrics metrics;
    metrics.n = n;
    metrics.precision = top_predicted.empty()
                            ? 0.0
                            : static_cast<double>(true_positives) /
                                  static_cast<double>(top_predicted.size());
    metrics.recall = top_truth.empty()
                         ? 0.0
                         : static_cast<double>(true_positives) /
                               static_cast<double>(top_truth.size());
    double sum = metrics.precision + metrics.recall;
    metrics.f1 = sum == 0.0 ? 0.0 : 2.0 * metrics.precision * metrics.recall / sum;
    return metrics;
}

DistractorPool load_distractor_pool(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw EvaluationError("cannot open distractor pool: " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw EvaluationError(std::string("distractor pool parse error: ") + e.what());
    }
    DistractorPool pool;
    for (const auto& [key, value] : doc.items()) {
        ExtractionKind kind = extraction_kind_from_string(key);
        std::vector<Label>& labels = pool[kind];
        for (const auto& item : value) {
            Label label = normalize_label(item.get<std::string>());
            if (!label.empty()) labels.push_back(std::move(label));
        }
    }
    return pool;
}

std::vector<Label> truth_labels(const GroundTruthEntry& entry, ExtractionKind kind) {
    switch (kind) {
        case ExtractionKind::Tool:
            return entry.tools;
        case ExtractionKind::StateBefore:
            return entry.object_states_before;
        case ExtractionKind::StateAfter:
            return entry.object_states_after;
        case ExtractionKind::Spatial: {
            std::vector<Label> out;
            std::unordered_set<std::string> seen;
            for (const auto& raw : entry.spatial_relations) {
                SpatialRelation parsed;
                parsed.freeform = true;
                for (const auto& tool : entry.tools) {
                    SpatialRelation attempt =
                        parse_spatial_ground_truth(raw, entry.object, tool);
                    if (!attempt.freeform) {
                        parsed = attempt;
                        break;
                    }
                }
                // Freeform ground-truth strings compare as whole strings.
                Label label = parsed.freeform ? normalize_label(raw) : parsed.relation;
                if (!label.empty() && seen.insert(label).second)
                    out.push_back(std::move(label));
            }
            return out;
        }
    }
    return {};
}

std::vector<Label> build_candidates(const GroundTruthEntry& entry,
                                    std::size_t entry_index, ExtractionKind kind,
                                    const EvaluationOptions& options) {
    std::vector<Label> candidates = truth_labels(entry, kind);
    std::unordered_set<std::string> seen(candidates.begin(), candidates.end());
    auto it = options.distractors.find(kind);
    if (it != options.distractors.end()) {
        for (const auto& label : it->second) {
            if (seen.insert(label).second) candidates.push_back(label);
        }
    }
    std::uint64_t seed = options.seed;
    seed = seed * 1000003u + entry_index;
    seed = seed * 1000003u + static_cast<std::uint64_t>(kind);
    std::mt19937 rng(static_cast<std::uint32_t>(seed ^ (seed >> 32)));
    std::shuffle(candidates.begin(), candidates.end(), rng);
    return candidates;
}

EntryRow evaluate_entry(const GroundTruthEntry& entry, std::size_t entry_index,
                        ExtractionKind kind, Backend& backend,
                        const EvaluationOptions& options) {
    EntryRow row;
    row.entry_index = entry_index;

    std::vector<Label> truth = truth_labels(entry, kind);
    std::vector<Label> candidates = build_candidates(entry, entry_index, kind, options);

    try {
        std::optional<Label> tool;
        if (kind == ExtractionKind::Spatial) {
            tool = entry.tools.front();  // top-ranked tool grounds the question
        }
        RenderedPrompt prompt =
            render_slot_prompt(kind, entry.action, entry.object, candidates, tool,
                               options.allow_ungrounded);
        CompletionRequest request{prompt.text, backend.config().model,
                                  backend.config().temperature,
                                  "entry-" + std::to_string(entry_index)};
        CompletionResult completion = backend.complete(request);

        std::unordered_set<Label> candidate_set(candidates.begin(), candidates.end());
        RankedLabels predicted = parse_ranked_list(completion.raw, candidate_set);

        for (int n = 1; n <= options.n_max; ++n) {
            row.metrics.push_back(
                metrics_at_n(predicted.labels, truth, n, options.truncation));
        }
        return row;
    } catch (const EmptyParseError&) {
        row.incident = "EmptyParse";
    } catch (const BackendError& e) {
        if (e.code() == BackendError::Code::Config ||
            e.code() == BackendError::Code::Auth) {
            throw;  // configuration problems abort the run
        }
        row.incident = incident_name(e.code());
    }
    row.metrics = zero_metrics(options.n_max);
    return row;
}

MetricsReport evaluate_dataset(const std::vector<GroundTruthEntry>& entries,
                               ExtractionKind kind, Backend& backend,
                               const std::string& backend_id,
                               const EvaluationOptions& options) {
    if (entries.empty()) throw EvaluationError("no ground-truth entries to evaluate");
    if (options.n_max < 1) throw EvaluationError("n_max must be >= 1");

    MetricsReport report;
    report.backend_id = backend_id;
    report.kind = kind;
    report.n_max = options.n_max;
    report.rows.resize(entries.size());

    const int workers = std::max(1, options.max_concurrency);
    if (workers == 1) {
        for (std::size_t i = 0; i < entries.size(); ++i) {
            report.rows[i] = evaluate_entry(entries[i], i, kind, backend, options);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= entries.size()) return;
                try {
                    report.rows[i] =
                        evaluate_entry(entries[i], i, kind, backend, options);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> threads;
        for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    // Unweighted macro-average over entries; rows are already in entry order
    // so concurrency never changes output bytes.
    for (int n = 1; n <= options.n_max; ++n) {
        AtNMetrics mean;
        mean.n = n;
        for (const auto& row : report.rows) {
            const AtNMetrics& m = row.metrics[static_cast<std::size_t>(n - 1)];
            mean.precision += m.precision;
            mean.recall += m.recall;
            mean.f1 += m.f1;
        }
        const double count = static_cast<double>(report.rows.size());
        mean.precision /= count;
        mean.recall /= count;
        mean.f1 /= count;
        report.aggregate.push_back(mean);
    }
    return report;
}

std::string report_to_csv(const MetricsReport& report) {
    std::string csv = "backend,kind,entry,n,precision,recall,f1,incident\n";
    auto emit = [&](const std::string& entry, const AtNMetrics& m,
                    const std::string& incident) {
        csv += report.backend_id;
        csv += ',';
        csv += to_string(report.kind);
        csv += ',';
        csv += entry;
        csv += ',';
        csv += std::to_string(m.n);
        csv += ',';
        csv += format_real(m.precision);
        csv += ',';
        csv += format_real(m.recall);
        csv += ',';
        csv += format_real(m.f1);
        csv += ',';
        csv += incident;
        csv += '\n';
    };
    for (const auto& row : report.rows) {
        for (const auto& m : row.metrics) {
            emit(std::to_string(row.entry_index), m, row.incident);
        }
    }
    for (const auto& m : report.aggregate) emit("MEAN", m, "");
    return csv;
}

void write_report(const MetricsReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw EvaluationError("cannot write report: " + path.string());
    out << report_to_csv(report);
}

void write_f1_summary(const MetricsReport& report,
                      const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw EvaluationError("cannot write summary: " + path.string());
    out << "n,mean_f1\n";
    for (const auto& m : report.aggregate) {
        out << m.n << ',' << format_real(m.f1) << '\n';
    }
}

}  // namespace apx
