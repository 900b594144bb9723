#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "apx/action_pattern.hpp"
#include "apx/backend.hpp"
#include "apx/ground_truth.hpp"

namespace apx {

/// Whether top-n truncation applies to both lists or only the prediction.
enum class Truncation { Symmetric, PredictionOnly };

Truncation truncation_from_string(std::string_view name);
const char* to_string(Truncation mode);

struct AtNMetrics {
    int n = 1;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

class EvaluationError : public std::runtime_error {
public:
    explicit EvaluationError(std::string message)
        : std::runtime_error(std::move(message)) {}
};

/// Precision/recall/F1 over the top-n elements of both ranked lists
/// (Symmetric) or with only the prediction truncated (PredictionOnly).
/// Duplicates past the first occurrence are ignored. Throws on n < 1.
AtNMetrics metrics_at_n(std::span<const Label> predicted,
                        std::span<const Label> truth, int n,
                        Truncation mode = Truncation::Symmetric);

struct EntryRow {
    std::size_t entry_index = 0;
    std::vector<AtNMetrics> metrics;  // n = 1..n_max
    std::string incident;             // empty when the entry evaluated cleanly
};

struct MetricsReport {
    std::string backend_id;
    ExtractionKind kind = ExtractionKind::Tool;
    int n_max = 1;
    std::vector<EntryRow> rows;          // one per entry, in entry order
    std::vector<AtNMetrics> aggregate;   // arithmetic mean per n
};

/// Distractor labels per extraction kind, mixed into prompt candidates.
using DistractorPool = std::map<ExtractionKind, std::vector<Label>>;

DistractorPool load_distractor_pool(const std::filesystem::path& path);

struct EvaluationOptions {
    int n_max = 5;
    Truncation truncation = Truncation::Symmetric;
    DistractorPool distractors;
    unsigned seed = 42;        // candidate shuffle seed
    int max_concurrency = 1;
    bool allow_ungrounded = false;
};

/// Ranked truth labels for one entry and kind; spatial strings are reduced
/// to relation labels where they match "<object> <relation> <tool>".
std::vector<Label> truth_labels(const GroundTruthEntry& entry, ExtractionKind kind);

/// Deterministic candidate list: truth labels plus kind distractors,
/// shuffled with a seed derived from (seed, entry index, kind).
std::vector<Label> build_candidates(const GroundTruthEntry& entry,
                                    std::size_t entry_index, ExtractionKind kind,
                                    const EvaluationOptions& options);

/// Prompts, completes and scores one entry. Model failures and EmptyParse
/// never throw; they yield zero metrics plus an incident tag.
EntryRow evaluate_entry(const GroundTruthEntry& entry, std::size_t entry_index,
                        ExtractionKind kind, Backend& backend,
                        const EvaluationOptions& options);

/// Evaluates every entry for one kind against one backend.
MetricsReport evaluate_dataset(const std::vector<GroundTruthEntry>& entries,
                               ExtractionKind kind, Backend& backend,
                               const std::string& backend_id,
                               const EvaluationOptions& options);

/// Writes the report CSV: header
/// `backend,kind,entry,n,precision,recall,f1,incident`, entry rows in order,
/// aggregate rows with entry = "MEAN", reals with 6 decimals.
void write_report(const MetricsReport& report, const std::filesystem::path& path);

/// Plot-friendly companion: two columns (n, mean-f1).
void write_f1_summary(const MetricsReport& report,
                      const std::filesystem::path& path);

std::string report_to_csv(const MetricsReport& report);

}  // namespace apx
