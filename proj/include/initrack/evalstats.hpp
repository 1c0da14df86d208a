#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "initrack/corpus.hpp"
#include "initrack/cues.hpp"
#include "initrack/tracker.hpp"

namespace initrack {

// --- tracking runs ------------------------------------------------------

struct RunResult {
    std::vector<TurnRecord> records;
    double task_accuracy = 0.0;
    double dialogue_accuracy = 0.0;
    std::vector<std::uint8_t> task_correct;
    std::vector<std::uint8_t> dialogue_correct;

    const std::vector<std::uint8_t>& correctness(Dimension dim) const noexcept {
        return dim == Dimension::Task ? task_correct : dialogue_correct;
    }
    std::size_t correct(Dimension dim) const noexcept;
    std::size_t total() const noexcept { return records.size(); }
};

/// Derives the correctness vectors and accuracies from the records.
RunResult make_run_result(std::vector<TurnRecord> records);

/// Frozen-model tracking; `model` is never modified. Indices are reset from
/// the annotated holders on a misprediction when config.teacher_forcing.
RunResult evaluate(const Corpus& corpus, const CueModel& model, const TrackerConfig& config);

/// Predicts that each initiative stays with its current holder.
RunResult baseline_run(const Corpus& corpus);

struct Fold {
    std::string key;
    std::size_t train_dialogues = 0;
    RunResult result;
};

struct CrossValidation {
    std::vector<Fold> folds;  // ascending pair-key order
    RunResult aggregate;      // fold records concatenated in fold order
};

/// Leave-one-pair-out: train on the other groups, evaluate on the held-out
/// one. Throws DomainError when the corpus has fewer than two pair groups.
CrossValidation cross_validate(const Corpus& corpus, const TrackerConfig& config);

std::string folds_csv(const CrossValidation& cv);

// --- error analysis -----------------------------------------------------

struct ErrorCell {
    std::size_t shift_errors = 0;
    std::size_t shift_total = 0;
    std::size_t no_shift_errors = 0;
    std::size_t no_shift_total = 0;

    friend bool operator==(const ErrorCell&, const ErrorCell&) = default;
};

/// Shift / no-shift errors per (cue, dimension). Task cells of
/// dialogue-only cues stay empty.
struct ErrorReport {
    std::array<std::array<ErrorCell, 2>, kCueCount> cells{};

    const ErrorCell& at(CueKind kind, Dimension dim) const noexcept {
        return cells[index_of(kind)][dim == Dimension::Task ? 0 : 1];
    }
    ErrorCell& at(CueKind kind, Dimension dim) noexcept {
        return cells[index_of(kind)][dim == Dimension::Task ? 0 : 1];
    }
};

/// Records are matched to the corpus by (dialogue id, turn index), so runs
/// in any record order work. Throws DomainError when the run does not cover
/// exactly the corpus's prediction points.
ErrorReport error_report(const RunResult& run, const Corpus& corpus);

std::string error_report_csv(const ErrorReport& report);

// --- cross-corpus comparison ---------------------------------------------

struct ExpertCounts {
    std::optional<std::size_t> task;  // nullopt: not applicable
    std::optional<std::size_t> dialogue;
    std::size_t total = 0;
};

/// Expert holder counts over the scored turns (turns 2..N), the same turns
/// the accuracies are measured on.
ExpertCounts expert_counts(const Corpus& corpus, std::string_view expert);

struct ComparisonRow {
    std::string corpus;
    RunResult baseline;
    RunResult trained;
    ExpertCounts expert;
    bool task_applicable = true;
};

/// Percentages rounded to one decimal; improvement is the difference of the
/// rounded percentages.
std::string comparison_text(std::span<const ComparisonRow> rows);

/// Six-decimal percentages; rows only for applicable dimensions.
std::string comparison_csv(std::span<const ComparisonRow> rows);

/// Percentage rounded half away from zero to one decimal.
double round_pct(double pct) noexcept;

// --- agreement and significance -----------------------------------------

/// N items rated by m raters into one of c categories (indices).
class RatingMatrix {
public:
    /// Throws DomainError unless N >= 1, m >= 2, c >= 2, rows have equal
    /// length and every rating is < c.
    RatingMatrix(std::vector<std::vector<std::size_t>> ratings, std::size_t categories);

    /// Categories are the distinct labels in lexicographic order (at least 2).
    static RatingMatrix from_labels(const std::vector<std::vector<std::string>>& labels);

    std::size_t items() const noexcept { return ratings_.size(); }
    std::size_t raters() const noexcept { return ratings_.front().size(); }
    std::size_t categories() const noexcept { return categories_; }
    std::size_t at(std::size_t item, std::size_t rater) const { return ratings_[item][rater]; }

private:
    std::vector<std::vector<std::size_t>> ratings_;
    std::size_t categories_;
};

/// Ratings whose items are the turns of several annotations of the same
/// dialogues (one corpus per coder) and whose labels are the holders in
/// `dim`. Throws DomainError when the corpora are not turn-aligned.
RatingMatrix ratings_from_corpora(std::span<const Corpus> coders, Dimension dim);

/// Multi-rater kappa. Throws DegenerateStatisticError when P(E) = 1.
double kappa(const RatingMatrix& ratings);

/// n subjects x k treatments of binary outcomes.
class OutcomeMatrix {
public:
    /// Throws DomainError unless n >= 1, k >= 2, rows equal length, entries 0/1.
    explicit OutcomeMatrix(std::vector<std::vector<std::uint8_t>> outcomes);

    std::size_t subjects() const noexcept { return rows_.size(); }
    std::size_t treatments() const noexcept { return rows_.front().size(); }
    std::uint8_t at(std::size_t subject, std::size_t treatment) const {
        return rows_[subject][treatment];
    }

private:
    std::vector<std::vector<std::uint8_t>> rows_;
};

/// Subjects are prediction points; treatments are the runs' correctness in
/// `dim`, in argument order. Throws DomainError for misaligned runs.
OutcomeMatrix paired_outcomes(std::span<const RunResult* const> runs, Dimension dim);

struct CochranResult {
    double q = 0.0;
    int df = 0;
    double p = 1.0;
};

/// Cochran's Q with a chi-square(k-1) p-value. Throws
/// DegenerateStatisticError when every subject row is constant.
CochranResult cochran_q(const OutcomeMatrix& outcomes);

}  // namespace initrack
