#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "initrack/corpus.hpp"
#include "initrack/cues.hpp"
#include "initrack/evidence.hpp"

namespace initrack {

enum class AdjustmentMethod {
    ConstantIncrement,
    ConstantIncrementWithCounter,
    VariableIncrementWithCounter,
};

/// CLI spellings: const, const-counter, var-counter.
std::string_view to_string(AdjustmentMethod m) noexcept;
std::optional<AdjustmentMethod> parse_method(std::string_view token) noexcept;

/// What step_predict does when the running index and a cue bpa are in total
/// conflict (both fully committed, to opposite roles).
enum class ConflictPolicy {
    Error,          // propagate TotalConflictError
    PreferEvidence, // the cue bpa replaces the running index
};

/// CLI spellings: error, evidence.
std::string_view to_string(ConflictPolicy p) noexcept;
std::optional<ConflictPolicy> parse_conflict_policy(std::string_view token) noexcept;

struct TrackerConfig {
    double delta = 0.35;
    AdjustmentMethod method = AdjustmentMethod::ConstantIncrementWithCounter;
    double default_task_x = 0.5;
    double default_dialogue_x = 0.5;
    /// Mass given to the annotated holder when an index is reset after a
    /// misprediction.
    double reset_strength = 0.75;
    /// Start each dialogue from the first turn's annotated holders (Bayesian
    /// index of reset_strength) instead of the default indices.
    bool anchor_first_turn = false;
    /// Evaluation only: reset indices from the annotated holders after a
    /// misprediction. Training always resets.
    bool teacher_forcing = true;
    /// Accept delta in [0.5, 1] (otherwise restricted to (0, 0.5)).
    bool allow_large_delta = false;
    ConflictPolicy on_total_conflict = ConflictPolicy::Error;
};

/// Throws DomainError for out-of-range parameters.
void validate(const TrackerConfig& config);

/// Initiative indices in the current turn's speaker/hearer frame.
struct TrackerState {
    MassFunction task;
    MassFunction dialogue;

    friend bool operator==(const TrackerState&, const TrackerState&) = default;
};

struct StepResult {
    MassFunction task;
    MassFunction dialogue;
    Role task_holder;      // predicted holder of the next turn, current frame
    Role dialogue_holder;
};

/// Combines the current indices with the observed cues' bpa's, folding left
/// from the index. Task-dimension evidence comes from Both-effect cues only.
StepResult step_predict(const TrackerState& state, std::span<const CueKind> cues,
                        const CueModel& model, ConflictPolicy policy = ConflictPolicy::Error);

/// Moves mass from the frame to `actual` in every touched cue bpa, per the
/// configured method. Only cues affecting `dim` are touched.
void adjust_bpa(CueModel& model, std::span<const CueKind> cues, Dimension dim, Role actual,
                const TrackerConfig& config);

/// +1 on the counters of the observed cues; no-op for ConstantIncrement.
void credit_counters(CueModel& model, std::span<const CueKind> cues, Dimension dim,
                     AdjustmentMethod method);

/// Bayesian index giving `strength` to `actual`. Throws DomainError unless
/// 0 < strength < 1.
MassFunction reset_current(Role actual, double strength);

/// Re-expresses an index in the next turn's frame (speaker and hearer swap).
MassFunction swap_frame(const MassFunction& m) noexcept;

/// Per-prediction-point trace entry. Turn t's cues predict turn t+1's
/// holders; roles are in turn t's frame.
struct TurnRecord {
    std::string dialogue_id;
    std::size_t turn_index = 0;  // index of the predicting turn within its dialogue
    Role predicted_task_role = Role::Speaker;
    Role predicted_dialogue_role = Role::Speaker;
    std::string predicted_task_agent;
    std::string predicted_dialogue_agent;
    std::string actual_task_agent;
    std::string actual_dialogue_agent;
    std::vector<CueKind> cues;
    bool task_correct = false;
    bool dialogue_correct = false;

    bool correct(Dimension dim) const noexcept {
        return dim == Dimension::Task ? task_correct : dialogue_correct;
    }

    friend bool operator==(const TurnRecord&, const TurnRecord&) = default;
};

/// Fraction of correct predictions; 0 for an empty trace.
double accuracy(std::span<const TurnRecord> records, Dimension dim) noexcept;

struct TrainResult {
    CueModel model;
    std::vector<TurnRecord> trace;
    double task_accuracy = 0.0;
    double dialogue_accuracy = 0.0;
};

/// Runs the tracker over every dialogue in order. With `learn`, the model is
/// adjusted on mispredictions and credited on correct predictions; without it
/// the model is left untouched. Indices reset to the defaults at each
/// dialogue start.
std::vector<TurnRecord> run_tracker(const Corpus& corpus, CueModel& model,
                                    const TrackerConfig& config, bool learn);

/// One training pass starting from `initial` (a fresh model by default).
TrainResult train(const Corpus& corpus, const TrackerConfig& config,
                  const CueModel& initial = CueModel{});

struct SweepRow {
    double delta = 0.0;
    double task_accuracy = 0.0;
    double dialogue_accuracy = 0.0;
};

enum class SweepMode { Train, CrossValidate };

/// 0.025, 0.050, ..., 0.475.
std::vector<double> default_delta_grid();

/// Inclusive arithmetic grid; the end point is kept when within step/1000.
std::vector<double> delta_grid(double from, double to, double step);

/// One independent run per delta, rows in ascending delta order.
std::vector<SweepRow> sweep(const Corpus& corpus, AdjustmentMethod method,
                            std::span<const double> deltas, SweepMode mode = SweepMode::Train,
                            const TrackerConfig& base = TrackerConfig{});

std::string sweep_csv(std::span<const SweepRow> rows);

}  // namespace initrack
