#include "initrack/tracker.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "initrack/errors.hpp"
#include "initrack/evalstats.hpp"

namespace initrack {

std::string_view to_string(AdjustmentMethod m) noexcept {
    switch (m) {
        case AdjustmentMethod::ConstantIncrement: return "const";
        case AdjustmentMethod::ConstantIncrementWithCounter: return "const-counter";
        case AdjustmentMethod::VariableIncrementWithCounter: return "var-counter";
    }
    return "?";
}

std::optional<AdjustmentMethod> parse_method(std::string_view token) noexcept {
    for (auto m : {AdjustmentMethod::ConstantIncrement,
                   AdjustmentMethod::ConstantIncrementWithCounter,
                   AdjustmentMethod::VariableIncrementWithCounter}) {
        if (to_string(m) == token) {
            return m;
        }
    }
    return std::nullopt;
}

std::string_view to_string(ConflictPolicy p) noexcept {
    return p == ConflictPolicy::Error ? "error" : "evidence";
}

std::optional<ConflictPolicy> parse_conflict_policy(std::string_view token) noexcept {
    for (auto p : {ConflictPolicy::Error, ConflictPolicy::PreferEvidence}) {
        if (to_string(p) == token) {
            return p;
        }
    }
    return std::nullopt;
}

void validate(const TrackerConfig& config) {
    const double max_delta = config.allow_large_delta ? 1.0 : 0.5;
    const bool delta_ok = config.allow_large_delta
                              ? (config.delta > 0.0 && config.delta <= max_delta)
                              : (config.delta > 0.0 && config.delta < max_delta);
    if (!delta_ok) {
        throw DomainError(fmt::format("delta {} outside {}", config.delta,
                                      config.allow_large_delta ? "(0, 1]" : "(0, 0.5)"));
    }
    for (double x : {config.default_task_x, config.default_dialogue_x}) {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw DomainError(fmt::format("default index {} outside [0,1]", x));
        }
    }
    if (!(config.reset_strength > 0.0 && config.reset_strength < 1.0)) {
        throw DomainError(fmt::format("reset strength {} outside (0,1)", config.reset_strength));
    }
}

namespace {

MassFunction fold(const MassFunction& index, std::span<const MassFunction> evidence,
                  ConflictPolicy policy) {
    MassFunction acc = index;
    for (const auto& m : evidence) {
        try {
            acc = combine(acc, m);
        } catch (const TotalConflictError&) {
            if (policy == ConflictPolicy::Error) {
                throw;
            }
            // Limit of the rule as the index retreats from full commitment.
            acc = m;
        }
    }
    return acc;
}

}  // namespace

StepResult step_predict(const TrackerState& state, std::span<const CueKind> cues,
                        const CueModel& model, ConflictPolicy policy) {
    std::vector<MassFunction> task;
    std::vector<MassFunction> dialogue;
    for (CueKind c : cues) {
        const auto& p = model.params(c);
        if (p.task) {
            task.push_back(p.task->bpa);
        }
        dialogue.push_back(p.dialogue.bpa);
    }
    const MassFunction t = fold(state.task, task, policy);
    const MassFunction d = fold(state.dialogue, dialogue, policy);
    return {t, d, predicted_holder(t), predicted_holder(d)};
}

namespace {

MassFunction increment(const MassFunction& m, Role actual, double amount) {
    const double inc = std::min(amount, m.theta());
    const double theta = inc == m.theta() ? 0.0 : m.theta() - inc;
    if (actual == Role::Speaker) {
        return MassFunction(std::min(m.speaker() + inc, 1.0), m.hearer(), theta);
    }
    return MassFunction(m.speaker(), std::min(m.hearer() + inc, 1.0), theta);
}

}  // namespace

void adjust_bpa(CueModel& model, std::span<const CueKind> cues, Dimension dim, Role actual,
                const TrackerConfig& config) {
    for (CueKind c : cues) {
        if (!affects(c, dim)) {
            continue;
        }
        auto& e = model.entry(c, dim);
        switch (config.method) {
            case AdjustmentMethod::ConstantIncrement:
                e.bpa = increment(e.bpa, actual, config.delta);
                break;
            case AdjustmentMethod::ConstantIncrementWithCounter:
                if (--e.counter < 0) {
                    e.bpa = increment(e.bpa, actual, config.delta);
                    e.counter = 0;
                }
                break;
            case AdjustmentMethod::VariableIncrementWithCounter: {
                --e.counter;
                // Negative credit would make the step exceed delta; clamp.
                const auto exponent = static_cast<int>(std::min<std::int64_t>(
                    std::max<std::int64_t>(e.counter, 0) + 1, 1100));
                e.bpa = increment(e.bpa, actual, std::ldexp(config.delta, -exponent));
                break;
            }
        }
    }
}

void credit_counters(CueModel& model, std::span<const CueKind> cues, Dimension dim,
                     AdjustmentMethod method) {
    if (method == AdjustmentMethod::ConstantIncrement) {
        return;
    }
    for (CueKind c : cues) {
        if (affects(c, dim)) {
            ++model.entry(c, dim).counter;
        }
    }
}

MassFunction reset_current(Role actual, double strength) {
    if (!(strength > 0.0 && strength < 1.0)) {
        throw DomainError(fmt::format("reset strength {} outside (0,1)", strength));
    }
    return bayesian(actual == Role::Speaker ? strength : 1.0 - strength);
}

MassFunction swap_frame(const MassFunction& m) noexcept {
    return MassFunction(m.hearer(), m.speaker(), m.theta());
}

double accuracy(std::span<const TurnRecord> records, Dimension dim) noexcept {
    if (records.empty()) {
        return 0.0;
    }
    const auto hits = std::count_if(records.begin(), records.end(),
                                    [dim](const TurnRecord& r) { return r.correct(dim); });
    return static_cast<double>(hits) / static_cast<double>(records.size());
}

std::vector<TurnRecord> run_tracker(const Corpus& corpus, CueModel& model,
                                    const TrackerConfig& config, bool learn) {
    validate(config);
    const bool reset_on_error = learn || config.teacher_forcing;

    std::vector<TurnRecord> trace;
    trace.reserve(corpus.prediction_points());
    for (const auto& d : corpus.dialogues) {
        if (d.turns.empty()) {
            continue;
        }
        TrackerState state{bayesian(config.default_task_x), bayesian(config.default_dialogue_x)};
        if (config.anchor_first_turn) {
            const auto& first = d.turns.front();
            state.task = reset_current(role_of(d, first, first.ti_holder), config.reset_strength);
            state.dialogue =
                reset_current(role_of(d, first, first.di_holder), config.reset_strength);
        }

        for (std::size_t t = 0; t + 1 < d.turns.size(); ++t) {
            const auto& turn = d.turns[t];
            const auto& next = d.turns[t + 1];
            const StepResult step = step_predict(state, turn.cues, model, config.on_total_conflict);

            TurnRecord rec;
            rec.dialogue_id = d.id;
            rec.turn_index = t;
            rec.predicted_task_role = step.task_holder;
            rec.predicted_dialogue_role = step.dialogue_holder;
            rec.predicted_task_agent = agent_of(d, turn, step.task_holder);
            rec.predicted_dialogue_agent = agent_of(d, turn, step.dialogue_holder);
            rec.actual_task_agent = next.ti_holder;
            rec.actual_dialogue_agent = next.di_holder;
            rec.cues = turn.cues;

            MassFunction task_next = step.task;
            MassFunction dialogue_next = step.dialogue;
            const auto resolve = [&](Dimension dim, Role predicted, MassFunction& index) {
                const Role actual = role_of(d, turn, next.holder(dim));
                const bool hit = predicted == actual;
                if (!hit) {
                    if (learn) {
                        adjust_bpa(model, turn.cues, dim, actual, config);
                    }
                    if (reset_on_error) {
                        index = reset_current(actual, config.reset_strength);
                    }
                } else if (learn) {
                    credit_counters(model, turn.cues, dim, config.method);
                }
                return hit;
            };
            rec.task_correct = resolve(Dimension::Task, step.task_holder, task_next);
            rec.dialogue_correct = resolve(Dimension::Dialogue, step.dialogue_holder, dialogue_next);

            state = TrackerState{swap_frame(task_next), swap_frame(dialogue_next)};
            trace.push_back(std::move(rec));
        }
    }
    return trace;
}

TrainResult train(const Corpus& corpus, const TrackerConfig& config, const CueModel& initial) {
    TrainResult r{initial, {}, 0.0, 0.0};
    r.trace = run_tracker(corpus, r.model, config, /*learn=*/true);
    r.task_accuracy = accuracy(r.trace, Dimension::Task);
    r.dialogue_accuracy = accuracy(r.trace, Dimension::Dialogue);
    return r;
}

std::vector<double> default_delta_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 19; ++i) {
        grid.push_back(0.025 * i);
    }
    return grid;
}

std::vector<double> delta_grid(double from, double to, double step) {
    if (!(step > 0.0) || !(from <= to)) {
        throw DomainError(fmt::format("invalid delta grid {}..{} step {}", from, to, step));
    }
    std::vector<double> grid;
    const auto n = static_cast<long>(std::floor((to - from) / step + 1e-3));
    for (long i = 0; i <= n; ++i) {
        grid.push_back(from + step * static_cast<double>(i));
    }
    return grid;
}

std::vector<SweepRow> sweep(const Corpus& corpus, AdjustmentMethod method,
                            std::span<const double> deltas, SweepMode mode,
                            const TrackerConfig& base) {
    if (deltas.empty()) {
        throw DomainError("sweep needs at least one delta");
    }
    std::vector<double> sorted(deltas.begin(), deltas.end());
    std::sort(sorted.begin(), sorted.end());

    std::vector<SweepRow> rows;
    for (double delta : sorted) {
        TrackerConfig config = base;
        config.delta = delta;
        config.method = method;
        if (mode == SweepMode::Train) {
            const auto r = train(corpus, config);
            rows.push_back({delta, r.task_accuracy, r.dialogue_accuracy});
        } else {
            const auto cv = cross_validate(corpus, config);
            rows.push_back({delta, cv.aggregate.task_accuracy, cv.aggregate.dialogue_accuracy});
        }
    }
    return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
    std::string out = "delta,task_accuracy,dialogue_accuracy\n";
    for (const auto& r : rows) {
        out += fmt::format("{:g},{:.6f},{:.6f}\n", r.delta, r.task_accuracy, r.dialogue_accuracy);
    }
    return out;
}

}  // namespace initrack
