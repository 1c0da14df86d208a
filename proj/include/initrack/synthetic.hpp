#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "initrack/corpus.hpp"
#include "initrack/cues.hpp"
#include "initrack/evidence.hpp"

namespace initrack {

/// Ground-truth shift rule: when `cue` is observed on a turn, with probability
/// `probability` the `dim` initiative on the next turn goes to the agent that
/// holds `target` on the cue's turn.
struct ShiftRule {
    CueKind cue;
    Dimension dim;
    Role target;
    double probability;
};

/// Configuration for gen_synthetic().
///
/// Each non-final turn independently emits every cue with its emission
/// probability. The next turn's holders start as copies of the current ones;
/// per dimension the first matching rule that fires decides the next holder,
/// and when no rule fires the holder flips with the background noise
/// probability. The first speaker and the first holders are drawn uniformly.
struct GeneratorConfig {
    std::string name = "synthetic";
    std::size_t dialogues = 8;
    std::size_t turns_per_dialogue = 20;
    /// Dialogues are spread round-robin over this many pair keys p1..pN.
    std::size_t pairs = 1;
    std::array<std::string, 2> agents{"system", "manager"};
    std::array<double, kCueCount> cue_probability{};
    std::vector<ShiftRule> rules;
    double task_noise = 0.0;
    double dialogue_noise = 0.0;
};

/// One rule per (cue, affected dimension) pointing at the cue's expected
/// holder from the cue table, all with the same probability.
std::vector<ShiftRule> table_rules(double probability);

/// Throws DomainError for probabilities outside [0,1], zero-sized shapes, or
/// task rules on dialogue-only cues.
void validate(const GeneratorConfig& config);

/// Deterministic for a fixed (config, seed).
Corpus gen_synthetic(const GeneratorConfig& config, std::uint64_t seed);

/// Targets for a corpus constructed to reproduce published marginal counts.
///
/// `cells` follows DistributionReport::cells() order relative to
/// agents[0]; they count every turn (TurnScope::All) or only turns 2..N
/// (TurnScope::Scored). `task_keeps`/`dialogue_keeps` are the number of
/// prediction points whose holder equals the previous turn's holder.
struct ReplicaTargets {
    std::string name = "replica";
    std::array<std::string, 2> agents{"system", "manager"};
    std::size_t dialogues = 16;
    /// Dialogues are spread round-robin over this many pair keys p1..pN.
    std::size_t pairs = 1;
    std::array<std::size_t, 4> cells{};
    TurnScope scope = TurnScope::All;
    std::size_t task_keeps = 0;
    std::size_t dialogue_keeps = 0;
    /// Annotate turns preceding a shift with a cue pointing at the new holder
    /// (with probability cue_rate).
    double cue_rate = 0.0;
};

/// Builds a corpus meeting the targets exactly by seeded local search.
/// Throws DomainError if the targets are infeasible or the search fails.
Corpus construct_replica(const ReplicaTargets& targets, std::uint64_t seed);

/// Targets matching the TRAINS91 holder distribution (1042 turns) and
/// no-cue baseline counts (1009 task / 780 dialogue keeps).
ReplicaTargets trains91_distribution_targets();
ReplicaTargets trains91_baseline_targets();

}  // namespace initrack
