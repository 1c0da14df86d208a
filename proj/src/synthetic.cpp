#include "initrack/synthetic.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

#include <fmt/format.h>

#include "initrack/errors.hpp"
#include "rng.hpp"

namespace initrack {
namespace {

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError(fmt::format("{} probability {} outside [0,1]", what, p));
    }
}

// Near-equal split of `total` turns into `parts` dialogues.
std::vector<std::size_t> split_lengths(std::size_t total, std::size_t parts) {
    std::vector<std::size_t> out(parts, total / parts);
    for (std::size_t i = 0; i < total % parts; ++i) {
        ++out[i];
    }
    return out;
}

}  // namespace

std::vector<ShiftRule> table_rules(double probability) {
    std::vector<ShiftRule> rules;
    for (const auto& s : canonical_specs()) {
        for (Dimension dim : {Dimension::Task, Dimension::Dialogue}) {
            if (affects(s.kind, dim)) {
                rules.push_back({s.kind, dim, s.expected_holder, probability});
            }
        }
    }
    return rules;
}

void validate(const GeneratorConfig& config) {
    if (config.dialogues == 0 || config.turns_per_dialogue == 0 || config.pairs == 0) {
        throw DomainError("generator needs at least one dialogue, turn and pair");
    }
    if (config.agents[0].empty() || config.agents[0] == config.agents[1]) {
        throw DomainError("generator needs two distinct agent names");
    }
    for (double p : config.cue_probability) {
        check_probability(p, "cue emission");
    }
    check_probability(config.task_noise, "task noise");
    check_probability(config.dialogue_noise, "dialogue noise");
    for (const auto& r : config.rules) {
        check_probability(r.probability, "shift rule");
        if (!affects(r.cue, r.dim)) {
            throw DomainError(fmt::format("cue {} cannot drive task initiative", to_string(r.cue)));
        }
    }
}

Corpus gen_synthetic(const GeneratorConfig& config, std::uint64_t seed) {
    validate(config);
    detail::Rng rng(seed);

    Corpus corpus;
    corpus.name = config.name;
    for (std::size_t i = 0; i < config.dialogues; ++i) {
        Dialogue d;
        d.id = fmt::format("d{}", i + 1);
        d.agents = config.agents;
        if (config.pairs > 1) {
            d.pair = fmt::format("p{}", i % config.pairs + 1);
        }

        std::size_t speaker = rng.below(2);
        std::array<std::size_t, 2> holder{rng.below(2), rng.below(2)};  // task, dialogue
        for (std::size_t t = 0; t < config.turns_per_dialogue; ++t) {
            Turn turn;
            turn.speaker = d.agents[speaker];
            turn.ti_holder = d.agents[holder[0]];
            turn.di_holder = d.agents[holder[1]];
            for (const auto& s : canonical_specs()) {
                if (rng.bernoulli(config.cue_probability[index_of(s.kind)])) {
                    turn.cues.push_back(s.kind);
                }
            }

            for (Dimension dim : {Dimension::Task, Dimension::Dialogue}) {
                auto& h = holder[dim == Dimension::Task ? 0 : 1];
                bool fired = false;
                for (const auto& rule : config.rules) {
                    if (rule.dim != dim ||
                        std::find(turn.cues.begin(), turn.cues.end(), rule.cue) == turn.cues.end()) {
                        continue;
                    }
                    if (rng.bernoulli(rule.probability)) {
                        h = rule.target == Role::Speaker ? speaker : 1 - speaker;
                        fired = true;
                        break;
                    }
                }
                const double noise =
                    dim == Dimension::Task ? config.task_noise : config.dialogue_noise;
                if (!fired && rng.bernoulli(noise)) {
                    h = 1 - h;
                }
            }
            d.turns.push_back(std::move(turn));
            speaker = 1 - speaker;
        }
        corpus.dialogues.push_back(std::move(d));
    }
    validate(corpus);
    return corpus;
}

// ---------------------------------------------------------------------------

namespace {

// Label bits: 1 = task held by agents[0], 2 = dialogue held by agents[0].
using Label = unsigned;
constexpr std::array<Label, 4> kCellLabels{3, 2, 1, 0};

class ReplicaSearch {
public:
    ReplicaSearch(const ReplicaTargets& targets, detail::Rng& rng) : rng_(rng) {
        const std::size_t constrained = std::accumulate(targets.cells.begin(), targets.cells.end(),
                                                        std::size_t{0});
        const bool scored = targets.scope == TurnScope::Scored;
        const std::size_t total = constrained + (scored ? targets.dialogues : 0);
        const std::size_t points = total - targets.dialogues;
        if (targets.dialogues == 0 || total < 2 * targets.dialogues) {
            throw DomainError("replica needs at least two turns per dialogue");
        }
        if (targets.task_keeps > points || targets.dialogue_keeps > points) {
            throw DomainError("replica keep counts exceed the number of prediction points");
        }
        want_changes_ = {points - targets.task_keeps, points - targets.dialogue_keeps};

        lengths_ = split_lengths(total, targets.dialogues);
        first_of_.assign(total, false);
        std::size_t pos = 0;
        for (auto len : lengths_) {
            first_of_[pos] = true;
            pos += len;
        }

        std::vector<Label> pool;
        for (std::size_t c = 0; c < 4; ++c) {
            pool.insert(pool.end(), targets.cells[c], kCellLabels[c]);
        }
        rng_.shuffle(pool);

        labels_.resize(total);
        std::size_t next = 0;
        for (std::size_t i = 0; i < total; ++i) {
            if (scored && first_of_[i]) {
                free_.push_back(i);
            } else {
                fixed_.push_back(i);
                labels_[i] = pool[next++];
            }
        }
        for (auto i : free_) {
            labels_[i] = labels_[i + 1];
        }
        for (std::size_t i = 1; i < total; ++i) {
            changes_ += transition(i);
        }
    }

    void run(std::size_t max_iterations) {
        for (std::size_t it = 0; it < max_iterations && objective(changes_) > 0; ++it) {
            if (!free_.empty() && rng_.below(8) == 0) {
                const auto i = free_[rng_.below(free_.size())];
                try_relabel(i, static_cast<Label>(rng_.below(4)));
            } else {
                const auto i = fixed_[rng_.below(fixed_.size())];
                const auto j = fixed_[rng_.below(fixed_.size())];
                if (labels_[i] != labels_[j]) {
                    try_swap(i, j);
                }
            }
        }
        if (objective(changes_) != 0) {
            throw DomainError("replica search did not reach the requested shift counts");
        }
    }

    const std::vector<Label>& labels() const { return labels_; }
    const std::vector<std::size_t>& lengths() const { return lengths_; }

private:
    struct Changes {
        long task = 0;
        long dialogue = 0;
        Changes& operator+=(Changes o) {
            task += o.task;
            dialogue += o.dialogue;
            return *this;
        }
        Changes& operator-=(Changes o) {
            task -= o.task;
            dialogue -= o.dialogue;
            return *this;
        }
    };

    // Changes across the transition (i-1 -> i); none across dialogue starts.
    Changes transition(std::size_t i) const {
        if (i == 0 || i >= labels_.size() || first_of_[i]) {
            return {};
        }
        const Label diff = labels_[i - 1] ^ labels_[i];
        return {static_cast<long>(diff & 1u), static_cast<long>((diff >> 1) & 1u)};
    }

    Changes around(std::size_t i, std::size_t j) const {
        std::array<std::size_t, 4> ts{i, i + 1, j, j + 1};
        std::sort(ts.begin(), ts.end());
        Changes c;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            if (k == 0 || ts[k] != ts[k - 1]) {
                c += transition(ts[k]);
            }
        }
        return c;
    }

    long objective(Changes c) const {
        return std::labs(c.task - static_cast<long>(want_changes_[0])) +
               std::labs(c.dialogue - static_cast<long>(want_changes_[1]));
    }

    void try_swap(std::size_t i, std::size_t j) {
        Changes next = changes_;
        next -= around(i, j);
        std::swap(labels_[i], labels_[j]);
        next += around(i, j);
        if (objective(next) <= objective(changes_)) {
            changes_ = next;
        } else {
            std::swap(labels_[i], labels_[j]);
        }
    }

    void try_relabel(std::size_t i, Label value) {
        const Label old = labels_[i];
        Changes next = changes_;
        next -= around(i, i);
        labels_[i] = value;
        next += around(i, i);
        if (objective(next) <= objective(changes_)) {
            changes_ = next;
        } else {
            labels_[i] = old;
        }
    }

    detail::Rng& rng_;
    std::array<std::size_t, 2> want_changes_{};
    std::vector<std::size_t> lengths_;
    std::vector<bool> first_of_;
    std::vector<std::size_t> fixed_;
    std::vector<std::size_t> free_;
    std::vector<Label> labels_;
    Changes changes_;
};

constexpr std::array kBothToHearer{CueKind::EndSilence,        CueKind::NoNewInfoPrompt,
                                   CueKind::NoNewInfoRepetition, CueKind::ExplicitGiveup,
                                   CueKind::InvalidityAction,  CueKind::AmbiguityAction};
constexpr std::array kDialogueToHearer{CueKind::QuestionEvaluation,
                                       CueKind::ObligationFulfilledDiscourse,
                                       CueKind::InvalidityBelief, CueKind::AmbiguityBelief};

}  // namespace

Corpus construct_replica(const ReplicaTargets& targets, std::uint64_t seed) {
    check_probability(targets.cue_rate, "cue annotation");
    if (targets.pairs == 0) {
        throw DomainError("replica needs at least one pair group");
    }
    detail::Rng rng(seed);
    ReplicaSearch search(targets, rng);
    search.run(50'000'000);

    Corpus corpus;
    corpus.name = targets.name;
    const auto& labels = search.labels();
    std::size_t pos = 0;
    for (std::size_t di = 0; di < search.lengths().size(); ++di) {
        Dialogue d;
        d.id = fmt::format("d{}", di + 1);
        d.agents = targets.agents;
        if (targets.pairs > 1) {
            d.pair = fmt::format("p{}", di % targets.pairs + 1);
        }
        std::size_t speaker = rng.below(2);
        const std::size_t len = search.lengths()[di];
        for (std::size_t k = 0; k < len; ++k) {
            const Label l = labels[pos + k];
            d.turns.push_back(Turn{d.agents[speaker], d.agents[(l & 1u) ? 0 : 1],
                                   d.agents[(l & 2u) ? 0 : 1], {}});
            speaker = 1 - speaker;
        }
        for (std::size_t k = 0; k + 1 < len; ++k) {
            auto& t = d.turns[k];
            const auto& next = d.turns[k + 1];
            const bool task_shift = next.ti_holder != t.ti_holder;
            const bool dialogue_shift = next.di_holder != t.di_holder;
            if (!(task_shift || dialogue_shift) || !rng.bernoulli(targets.cue_rate)) {
                continue;
            }
            const Dimension dim = dialogue_shift ? Dimension::Dialogue : Dimension::Task;
            const bool to_hearer = next.holder(dim) != t.speaker;
            if (!to_hearer) {
                t.cues.push_back(task_shift ? CueKind::ExplicitTakeover : CueKind::QuestionDomain);
            } else if (task_shift) {
                t.cues.push_back(kBothToHearer[rng.below(kBothToHearer.size())]);
            } else {
                t.cues.push_back(kDialogueToHearer[rng.below(kDialogueToHearer.size())]);
            }
        }
        pos += len;
        corpus.dialogues.push_back(std::move(d));
    }
    validate(corpus);
    return corpus;
}

ReplicaTargets trains91_distribution_targets() {
    ReplicaTargets t;
    t.name = "trains91-replica";
    t.dialogues = 16;
    t.pairs = 8;
    t.cells = {37, 274, 4, 727};
    t.scope = TurnScope::All;
    // 1026 prediction points; shift counts follow the published no-cue rates.
    t.task_keeps = 1026 - 33;
    t.dialogue_keeps = 1026 - 262;
    t.cue_rate = 0.9;
    return t;
}

ReplicaTargets trains91_baseline_targets() {
    ReplicaTargets t;
    t.name = "trains91-baseline-replica";
    t.dialogues = 16;
    t.pairs = 8;
    t.cells = {37, 274, 4, 727};
    t.scope = TurnScope::Scored;
    t.task_keeps = 1009;
    t.dialogue_keeps = 780;
    t.cue_rate = 0.9;
    return t;
}

}  // namespace initrack
