#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "initrack/cues.hpp"
#include "initrack/evidence.hpp"

namespace initrack {

/// One annotated turn. Holders are absolute agent ids; cues are distinct.
struct Turn {
    std::string speaker;
    std::string ti_holder;
    std::string di_holder;
    std::vector<CueKind> cues;

    const std::string& holder(Dimension dim) const noexcept {
        return dim == Dimension::Task ? ti_holder : di_holder;
    }

    friend bool operator==(const Turn&, const Turn&) = default;
};

struct Dialogue {
    std::string id;
    std::array<std::string, 2> agents;
    /// Grouping key for cross-validation; empty means "agents[0],agents[1]".
    std::string pair;
    std::vector<Turn> turns;

    std::string pair_key() const;

    friend bool operator==(const Dialogue&, const Dialogue&) = default;
};

struct Corpus {
    std::string name;
    std::vector<Dialogue> dialogues;

    std::size_t turn_count() const noexcept;
    /// Turns 2..N of every dialogue, i.e. the turns whose holders get predicted.
    std::size_t prediction_points() const noexcept;

    friend bool operator==(const Corpus&, const Corpus&) = default;
};

/// Checks every corpus invariant; throws DomainError describing the first
/// violation.
void validate(const Corpus& corpus);

/// Role of `agent` on turn `turn` of `dialogue`. Throws DomainError for an
/// agent outside the dialogue's pair.
Role role_of(const Dialogue& dialogue, const Turn& turn, std::string_view agent);
const std::string& agent_of(const Dialogue& dialogue, const Turn& turn, Role role);

/// The agent of the pair that is not `agent`.
const std::string& partner_of(const Dialogue& dialogue, std::string_view agent);

// --- text format ---------------------------------------------------------

/// Parses the corpus text format. All-or-nothing: the first error throws a
/// ParseError carrying `source_name` and the 1-based line.
Corpus parse_corpus(std::istream& in, const std::string& source_name = {});
Corpus parse_corpus_string(std::string_view text, const std::string& source_name = {});
Corpus load_corpus_file(const std::string& path);

void write_corpus(const Corpus& corpus, std::ostream& out);
std::string corpus_to_string(const Corpus& corpus);

// --- summaries -----------------------------------------------------------

/// Which turns a distribution counts.
enum class TurnScope {
    All,
    Scored,  // turns 2..N of each dialogue
};

/// TI/DI holder cross-tabulation relative to a focus agent `a` (other agent `b`).
struct DistributionReport {
    std::string focus_agent;
    std::size_t both_focus = 0;         // TI=a, DI=a
    std::size_t dialogue_only_focus = 0;  // TI=b, DI=a
    std::size_t task_only_focus = 0;      // TI=a, DI=b
    std::size_t neither_focus = 0;      // TI=b, DI=b
    std::size_t total = 0;

    /// Cells in table-layout order: (a,a), (b,a), (a,b), (b,b) as (TI,DI).
    std::array<std::size_t, 4> cells() const noexcept {
        return {both_focus, dialogue_only_focus, task_only_focus, neither_focus};
    }
    std::array<double, 4> percentages() const noexcept;

    std::size_t task_focus() const noexcept { return both_focus + task_only_focus; }
    std::size_t dialogue_focus() const noexcept { return both_focus + dialogue_only_focus; }
};

/// Throws DomainError if the focus agent is missing from some dialogue.
DistributionReport distribution_report(const Corpus& corpus, std::string_view focus_agent,
                                       TurnScope scope = TurnScope::All);

/// Dialogues grouped by pair key, groups in ascending key order, dialogue
/// order preserved within a group.
std::vector<std::pair<std::string, Corpus>> partition_by_pair(const Corpus& corpus);

}  // namespace initrack
