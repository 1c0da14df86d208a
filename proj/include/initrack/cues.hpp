#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "initrack/evidence.hpp"

namespace initrack {

/// Leaf cue entries of the initiative cue taxonomy, in canonical table order.
enum class CueKind : std::uint8_t {
    ExplicitGiveup,
    ExplicitTakeover,
    EndSilence,
    NoNewInfoRepetition,
    NoNewInfoPrompt,
    QuestionDomain,
    QuestionEvaluation,
    ObligationFulfilledTask,
    ObligationFulfilledDiscourse,
    InvalidityAction,
    InvalidityBelief,
    Suboptimality,
    AmbiguityAction,
    AmbiguityBelief,
};

inline constexpr std::size_t kCueCount = 14;

enum class CueClass { Explicit, Discourse, Analytical };

/// Which initiative indices a cue may move.
enum class Effect { DialogueOnly, Both };

enum class Dimension { Task, Dialogue };

const char* to_string(CueClass c) noexcept;
const char* to_string(Effect e) noexcept;
const char* to_string(Dimension d) noexcept;

struct CueSpec {
    CueKind kind;
    std::string_view name;
    CueClass cue_class;
    Effect effect;
    Role expected_holder;  // documentation only; prediction ignores it
};

std::span<const CueSpec, kCueCount> canonical_specs() noexcept;
const CueSpec& spec_of(CueKind kind) noexcept;
std::string_view to_string(CueKind kind) noexcept;

constexpr std::size_t index_of(CueKind kind) noexcept {
    return static_cast<std::size_t>(kind);
}

inline bool affects(CueKind kind, Dimension dim) noexcept {
    return dim == Dimension::Dialogue || spec_of(kind).effect == Effect::Both;
}

/// Exact, case-sensitive lookup of a `type:subtype` token.
std::optional<CueKind> find_cue(std::string_view token) noexcept;

/// Like find_cue, but throws ParseError naming the token.
CueKind parse_cue(std::string_view token);

/// One trainable bpa with its credit counter.
struct BpaEntry {
    MassFunction bpa = vacuous();
    std::int64_t counter = 0;

    friend bool operator==(const BpaEntry&, const BpaEntry&) = default;
};

struct CueParams {
    BpaEntry dialogue;
    std::optional<BpaEntry> task;  // engaged iff the cue's effect is Both

    friend bool operator==(const CueParams&, const CueParams&) = default;
};

/// Learned bpa's for every cue kind.
class CueModel {
public:
    /// Every bpa vacuous, every counter zero.
    CueModel();

    const CueParams& params(CueKind kind) const noexcept { return params_[index_of(kind)]; }

    /// Throws DomainError for the task entry of a dialogue-only cue.
    const BpaEntry& entry(CueKind kind, Dimension dim) const;
    BpaEntry& entry(CueKind kind, Dimension dim);

    friend bool operator==(const CueModel&, const CueModel&) = default;

private:
    std::array<CueParams, kCueCount> params_;
};

CueModel init_model();

inline constexpr std::string_view kModelHeader = "initrack-model v1";

void save_model(const CueModel& model, std::ostream& out);
std::string model_to_string(const CueModel& model);

/// Throws ParseError with the offending line number.
CueModel load_model(std::istream& in, const std::string& source_name = {});
CueModel load_model_file(const std::string& path);
void save_model_file(const CueModel& model, const std::string& path);

}  // namespace initrack
