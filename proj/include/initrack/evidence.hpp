#pragma once

#include <span>
#include <string>

namespace initrack {

/// Participant role relative to a single turn.
enum class Role { Speaker, Hearer };

constexpr Role other(Role r) noexcept {
    return r == Role::Speaker ? Role::Hearer : Role::Speaker;
}

const char* to_string(Role r) noexcept;

/// Basic probability assignment over the frame {speaker, hearer}.
///
/// Mass on the empty set is always zero, so three numbers describe the whole
/// function: the two singletons and the full frame (uncommitted belief).
/// Instances are validated on construction and immutable afterwards.
class MassFunction {
public:
    static constexpr double kSumTolerance = 1e-9;

    /// Throws DomainError if a component is negative, above 1, non-finite,
    /// or the components do not sum to 1 within kSumTolerance.
    MassFunction(double speaker, double hearer, double theta);

    double speaker() const noexcept { return speaker_; }
    double hearer() const noexcept { return hearer_; }
    double theta() const noexcept { return theta_; }
    double of(Role r) const noexcept { return r == Role::Speaker ? speaker_ : hearer_; }

    friend bool operator==(const MassFunction&, const MassFunction&) = default;

private:
    double speaker_;
    double hearer_;
    double theta_;
};

std::string to_string(const MassFunction& m);

/// All mass on the frame; the identity of combine().
MassFunction vacuous() noexcept;

/// (x, 1-x, 0). Throws DomainError if x is outside [0, 1].
MassFunction bayesian(double x);

/// Conflict mass m1(s)m2(h) + m1(h)m2(s).
double conflict(const MassFunction& m1, const MassFunction& m2) noexcept;

/// Normalized Dempster rule. Throws TotalConflictError when the conflict is 1.
MassFunction combine(const MassFunction& m1, const MassFunction& m2);

/// Left fold of combine(). Throws DomainError on an empty list.
MassFunction combine_all(std::span<const MassFunction> ms);

/// Speaker unless the hearer has strictly more mass.
Role predicted_holder(const MassFunction& m) noexcept;

}  // namespace initrack
