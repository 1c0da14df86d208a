#include "initrack/evidence.hpp"

#include <cmath>

#include <fmt/format.h>

#include "initrack/errors.hpp"

namespace initrack {

const char* to_string(Role r) noexcept {
    return r == Role::Speaker ? "speaker" : "hearer";
}

MassFunction::MassFunction(double speaker, double hearer, double theta)
    : speaker_(speaker), hearer_(hearer), theta_(theta) {
    for (double v : {speaker, hearer, theta}) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw DomainError(fmt::format("mass component {} outside [0,1]", v));
        }
    }
    if (std::abs(speaker + hearer + theta - 1.0) > kSumTolerance) {
        throw DomainError(fmt::format("masses ({}, {}, {}) do not sum to 1",
                                      speaker, hearer, theta));
    }
}

std::string to_string(const MassFunction& m) {
    return fmt::format("(speaker:{}, hearer:{}, theta:{})", m.speaker(), m.hearer(), m.theta());
}

MassFunction vacuous() noexcept { return MassFunction(0.0, 0.0, 1.0); }

MassFunction bayesian(double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError(fmt::format("bayesian index {} outside [0,1]", x));
    }
    return MassFunction(x, 1.0 - x, 0.0);
}

double conflict(const MassFunction& m1, const MassFunction& m2) noexcept {
    return m1.speaker() * m2.hearer() + m1.hearer() * m2.speaker();
}

MassFunction combine(const MassFunction& m1, const MassFunction& m2) {
    const double s = m1.speaker() * m2.speaker() + m1.speaker() * m2.theta() +
                     m1.theta() * m2.speaker();
    const double h =
        m1.hearer() * m2.hearer() + m1.hearer() * m2.theta() + m1.theta() * m2.hearer();
    const double t = m1.theta() * m2.theta();
    // s + h + t equals 1 - kappa in exact arithmetic; dividing by the
    // surviving mass keeps the result normalized when the inputs are a few
    // ulps off 1 and the conflict is nearly total.
    const double norm = s + h + t;
    if (conflict(m1, m2) >= 1.0 || !(norm > 0.0)) {
        throw TotalConflictError(fmt::format("total conflict combining {} with {}",
                                             to_string(m1), to_string(m2)));
    }
    return MassFunction(std::fmin(s / norm, 1.0), std::fmin(h / norm, 1.0),
                        std::fmin(t / norm, 1.0));
}

MassFunction combine_all(std::span<const MassFunction> ms) {
    if (ms.empty()) {
        throw DomainError("combine_all requires at least one mass function");
    }
    MassFunction acc = ms.front();
    for (const auto& m : ms.subspan(1)) {
        acc = combine(acc, m);
    }
    return acc;
}

Role predicted_holder(const MassFunction& m) noexcept {
    return m.speaker() >= m.hearer() ? Role::Speaker : Role::Hearer;
}

}  // namespace initrack
