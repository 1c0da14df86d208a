#pragma once

// Shared helpers for the test binaries.

#include <cstdint>
#include <random>
#include <string>

#include "initrack/evidence.hpp"
#include "oracle/dempster_oracle.hpp"

namespace testsupport {

inline std::string data_path(const std::string& file) {
    return std::string(INITRACK_TEST_DATA) + "/" + file;
}

// Random valid mass function; one in five is Bayesian, one in ten vacuous-ish.
inline initrack::MassFunction random_mass(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double kind = u(gen);
    if (kind < 0.2) {
        return initrack::bayesian(u(gen));
    }
    if (kind < 0.3) {
        const double s = 0.1 * u(gen);
        return initrack::MassFunction(s, 0.0, 1.0 - s);
    }
    const double s = u(gen);
    const double h = u(gen) * (1.0 - s);
    return initrack::MassFunction(s, h, 1.0 - s - h);
}

inline oracle::Masses to_oracle(const initrack::MassFunction& m) {
    return oracle::to_subsets(m.speaker(), m.hearer(), m.theta());
}

}  // namespace testsupport
