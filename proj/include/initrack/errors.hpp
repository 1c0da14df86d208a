#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace initrack {

// Argument outside an operation's domain (bad probability, foreign agent,
// empty input, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Dempster combination of two bpa's whose conflict mass is 1.
class TotalConflictError : public std::domain_error {
public:
    explicit TotalConflictError(const std::string& what) : std::domain_error(what) {}
};

// Malformed corpus or model input; line is 1-based, 0 when not applicable.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string source, std::size_t line, const std::string& message)
        : std::runtime_error(format(source, line, message)),
          source_(std::move(source)),
          line_(line) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    static std::string format(const std::string& source, std::size_t line,
                              const std::string& message) {
        std::string out = source.empty() ? std::string("<input>") : source;
        if (line > 0) {
            out += ":" + std::to_string(line);
        }
        return out + ": " + message;
    }

    std::string source_;
    std::size_t line_;
};

// A statistic whose denominator vanishes (kappa with P(E)=1, Cochran's Q with
// constant rows).
class DegenerateStatisticError : public std::domain_error {
public:
    explicit DegenerateStatisticError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace initrack
