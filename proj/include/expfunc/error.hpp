#pragma once

#include <stdexcept>
#include <string>

namespace expfunc {

// Bad parameters or malformed configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical invariant failed. `invariant()` names it verbatim.
class NumericError : public std::runtime_error {
public:
    NumericError(std::string invariant, const std::string& detail)
        : std::runtime_error(invariant + ": " + detail), invariant_(std::move(invariant)) {}
    const std::string& invariant() const noexcept { return invariant_; }

private:
    std::string invariant_;
};

// Evaluation point lies outside the region where a representation is valid.
class ValidityError : public std::domain_error {
public:
    ValidityError(const std::string& what, double lo, double hi)
        : std::domain_error(what), lo_(lo), hi_(hi) {}
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

}  // namespace expfunc
