#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lwp {

/** @brief Base of every error thrown by the library. */
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/** @brief Input is formally valid but degenerate (e.g. a packet at rest where a speed is needed). */
class DegenerateInput : public Error {
public:
    using Error::Error;
};

class Singularity : public Error {
public:
    using Error::Error;
};

/** @brief Evaluation point outside the region where a formula holds. */
class DomainError : public Error {
public:
    using Error::Error;
};

/** @brief Finite-difference run let the packet reach the grid edge. */
class DomainOverrun : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/** @brief Requested tolerance not reached; carries the best available estimate. */
class AccuracyFailure : public Error {
public:
    AccuracyFailure(const std::string& what, std::complex<double> best, double error_estimate)
        : Error(what), best_(best), err_(error_estimate) {}
    std::complex<double> best_estimate() const noexcept { return best_; }
    double error_estimate() const noexcept { return err_; }

private:
    std::complex<double> best_;
    double err_;
};

/** @brief A checked validity condition failed; margins list measured value against limit. */
class PreconditionViolation : public Error {
public:
    struct Margin {
        std::string name;
        double value;
        double limit;
    };

    PreconditionViolation(const std::string& what, std::vector<Margin> margins)
        : Error(describe(what, margins)), margins_(std::move(margins)) {}
    const std::vector<Margin>& margins() const noexcept { return margins_; }

private:
    static std::string describe(const std::string& what, const std::vector<Margin>& ms) {
        std::string s = what;
        for (const auto& m : ms)
            s += " [" + m.name + "=" + std::to_string(m.value) + ", limit " + std::to_string(m.limit) + "]";
        return s;
    }
    std::vector<Margin> margins_;
};

}  // namespace lwp
