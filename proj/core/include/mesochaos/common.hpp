#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace mesochaos {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// The requested integral or moment does not exist (e.g. n*gt >= 1 in a Selberg integral).
class DivergenceError : public Error {
public:
    using Error::Error;
};

// A numerical scheme could not reach its tolerance; carries what it did achieve.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double achieved)
        : Error(what), achieved_(achieved) {}
    double achieved_error() const { return achieved_; }

private:
    double achieved_;
};

// Linear algebra produced something unusable (non-positive determinant, failed factorization).
class NumericalBreakdown : public Error {
public:
    using Error::Error;
};

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

// Integral evaluators return both forms; the log is authoritative when the value overflows.
struct LogValue {
    double value = 0.0;
    double log_value = 0.0;
};

inline LogValue from_log(double log_value) {
    return {std::exp(log_value), log_value};
}

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;

}  // namespace mesochaos
