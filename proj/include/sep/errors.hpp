#pragma once

#include <stdexcept>
#include <string>

namespace sep {

// Validation errors map to CLI exit code 2, numerical failures to 3.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonCentredError : ValidationError {
    double mean;
    explicit NonCentredError(double m)
        : ValidationError("measure is not centred: mean = " + std::to_string(m)), mean(m) {}
};

struct MassNotOneError : ValidationError {
    double mass;
    explicit MassNotOneError(double m)
        : ValidationError("masses do not sum to 1: total = " + std::to_string(m)), mass(m) {}
};

struct DegenerateDelta0Error : ValidationError {
    DegenerateDelta0Error() : ValidationError("measure is the unit mass at 0") {}
};

struct InfiniteFirstMomentError : ValidationError {
    InfiniteFirstMomentError() : ValidationError("measure has no finite first moment") {}
};

struct ArbitrageViolationError : ValidationError {
    explicit ArbitrageViolationError(const std::string& what_part)
        : ValidationError("call quotes admit arbitrage: " + what_part) {}
};

struct NoMassBelowError : ValidationError {
    explicit NoMassBelowError(double x)
        : ValidationError("no mass at or below x = " + std::to_string(x)) {}
};

struct NonIntegrableBoundaryError : NumericalError {
    explicit NonIntegrableBoundaryError(double s)
        : NumericalError("excursion integrand not integrable up to s = " + std::to_string(s) +
                         " (no mass above)") {}
};

struct NonIntegrableCertificateError : NumericalError {
    explicit NonIntegrableCertificateError(const std::string& msg)
        : NumericalError("certificate integral unbounded: " + msg) {}
};

struct InequalityViolationError : NumericalError {
    double w, s, violation;
    InequalityViolationError(double w_, double s_, double v)
        : NumericalError("pathwise inequality violated at (w,s) = (" + std::to_string(w_) + "," +
                         std::to_string(s_) + ") by " + std::to_string(v)),
          w(w_), s(s_), violation(v) {}
};

struct UnclassifiedPayoffError : ValidationError {
    UnclassifiedPayoffError()
        : ValidationError("payoff is neither F-MON increasing nor decreasing; "
                          "no extremal embedding applies") {}
};

struct TruncationDominatesError : NumericalError {
    double fraction;
    explicit TruncationDominatesError(double f)
        : NumericalError("more than 1% of paths truncated (" + std::to_string(100.0 * f) +
                         "%); results unreliable"),
          fraction(f) {}
};

struct UnknownFixtureError : ValidationError {
    explicit UnknownFixtureError(const std::string& tag)
        : ValidationError("unknown convergence fixture: " + tag) {}
};

struct QuadratureFailureError : NumericalError {
    explicit QuadratureFailureError(const std::string& msg)
        : NumericalError("quadrature failed: " + msg) {}
};

struct NonCentredPushforwardError : ValidationError {
    double mean;
    explicit NonCentredPushforwardError(double m)
        : ValidationError("pushforward law is not centred (mean = " + std::to_string(m) +
                          "); the scale-transformed embedding is not uniformly integrable"),
          mean(m) {}
};

struct UnsupportedMeasureError : ValidationError {
    explicit UnsupportedMeasureError(const std::string& msg) : ValidationError(msg) {}
};

}  // namespace sep
