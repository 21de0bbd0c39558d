#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace sep::num {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;       // absolute error estimate
    bool divergent = false;   // set by the improper integrator when the endpoint refinement blows up
};

using Fn = std::function<double(double)>;

/// Adaptive Simpson on [a,b] with absolute tolerance.
QuadResult integrate(const Fn& f, double a, double b, double tol, int max_depth = 50);

/// Adaptive Simpson with forced subdivision at the given interior points
/// (kinks of the integrand). Knots outside (a,b) are ignored.
QuadResult integrate_with_knots(const Fn& f, double a, double b, std::vector<double> knots,
                                double tol, int max_depth = 50, long budget = 4'000'000);

/// Integral over (a,b) of an integrand that may blow up at either endpoint.
/// Endpoint neighbourhoods are resolved by geometric refinement; if the dyadic
/// slice contributions fail to decay the integral is flagged divergent and the
/// running value is what was accumulated (monotone lower estimate for f >= 0).
QuadResult integrate_improper(const Fn& f, double a, double b, double tol,
                              std::vector<double> knots = {},
                              bool singular_left = true, bool singular_right = true);

/// Integral of f over [a, +inf), mapped to [0,1) via w = a + t/(1-t).
QuadResult integrate_to_inf(const Fn& f, double a, double tol);

/// For a non-decreasing h with h(lo) <= 0 and h(hi) > 0, returns the boundary
/// sup{y in [lo,hi] : h(y) <= 0} to within the given interval tolerance.
/// Derivative-free so kinked inputs are fine.
double bisect_sup_leq(const Fn& h, double lo, double hi, double tol);

/// For a non-increasing k with k(lo) > 0 and k(hi) <= 0, returns the boundary
/// inf{y in [lo,hi] : k(y) <= 0}.
double bisect_inf_leq(const Fn& k, double lo, double hi, double tol);

/// Monotone (either direction) root bracketing for f(x) = target; assumes f
/// continuous and monotone on [lo,hi] with the target bracketed.
double bisect_monotone(const Fn& f, double target, double lo, double hi, double tol);

/// Cumulative integral I(s) = int_a^s f(r) dr. Construction refines the cell
/// skeleton (seeded at the knots) until each leaf passes a Simpson accuracy
/// check; evaluation locates the leaf and integrates its stored quadratic
/// model, so queries are O(log n) and accurate to ~tol everywhere.
class CumulativeIntegral {
public:
    CumulativeIntegral() = default;
    CumulativeIntegral(Fn f, double a, double b, std::vector<double> knots, double tol);

    double operator()(double s) const;
    double lower() const { return a_; }
    double upper() const { return b_; }
    double total() const { return cum_.empty() ? 0.0 : cum_.back(); }
    double error() const { return err_; }

private:
    double a_ = 0.0, b_ = 0.0, err_ = 0.0;
    std::vector<double> nodes_;  // leaf edges, size n+1
    std::vector<double> cum_;    // cum_[i] = integral over [a, nodes_[i]]
    std::vector<double> flo_, fmid_, fhi_;  // f at leaf edges and midpoints
};

}  // namespace sep::num
