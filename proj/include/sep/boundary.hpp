#pragma once

#include <vector>

#include "sep/measure.hpp"
#include "sep/numerics.hpp"

namespace sep {

/// Azema-Yor stopping boundary: beta(s) is the contact point of the tangent
/// to the call function drawn from (s, 0)... equivalently the right-continuous
/// inverse of the barycentre. beta(s) = s at and beyond the top of the support.
class AyBoundary {
public:
    explicit AyBoundary(TargetMeasure m);

    double beta(double s) const;
    double barycentre(double x) const { return m_.barycentre(x); }
    double support_hi() const { return m_.support_hi(); }
    double support_lo() const { return m_.support_lo(); }
    const TargetMeasure& measure() const { return m_; }

    /// s-locations where beta has kinks or jumps (images of measure kinks)
    std::vector<double> boundary_kinks(double s_max) const;

private:
    TargetMeasure m_;
};

/// Perkins boundaries: alpha_plus (tangents from the call curve to the put
/// curve, values <= 0) and alpha_minus (the mirror image, values >= 0), with
/// their inverses. Ties at flat tangency stretches resolve to the largest
/// modulus, so both curves are right-continuous in the paper's convention.
class PerkinsBoundary {
public:
    explicit PerkinsBoundary(TargetMeasure m);

    double alpha_plus(double s) const;   // s > 0, result in [support_lo, 0]
    double alpha_minus(double i) const;  // i < 0, result in [0, support_hi]
    double a_plus(double w) const;       // inverse of alpha_plus at w < 0
    double a_minus(double w) const;      // inverse of alpha_minus at w > 0
    double abar(double w) const { return w >= 0.0 ? w : a_plus(w); }

    double zero_atom_mass() const { return zero_mass_; }
    double support_hi() const { return m_.support_hi(); }
    double support_lo() const { return m_.support_lo(); }
    const TargetMeasure& measure() const { return m_; }

    std::vector<double> boundary_kinks(double s_max) const;

private:
    friend PerkinsBoundary perkins_boundary(const TargetMeasure&);
    TargetMeasure m_;
    TargetMeasure refl_;
    double zero_mass_ = 0.0;
};

AyBoundary ay_boundary(const TargetMeasure& m);
PerkinsBoundary perkins_boundary(const TargetMeasure& m);

/// exp(-int_0^s dr/(r - beta(r))): the law of the maximum under the AY
/// embedding, P(S >= s).
double max_survival(const AyBoundary& bd, double s, double tol = 1e-10);

/// exp(-int_0^s dr/(r - alpha_plus(r))): the probability that the alpha_plus
/// rule has not fired by the time the maximum reaches s. This is only one
/// factor of the Perkins max-law; the full law comes from simulation.
double max_survival(const PerkinsBoundary& bd, double s, double tol = 1e-10);

/// Cumulative L(s) = int_0^s dr/(r - eta(r)) for reuse across many s.
num::CumulativeIntegral log_survival_integral(const AyBoundary& bd, double s_max,
                                              double tol = 1e-10);
num::CumulativeIntegral log_survival_integral(const PerkinsBoundary& bd, double s_max,
                                              double tol = 1e-10);

double reverse_barycentre(const TargetMeasure& m, double x);

}  // namespace sep
