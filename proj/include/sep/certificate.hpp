#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sep/boundary.hpp"
#include "sep/measure.hpp"

namespace sep {

enum class FmonClass { Up, Down, Both, Neither };
enum class Embedding { Ay, Perkins };
enum class Monotonicity { Increasing, Decreasing, Constant };

const char* to_string(FmonClass c);
const char* to_string(Embedding e);

/// Bivariate terminal payoff F(w, s) on {w <= s, s >= 0} with access to F_s.
class Payoff {
public:
    static Payoff power_drawdown(double c);     // (s-w)^c
    static Payoff drawdown_over_max(double c);  // (s-w)^2 / s^c
    static Payoff relative_drawdown();          // (1-w/s)^2
    static Payoff custom(std::function<double(double, double)> f,
                         std::function<double(double, double)> fs,
                         double diagonal_exponent = 0.0,
                         std::optional<FmonClass> known_class = std::nullopt);

    double operator()(double w, double s) const { return f_(w, s); }
    double ds(double w, double s) const { return fs_(w, s); }

    /// analytic F-MON verdict for the built-in families, when known
    std::optional<FmonClass> analytic_class() const { return class_; }
    /// e such that F(w,s) ~ (s-w)^e as w -> s (governs diagonal singularities)
    double diagonal_exponent() const { return diag_exp_; }
    const std::string& name() const { return name_; }

private:
    Payoff() = default;
    std::function<double(double, double)> f_, fs_;
    std::optional<FmonClass> class_;
    double diag_exp_ = 0.0;
    std::string name_ = "custom";
};

/// Running cost g(s) >= 0 with declared monotonicity.
class RunningCost {
public:
    static RunningCost power(double c);               // s^-c
    static RunningCost shifted_reciprocal(double c);  // 1/(c+s), c > 0
    static RunningCost constant(double v = 1.0);
    static RunningCost custom(std::function<double(double)> g,
                              std::function<double(double)> dg, Monotonicity mono);

    double operator()(double s) const { return g_(s); }
    double deriv(double s) const { return dg_(s); }
    Monotonicity monotonicity() const { return mono_; }
    bool vanishes_at_infinity() const { return vanishes_; }
    const std::string& name() const { return name_; }

    /// G(w,s) = (s-w)^2 g(s); E[int_0^tau g(S)du] = E[G(W_tau,S_tau)] for
    /// uniformly integrable embeddings
    Payoff to_payoff() const;

private:
    RunningCost() = default;
    std::function<double(double)> g_, dg_;
    Monotonicity mono_ = Monotonicity::Constant;
    bool vanishes_ = false;
    std::string name_ = "custom";
};

/// Numeric F-MON classification: monotonicity in w of F_s(w,s)/(s-w) sampled
/// on a grid. Built-in families short-circuit to their analytic verdict
/// unless forced numeric.
FmonClass classify_fmon(const Payoff& F, double w_lo, double w_hi, double s_lo, double s_hi,
                        int grid = 64, bool force_numeric = false);
FmonClass classify_fmon(const Payoff& F, const TargetMeasure& m, int grid = 64,
                        bool force_numeric = false);

/// Lagrangian certificate for one boundary eta in {beta, alpha+}:
///   lambda(r) = F_s(eta(r), r)/(r - eta(r)),
///   Lambda(s) = int_0^s lambda,   Lambda1(s) = int_0^s r lambda,
///   Phi(w,s) = Lambda1(s) - w Lambda(s),   xi(w) = F(w, m(w)) - Phi(w, m(w))
/// with m = b for beta and m = abar for alpha+.
class Certificate {
public:
    double lambda(double r) const;
    double Lambda(double s) const;
    double Lambda1(double s) const;
    double Phi(double w, double s) const { return Lambda1(s) - w * Lambda(s); }
    double xi(double w) const;
    Embedding side() const { return side_; }
    double tol() const { return tol_; }

private:
    friend Certificate certificate(const Payoff&, const AyBoundary&, double);
    friend Certificate certificate(const Payoff&, const PerkinsBoundary&, double);
    struct Impl;
    std::shared_ptr<const Impl> impl_;
    Embedding side_ = Embedding::Ay;
    double tol_ = 1e-8;
};

Certificate certificate(const Payoff& F, const AyBoundary& bd, double tol = 1e-8);
Certificate certificate(const Payoff& F, const PerkinsBoundary& bd, double tol = 1e-8);

/// both certificate halves, as the spec's bundle
struct CertificateBundle {
    Certificate beta;
    Certificate alpha_plus;
};
CertificateBundle certificate_bundle(const Payoff& F, const AyBoundary& ay,
                                     const PerkinsBoundary& pk, double tol = 1e-8);

struct PathwiseReport {
    int checked = 0;
    double worst_slack_low = 0.0;    // min over points of F - (xi+Phi)_lower
    double worst_slack_high = 0.0;   // min over points of (xi+Phi)_upper - F
    double max_contact_residual = 0.0;
    std::pair<double, double> worst_point{0.0, 0.0};
};

/// Checks xi_low + Phi_low <= F <= xi_high + Phi_high at the given (w,s)
/// points (sides per the classification) and the stated contact equalities.
/// Throws InequalityViolation when the sandwich fails beyond tol.
PathwiseReport pathwise_inequality_check(const Payoff& F, FmonClass cls,
                                         const CertificateBundle& bundle,
                                         const std::vector<std::pair<double, double>>& points,
                                         double tol = 1e-7);

struct BoundReport {
    Embedding embedding = Embedding::Ay;
    double value = 0.0;      // +inf when the bound diverges
    double error_estimate = 0.0;
    std::string direction;   // "sup" | "inf" | "equal"
    FmonClass classification = FmonClass::Neither;
    std::vector<std::string> notes;
};

/// Extremal value of E[F(W_tau, S_tau)] attained by the AY or Perkins
/// embedding of m. Throws UnclassifiedPayoff when F is neither F-MON up nor
/// down (no extremality statement applies).
BoundReport bound_terminal(const Payoff& F, const TargetMeasure& m, Embedding which,
                           double tol = 1e-9);

/// Extremal value of E[int_0^tau g(S_u) du] via G(w,s) = (s-w)^2 g(s); the
/// sup/inf labelling follows the running-cost theorem (increasing g: AY is
/// the inf; decreasing g: AY is the sup).
BoundReport bound_running(const RunningCost& g, const TargetMeasure& m, Embedding which,
                          double tol = 1e-9);

}  // namespace sep
