#include "sep/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sep {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* to_string(FmonClass c) {
    switch (c) {
        case FmonClass::Up: return "up";
        case FmonClass::Down: return "down";
        case FmonClass::Both: return "both";
        default: return "neither";
    }
}

const char* to_string(Embedding e) { return e == Embedding::Ay ? "ay" : "perkins"; }

// ---------------------------------------------------------------------------
// payoff families

Payoff Payoff::power_drawdown(double c) {
    Payoff p;
    p.f_ = [c](double w, double s) { return std::pow(s - w, c); };
    p.fs_ = [c](double w, double s) { return c * std::pow(s - w, c - 1.0); };
    p.diag_exp_ = c;
    if (c == 0.0 || c == 2.0)
        p.class_ = FmonClass::Both;
    else if (c > 0.0 && c < 2.0)
        p.class_ = FmonClass::Up;
    else
        p.class_ = FmonClass::Down;
    p.name_ = "power-drawdown(c=" + std::to_string(c) + ")";
    return p;
}

Payoff Payoff::drawdown_over_max(double c) {
    Payoff p;
    p.f_ = [c](double w, double s) {
        const double d = s - w;
        return s > 0.0 ? d * d / std::pow(s, c) : (d == 0.0 ? 0.0 : kInf * (c > 0 ? 1.0 : 0.0));
    };
    p.fs_ = [c](double w, double s) {
        const double d = s - w;
        return d * std::pow(s, -c - 1.0) * (2.0 * s - c * d);
    };
    p.diag_exp_ = 2.0;
    p.class_ = c > 0.0 ? FmonClass::Up : (c == 0.0 ? FmonClass::Both : FmonClass::Down);
    p.name_ = "drawdown-over-max(c=" + std::to_string(c) + ")";
    return p;
}

Payoff Payoff::relative_drawdown() {
    Payoff p = drawdown_over_max(2.0);
    p.name_ = "relative-drawdown";
    return p;
}

Payoff Payoff::custom(std::function<double(double, double)> f,
                      std::function<double(double, double)> fs, double diagonal_exponent,
                      std::optional<FmonClass> known_class) {
    Payoff p;
    p.f_ = std::move(f);
    p.fs_ = std::move(fs);
    p.diag_exp_ = diagonal_exponent;
    p.class_ = known_class;
    return p;
}

RunningCost RunningCost::power(double c) {
    RunningCost g;
    g.g_ = [c](double s) { return std::pow(s, -c); };
    g.dg_ = [c](double s) { return -c * std::pow(s, -c - 1.0); };
    g.mono_ = c > 0.0 ? Monotonicity::Decreasing
                      : (c == 0.0 ? Monotonicity::Constant : Monotonicity::Increasing);
    g.vanishes_ = c > 0.0;
    g.name_ = "power(c=" + std::to_string(c) + ")";
    return g;
}

RunningCost RunningCost::shifted_reciprocal(double c) {
    if (!(c > 0.0)) throw ValidationError("shifted reciprocal running cost needs c > 0");
    RunningCost g;
    g.g_ = [c](double s) { return 1.0 / (c + s); };
    g.dg_ = [c](double s) { return -1.0 / ((c + s) * (c + s)); };
    g.mono_ = Monotonicity::Decreasing;
    g.vanishes_ = true;
    g.name_ = "shifted-reciprocal(c=" + std::to_string(c) + ")";
    return g;
}

RunningCost RunningCost::constant(double v) {
    if (!(v >= 0.0)) throw ValidationError("running cost must be nonnegative");
    RunningCost g;
    g.g_ = [v](double) { return v; };
    g.dg_ = [](double) { return 0.0; };
    g.mono_ = Monotonicity::Constant;
    g.vanishes_ = (v == 0.0);
    g.name_ = "constant(" + std::to_string(v) + ")";
    return g;
}

RunningCost RunningCost::custom(std::function<double(double)> g, std::function<double(double)> dg,
                                Monotonicity mono) {
    RunningCost r;
    r.g_ = std::move(g);
    if (dg) {
        r.dg_ = std::move(dg);
    } else {
        auto base = r.g_;
        r.dg_ = [base](double s) {
            const double h = 1e-6 * (1.0 + std::abs(s));
            return (base(s + h) - base(std::max(s - h, 0.0))) /
                   (h + std::min(h, s));
        };
    }
    r.mono_ = mono;
    return r;
}

Payoff RunningCost::to_payoff() const {
    auto g = g_;
    auto dg = dg_;
    FmonClass cls = mono_ == Monotonicity::Increasing
                        ? FmonClass::Down
                        : (mono_ == Monotonicity::Decreasing ? FmonClass::Up : FmonClass::Both);
    Payoff p = Payoff::custom(
        [g](double w, double s) {
            const double d = s - w;
            return d == 0.0 ? 0.0 : d * d * g(s);
        },
        [g, dg](double w, double s) {
            const double d = s - w;
            return 2.0 * d * g(s) + d * d * dg(s);
        },
        2.0, cls);
    return p;
}

// ---------------------------------------------------------------------------
// classification

namespace {

double upper_scale(const TargetMeasure& m) {
    const double xhat = m.support_hi();
    if (std::isfinite(xhat)) return xhat;
    double s = std::max(1.0, 2.0 * m.first_abs_moment());
    for (int i = 0; i < 60 && m.tail_ge(s) > 1e-3; ++i) s *= 2.0;
    return s;
}

}  // namespace

FmonClass classify_fmon(const Payoff& F, double w_lo, double w_hi, double s_lo, double s_hi,
                        int grid, bool force_numeric) {
    if (!force_numeric && F.analytic_class()) return *F.analytic_class();
    bool can_up = true, can_down = true;
    for (int i = 1; i <= grid; ++i) {
        const double s = s_lo + (s_hi - s_lo) * i / grid;
        if (!(s > 0.0)) continue;
        const double w_top = std::min(w_hi, s - 1e-5 * (1.0 + std::abs(s)));
        if (w_top <= w_lo) continue;
        double prev = 0.0;
        bool first = true;
        double scale = 0.0;
        for (int j = 0; j <= grid; ++j) {
            const double w = w_lo + (w_top - w_lo) * j / grid;
            const double phi = F.ds(w, s) / (s - w);
            if (!std::isfinite(phi)) continue;
            scale = std::max(scale, std::abs(phi));
            if (!first) {
                const double slack = 1e-10 * (1.0 + scale);
                if (phi < prev - slack) can_up = false;
                if (phi > prev + slack) can_down = false;
            }
            prev = phi;
            first = false;
        }
        if (!can_up && !can_down) return FmonClass::Neither;
    }
    if (can_up && can_down) return FmonClass::Both;
    return can_up ? FmonClass::Up : FmonClass::Down;
}

FmonClass classify_fmon(const Payoff& F, const TargetMeasure& m, int grid, bool force_numeric) {
    const double hi = upper_scale(m);
    const double lo = std::isfinite(m.support_lo()) ? m.support_lo() : -hi;
    return classify_fmon(F, lo, hi, 1e-4 * hi, hi, grid, force_numeric);
}

// ---------------------------------------------------------------------------
// certificate

struct Certificate::Impl {
    Payoff F = Payoff::power_drawdown(1.0);
    std::function<double(double)> eta;   // boundary r -> eta(r)
    std::function<double(double)> mate;  // w -> b(w) or abar(w)
    std::vector<double> knots;           // kinks of eta in r-space
    double s_cap = 0.0;
    double xhat = 0.0;
    double tol = 1e-8;
    double u0 = 1e-6;
    double split = 0.25;
    num::CumulativeIntegral head0, head1;  // u-substituted on [0, sqrt(split)]
    num::CumulativeIntegral tail0, tail1;  // plain on [split, s_cap]
    bool has_tail = false;

    double lambda(double r) const {
        const double rr = std::min(r, xhat - 1e-13 * (1.0 + std::abs(xhat)));
        const double e = eta(rr);
        const double d = rr - e;
        return d > 0.0 ? F.ds(e, rr) / d : 0.0;
    }

    void build() {
        split = std::min(0.25, 0.5 * s_cap);
        // integrability probe at the origin: local exponent of |lambda|
        {
            const double r1 = 1e-7, r2 = 1e-5;
            const double l1 = std::abs(lambda(r1)), l2 = std::abs(lambda(r2));
            if (l1 > 0.0 && l2 > 0.0) {
                const double p = std::log(l1 / l2) / std::log(r1 / r2);
                if (p <= -0.98)
                    throw NonIntegrableCertificateError(
                        "lambda ~ r^" + std::to_string(p) + " near the origin");
            }
        }
        std::vector<double> hk, tk;
        for (double k : knots) {
            if (k <= 0.0 || k >= s_cap) continue;
            if (k < split)
                hk.push_back(std::sqrt(k));
            else if (k > split)
                tk.push_back(k);
        }
        auto mk_head = [&](int moment) {
            auto lam = [this, moment](double u) {
                const double r = u * u;
                const double v = 2.0 * u * lambda(r);
                return moment == 0 ? v : v * r;
            };
            const double base = lam(u0);
            return num::CumulativeIntegral(
                [lam, base, this](double u) { return u <= u0 ? base : lam(u); }, 0.0,
                std::sqrt(split), hk, 0.5 * tol);
        };
        head0 = mk_head(0);
        head1 = mk_head(1);
        if (s_cap > split) {
            tail0 = num::CumulativeIntegral([this](double r) { return lambda(r); }, split,
                                            s_cap, tk, 0.5 * tol);
            tail1 = num::CumulativeIntegral([this](double r) { return r * lambda(r); }, split,
                                            s_cap, tk, 0.5 * tol);
            has_tail = true;
        }
        if (!std::isfinite(head0.total()) || (has_tail && !std::isfinite(tail0.total())))
            throw NonIntegrableCertificateError("Lambda is unbounded on the support");
    }

    double cum(int moment, double s) const {
        const auto& head = moment == 0 ? head0 : head1;
        const auto& tail = moment == 0 ? tail0 : tail1;
        if (s <= 0.0) return 0.0;
        double v;
        if (s <= split || !has_tail)
            v = head(std::sqrt(std::min(s, s_cap)));
        else
            v = head.total() + tail(std::min(s, s_cap));
        if (s > s_cap) {
            // rare beyond-cap extension, uncached
            auto f = [this, moment](double r) {
                return moment == 0 ? lambda(r) : r * lambda(r);
            };
            v += num::integrate_with_knots(f, s_cap, s, knots, tol, 50, 100'000).value;
        }
        return v;
    }
};

double Certificate::lambda(double r) const { return impl_->lambda(r); }
double Certificate::Lambda(double s) const { return impl_->cum(0, s); }
double Certificate::Lambda1(double s) const { return impl_->cum(1, s); }

double Certificate::xi(double w) const {
    const double s = impl_->mate(w);
    return impl_->F(w, s) - Phi(w, s);
}

Certificate certificate(const Payoff& F, const AyBoundary& bd, double tol) {
    const TargetMeasure& m = bd.measure();
    auto impl = std::make_shared<Certificate::Impl>();
    impl->F = F;
    impl->xhat = m.support_hi();
    impl->tol = tol;
    // with no atom at the top, lambda blows up as r -> xhat (logarithmic
    // Lambda); cache strictly inside and extend on demand for the last sliver
    if (std::isfinite(impl->xhat))
        impl->s_cap = m.atom_at(impl->xhat) > 0.0 ? impl->xhat : impl->xhat * (1.0 - 1e-3);
    else
        impl->s_cap = std::max(1.0, 8.0 * m.first_abs_moment());
    AyBoundary copy = bd;
    impl->eta = [copy](double r) { return copy.beta(r); };
    TargetMeasure mc = m;
    impl->mate = [mc](double w) { return mc.barycentre(w); };
    impl->knots = bd.boundary_kinks(impl->s_cap);
    impl->build();
    Certificate c;
    c.impl_ = impl;
    c.side_ = Embedding::Ay;
    c.tol_ = tol;
    return c;
}

Certificate certificate(const Payoff& F, const PerkinsBoundary& bd, double tol) {
    const TargetMeasure& m = bd.measure();
    auto impl = std::make_shared<Certificate::Impl>();
    impl->F = F;
    impl->xhat = m.support_hi();
    impl->tol = tol;
    if (std::isfinite(impl->xhat))
        impl->s_cap = m.atom_at(impl->xhat) > 0.0 ? impl->xhat : impl->xhat * (1.0 - 1e-3);
    else
        impl->s_cap = std::max(1.0, 8.0 * m.first_abs_moment());
    PerkinsBoundary copy = bd;
    impl->eta = [copy](double r) { return copy.alpha_plus(r); };
    impl->mate = [copy](double w) { return copy.abar(w); };
    impl->knots = bd.boundary_kinks(impl->s_cap);
    impl->build();
    Certificate c;
    c.impl_ = impl;
    c.side_ = Embedding::Perkins;
    c.tol_ = tol;
    return c;
}

CertificateBundle certificate_bundle(const Payoff& F, const AyBoundary& ay,
                                     const PerkinsBoundary& pk, double tol) {
    return {certificate(F, ay, tol), certificate(F, pk, tol)};
}

PathwiseReport pathwise_inequality_check(const Payoff& F, FmonClass cls,
                                         const CertificateBundle& bundle,
                                         const std::vector<std::pair<double, double>>& points,
                                         double tol) {
    if (cls == FmonClass::Neither) throw UnclassifiedPayoffError();
    const bool up = (cls == FmonClass::Up || cls == FmonClass::Both);
    const Certificate& upper = up ? bundle.beta : bundle.alpha_plus;
    const Certificate& lower = up ? bundle.alpha_plus : bundle.beta;

    PathwiseReport rep;
    rep.worst_slack_low = kInf;
    rep.worst_slack_high = kInf;
    for (const auto& [w, s] : points) {
        if (!(w <= s) || s < 0.0) continue;
        const double f = F(w, s);
        const double hi = upper.xi(w) + upper.Phi(w, s);
        const double lo = lower.xi(w) + lower.Phi(w, s);
        const double slack_high = hi - f;
        const double slack_low = f - lo;
        ++rep.checked;
        if (slack_high < rep.worst_slack_high) {
            rep.worst_slack_high = slack_high;
            if (slack_high < rep.worst_slack_low) rep.worst_point = {w, s};
        }
        if (slack_low < rep.worst_slack_low) {
            rep.worst_slack_low = slack_low;
            rep.worst_point = {w, s};
        }
        if (slack_high < -tol || slack_low < -tol)
            throw InequalityViolationError(w, s, std::min(slack_high, slack_low));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// bound computation

namespace {

std::string direction_label(FmonClass cls, Embedding which) {
    switch (cls) {
        case FmonClass::Both: return "equal";
        case FmonClass::Up: return which == Embedding::Ay ? "sup" : "inf";
        case FmonClass::Down: return which == Embedding::Ay ? "inf" : "sup";
        default: return "unknown";
    }
}

struct Acc {
    double value = 0.0;
    double error = 0.0;
    bool divergent = false;

    void add(const num::QuadResult& q) {
        value += q.value;
        error += q.error;
        divergent |= q.divergent;
    }
};

/// integral of fw over one density piece (cells have constant density);
/// endpoints of the whole piece are treated as potentially singular
void integrate_piece(Acc& acc, const TargetMeasure& m, std::size_t piece_index,
                     const std::function<double(double)>& fw, double tol, double clip_lo,
                     double clip_hi) {
    const DensityPiece& p = m.pieces()[piece_index];
    if (p.kind == PieceKind::Pareto) {
        const double lo = std::max(p.lo, clip_lo);
        if (!p.mirrored) {
            auto dens = [&p](double x) {
                const double t = x - p.offset + 2.0 * p.shift;
                return p.mass * 2.0 * p.shift * p.shift / (t * t * t);
            };
            const double mid = std::min(p.offset + 3.0 * p.shift, clip_hi);
            if (mid > lo)
                acc.add(num::integrate_improper([&](double x) { return fw(x) * dens(x); }, lo,
                                                mid, tol, {}, true, false));
            if (!std::isfinite(clip_hi)) {
                acc.add(num::integrate_to_inf([&](double x) { return fw(x) * dens(x); }, mid,
                                              tol));
            } else if (clip_hi > mid) {
                acc.add(num::integrate_improper([&](double x) { return fw(x) * dens(x); }, mid,
                                                clip_hi, tol, {}, false, true));
            }
            return;
        }
        // mirrored pareto: integrate the reflected integrand over the base piece
        auto dens = [&p](double x) {
            const double t = -x - p.offset + 2.0 * p.shift;
            return p.mass * 2.0 * p.shift * p.shift / (t * t * t);
        };
        const double hi = std::min(p.hi, clip_hi);
        const double mid = std::max(-(p.offset + 3.0 * p.shift), clip_lo);
        if (hi > mid)
            acc.add(num::integrate_improper([&](double x) { return fw(x) * dens(x); }, mid, hi,
                                            tol, {}, false, true));
        if (!std::isfinite(clip_lo)) {
            acc.add(num::integrate_to_inf([&](double x) { return fw(-x) * dens(-x); }, -mid,
                                          tol));
        } else if (clip_lo < mid) {
            acc.add(num::integrate_improper([&](double x) { return fw(x) * dens(x); }, clip_lo,
                                            mid, tol, {}, true, false));
        }
        return;
    }
    // uniform / piecewise-linear cdf: constant density per cell
    const auto& kinks = m.kinks();
    (void)kinks;
    std::vector<std::pair<double, double>> cells;  // (lo, hi) with density
    std::vector<double> dens;
    if (p.kind == PieceKind::Uniform) {
        cells.emplace_back(p.lo, p.hi);
        dens.push_back(p.mass / (p.hi - p.lo));
    } else {
        for (std::size_t j = 0; j + 1 < p.knots.size(); ++j) {
            cells.emplace_back(p.knots[j].first, p.knots[j + 1].first);
            dens.push_back(p.mass * (p.knots[j + 1].second - p.knots[j].second) /
                           (p.knots[j + 1].first - p.knots[j].first));
        }
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
        double lo = std::max(cells[j].first, clip_lo);
        double hi = std::min(cells[j].second, clip_hi);
        if (hi <= lo || dens[j] == 0.0) continue;
        const bool sing_lo = (lo == p.lo) || (lo == clip_lo);
        const bool sing_hi = (hi == p.hi) || (hi == clip_hi);
        const double d = dens[j];
        acc.add(num::integrate_improper([&, d](double x) { return fw(x) * d; }, lo, hi, tol, {},
                                        sing_lo, sing_hi));
    }
}

void integrate_measure_density(Acc& acc, const TargetMeasure& m,
                               const std::function<double(double)>& fw, double tol,
                               double clip_lo = -kInf, double clip_hi = kInf) {
    for (std::size_t i = 0; i < m.pieces().size(); ++i)
        integrate_piece(acc, m, i, fw, tol, clip_lo, clip_hi);
}

/// AY value for a measure with atoms, through the law of the maximum:
/// E[F] = int F(beta(s), s) q(s) ds + Q(xhat) F(xhat, xhat),
/// q(s) = Q(s)/(s - beta(s)), Q(s) = exp(-int_0^s dr/(r - beta(r))).
double ay_value_maxlaw(const Payoff& F, const TargetMeasure& m, Acc& acc, double tol,
                       std::vector<std::string>& notes) {
    AyBoundary bd = ay_boundary(m);
    const double xhat = m.support_hi();
    const double p_top = std::isfinite(xhat) ? m.atom_at(xhat) : 0.0;

    double s_hi;
    if (p_top > 0.0) {
        s_hi = xhat;
    } else if (std::isfinite(xhat)) {
        // approach the top until the survival factor is negligible
        double delta = 0.25 * (xhat - 0.0);
        s_hi = xhat - delta;
        for (int k = 0; k < 50; ++k) {
            auto L = log_survival_integral(bd, s_hi, 1e-8);
            if (L.total() > 45.0) break;
            delta *= 0.5;
            s_hi = xhat - delta;
        }
    } else {
        s_hi = std::max(1.0, 4.0 * m.first_abs_moment());
        for (int k = 0; k < 60; ++k) {
            auto L = log_survival_integral(bd, s_hi, 1e-8);
            if (L.total() > 45.0) break;
            s_hi *= 2.0;
        }
    }

    auto L = log_survival_integral(bd, s_hi, tol);
    auto integrand = [&](double s) {
        const double b = bd.beta(std::min(s, xhat - 1e-13 * (1.0 + std::abs(xhat))));
        const double d = s - b;
        if (!(d > 0.0)) return 0.0;
        const double Ls = L(s);
        const double q = Ls > 700.0 ? 0.0 : std::exp(-Ls) / d;
        return F(b, s) * q;
    };
    acc.add(num::integrate_with_knots(integrand, 0.0, s_hi, bd.boundary_kinks(s_hi), tol));
    if (p_top > 0.0) {
        const double q_top = std::exp(-L(xhat));
        acc.value += q_top * F(xhat, xhat);
        notes.push_back("atomic measure: value taken through the law of the maximum");
    } else {
        acc.error += 1e-18;  // exp(-45) tail
        notes.push_back("atomic measure: survival truncated at exp(-45)");
    }
    return acc.value;
}

double atoms_value(const TargetMeasure& m, const std::function<double(double)>& fw) {
    double v = 0.0;
    for (const Atom& a : m.atoms()) v += a.p * fw(a.x);
    return v;
}

BoundReport bound_with_class(const Payoff& F, const TargetMeasure& m, Embedding which,
                             FmonClass cls, double tol, std::vector<std::string> notes) {
    BoundReport rep;
    rep.embedding = which;
    rep.classification = cls;
    rep.direction = direction_label(cls, which);
    rep.notes = std::move(notes);

    const double e = F.diagonal_exponent();
    const double xhat = m.support_hi();

    if (which == Embedding::Perkins && e < 0.0 && m.tail_gt(0.0) > 0.0) {
        rep.value = kInf;
        rep.notes.push_back(
            "payoff is infinite on the diagonal and the Perkins embedding stops at w = s "
            "with positive probability");
        return rep;
    }
    if (which == Embedding::Ay && e < 0.0 && std::isfinite(xhat) && m.atom_at(xhat) > 0.0) {
        rep.value = kInf;
        rep.notes.push_back("payoff is infinite at the top-of-support contact w = s = xhat");
        return rep;
    }

    Acc acc;
    if (which == Embedding::Ay) {
        if (m.has_atoms()) {
            ay_value_maxlaw(F, m, acc, tol, rep.notes);
        } else {
            AyBoundary bd = ay_boundary(m);
            auto fw = [&](double w) { return F(w, bd.barycentre(w)); };
            integrate_measure_density(acc, m, fw, tol);
        }
    } else {
        if (m.has_atoms()) {
            PerkinsBoundary bd = perkins_boundary(m);
            Certificate cert = certificate(F, bd, tol);
            auto fw = [&](double w) { return cert.xi(w); };
            acc.value += atoms_value(m, fw);
            integrate_measure_density(acc, m, fw, tol);
            rep.notes.push_back("atomic measure: value taken through the certificate xi");
        } else {
            PerkinsBoundary bd = perkins_boundary(m);
            auto fw_down = [&](double w) { return F(w, bd.a_plus(w)); };
            auto fw_up = [&](double w) { return F(w, w); };
            integrate_measure_density(acc, m, fw_down, tol, -kInf, 0.0);
            integrate_measure_density(acc, m, fw_up, tol, 0.0, kInf);
        }
    }

    if (acc.divergent || !std::isfinite(acc.value)) {
        rep.value = kInf;
        rep.error_estimate = 0.0;
        rep.notes.push_back("quadrature detected a divergent value integral");
    } else {
        rep.value = acc.value;
        rep.error_estimate = acc.error;
    }
    return rep;
}

}  // namespace

BoundReport bound_terminal(const Payoff& F, const TargetMeasure& m, Embedding which,
                           double tol) {
    const FmonClass cls = classify_fmon(F, m);
    if (cls == FmonClass::Neither) throw UnclassifiedPayoffError();
    return bound_with_class(F, m, which, cls, tol, {});
}

BoundReport bound_running(const RunningCost& g, const TargetMeasure& m, Embedding which,
                          double tol) {
    const Payoff G = g.to_payoff();
    const FmonClass cls = *G.analytic_class();
    std::vector<std::string> notes;

    // no second moment and g bounded away from zero at infinity: every
    // embedding has infinite expected cost
    if (!std::isfinite(m.variance()) && !g.vanishes_at_infinity()) {
        BoundReport rep;
        rep.embedding = which;
        rep.classification = cls;
        rep.direction = direction_label(cls, which);
        rep.value = kInf;
        rep.notes.push_back(
            "target has no second moment and g does not vanish at infinity: the expected "
            "running cost is infinite for every embedding");
        return rep;
    }
    return bound_with_class(G, m, which, cls, tol, std::move(notes));
}

}  // namespace sep
