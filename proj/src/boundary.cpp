#include "sep/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sep {

namespace {

double root_tol(double s) { return 1e-13 * (1.0 + std::abs(s)); }

/// leftmost y < 0 with k(y) = C(s) - P(y) - P'(y)(s-y) <= 0 (k is nonincreasing
/// in y). This is the largest-slope tangency from (s, C(s)) to the put curve,
/// resolved to the largest modulus across flat tangency stretches.
double alpha_plus_impl(const TargetMeasure& m, double s) {
    if (!(s > 0.0)) s = std::max(1e-14, 1e-14 * std::abs(m.support_hi()));
    const double xhat = m.support_hi();
    if (std::isfinite(xhat) && s >= xhat) {
        // degenerate tangent from (xhat, 0): pinned at the bottom of the
        // support, which for a measure unbounded below is -inf
        if (!std::isfinite(m.support_lo())) return -std::numeric_limits<double>::infinity();
        s = xhat;
    }

    const double cs = m.call(s);
    auto k_right = [&](double y) { return cs - m.put(y) - m.put_dplus(y) * (s - y); };
    auto k_left = [&](double y) { return cs - m.put(y) - m.put_dminus(y) * (s - y); };

    double anchor;
    if (std::isfinite(m.support_lo())) {
        anchor = std::min(m.support_lo(), 0.0);
    } else {
        anchor = -1.0;
        while (k_right(anchor) <= 0.0) anchor *= 2.0;
    }
    if (k_right(anchor) <= 0.0) return anchor;  // tangency pinned at the bottom of the support

    const std::vector<double>& kinks = m.kinks();
    std::vector<double> neg;
    for (double k : kinks)
        if (k > anchor && k < 0.0) neg.push_back(k);

    // first kink with k_right <= 0 (k_right over kinks is nonincreasing)
    std::size_t lo = 0, hi = neg.size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (k_right(neg[mid]) <= 0.0)
            hi = mid;
        else
            lo = mid + 1;
    }
    const double left = (lo == 0) ? anchor : neg[lo - 1];  // k_right(left) > 0
    if (lo < neg.size()) {
        const double right = neg[lo];  // k_right(right) <= 0
        // if k is still nonnegative from the left, the boundary is the kink itself
        if (k_left(right) >= 0.0) return right;
        return num::bisect_inf_leq(k_right, left, right, root_tol(s));
    }
    // no kink qualifies: the root lies between the last kink and 0
    return num::bisect_inf_leq(k_right, left, 0.0, root_tol(s));
}

/// inverse of alpha_plus solved directly: a+(w) is the s where the tangent to
/// P at w meets the call curve, i.e. the root of
///   g(s) = C(s) - P(w) - P'(w+)(s - w)   (nonincreasing in s).
/// At a flat stretch of alpha_plus this lands on the jump location, which is
/// the inverse convention; xi is insensitive to the choice there.
double a_plus_impl(const TargetMeasure& m, double w) {
    if (w >= 0.0) return 0.0;
    const double xlo = m.support_lo();
    if (std::isfinite(xlo) && w < xlo) w = xlo;
    const double pw = m.put(w);
    const double dpw = m.put_dplus(w);
    if (dpw <= 0.0) return std::numeric_limits<double>::infinity();  // no mass at or below w
    auto g = [&](double s) { return m.call(s) - pw - dpw * (s - w); };
    if (g(0.0) <= 0.0) return 0.0;  // no mass strictly between w and 0
    double hi;
    if (std::isfinite(m.support_hi())) {
        hi = m.support_hi();
    } else {
        hi = 1.0;
        while (g(hi) > 0.0) hi *= 2.0;
    }
    return num::bisect_inf_leq(g, 0.0, hi, root_tol(hi));
}

}  // namespace

AyBoundary::AyBoundary(TargetMeasure m) : m_(std::move(m)) {}

AyBoundary ay_boundary(const TargetMeasure& m) { return AyBoundary(m); }

double AyBoundary::beta(double s) const {
    const double xhat = m_.support_hi();
    if (s >= xhat) return s;
    if (s < 0.0) s = 0.0;

    // h(y) = C(y) + C'(y)(s-y) is nondecreasing; beta(s) = sup{y < s : h <= 0}
    auto h_minus = [&](double y) { return m_.call(y) + m_.call_dminus(y) * (s - y); };
    auto h_plus = [&](double y) { return m_.call(y) + m_.call_dplus(y) * (s - y); };

    const std::vector<double>& kinks = m_.kinks();
    const std::size_t nk = static_cast<std::size_t>(
        std::lower_bound(kinks.begin(), kinks.end(), s) - kinks.begin());

    double anchor;
    if (std::isfinite(m_.support_lo())) {
        anchor = m_.support_lo();
    } else {
        anchor = nk > 0 ? std::min(kinks[0], 0.0) : std::min(0.0, s);
        while (h_minus(anchor) > 0.0) anchor = 2.0 * anchor - std::abs(s) - 1.0;
    }

    // largest kink with h_minus <= 0 (h_minus over kinks is nondecreasing)
    std::size_t lo = 0, hi = nk;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (h_minus(kinks[mid]) <= 0.0)
            lo = mid + 1;
        else
            hi = mid;
    }
    const double last = (lo > 0) ? std::max(anchor, kinks[lo - 1]) : anchor;
    if (h_plus(last) > 0.0) return last;  // objective rises immediately: kink is the argmin
    const double next = std::min((lo < nk) ? kinks[lo] : s, s);
    if (h_minus(next) <= 0.0) return next;  // flat or negative across the whole segment
    return num::bisect_sup_leq(h_minus, last, next, root_tol(s));
}

std::vector<double> AyBoundary::boundary_kinks(double s_max) const {
    std::vector<double> out;
    for (double k : m_.kinks()) {
        if (k >= m_.support_hi()) continue;
        const double c = m_.call(k);
        const double t0 = m_.tail_ge(k), t1 = m_.tail_gt(k);
        if (t0 > 0.0) out.push_back(k + c / t0);
        if (t1 > 0.0) out.push_back(k + c / t1);  // right limit when an atom sits at k
    }
    std::sort(out.begin(), out.end());
    out.erase(std::remove_if(out.begin(), out.end(),
                             [&](double v) { return !(v > 0.0) || v > s_max; }),
              out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

PerkinsBoundary::PerkinsBoundary(TargetMeasure m)
    : m_(std::move(m)), refl_(m_.reflected()), zero_mass_(m_.mass_at_zero()) {}

PerkinsBoundary perkins_boundary(const TargetMeasure& m) { return PerkinsBoundary(m); }

double PerkinsBoundary::alpha_plus(double s) const { return alpha_plus_impl(m_, s); }

double PerkinsBoundary::alpha_minus(double i) const {
    return -alpha_plus_impl(refl_, i < 0.0 ? -i : 0.0);
}

double PerkinsBoundary::a_plus(double w) const { return a_plus_impl(m_, w); }

double PerkinsBoundary::a_minus(double w) const {
    if (w <= 0.0) return 0.0;
    return -a_plus_impl(refl_, -w);
}

std::vector<double> PerkinsBoundary::boundary_kinks(double s_max) const {
    std::vector<double> out;
    for (double k : m_.kinks()) {
        if (k >= 0.0) break;
        const double s = a_plus_impl(m_, k);
        if (s > 0.0 && s < s_max) out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

/// L(s) = int_0^s dr/(r - bnd(r)) split at sqrt-substituted head so the
/// generic sqrt-type contact of alpha_plus at r=0 stays bounded.
struct LogSurvival {
    num::CumulativeIntegral head;  // u = sqrt(r) coordinates on [0, sqrt(split)]
    num::CumulativeIntegral tail;  // r coordinates on [split, s_max]
    double split = 0.0;
    bool has_tail = false;

    double operator()(double s) const {
        if (s <= 0.0) return 0.0;
        if (s <= split || !has_tail) return head(std::sqrt(s));
        return head.total() + tail(s);
    }
};

LogSurvival make_log_survival(std::function<double(double)> raw_bnd, std::vector<double> knots,
                              double s_max, double tol, double xhat) {
    // at the exact top of the support the boundary convention flips to the
    // diagonal; the excursion integrand wants the left limit there
    auto bnd = [raw_bnd, xhat](double r) {
        if (r >= xhat) r = xhat - 1e-12 * (1.0 + std::abs(xhat));
        return raw_bnd(r);
    };
    LogSurvival ls;
    ls.split = std::min(0.25, 0.5 * s_max);
    std::vector<double> head_knots, tail_knots;
    for (double k : knots) {
        if (k <= 0.0 || k >= s_max) continue;
        if (k < ls.split)
            head_knots.push_back(std::sqrt(k));
        else if (k > ls.split)
            tail_knots.push_back(k);
    }
    // below u0 the tangency residual is pure roundoff; the integrand is
    // continuous there, so a one-term sliver closes the gap
    const double u0 = 1e-6;
    auto integrand = [bnd](double u) {
        const double r = u * u;
        const double d = r - bnd(r);
        return d > 0.0 ? 2.0 * u / d : 0.0;
    };
    const double sliver = integrand(u0) * u0;
    ls.head = num::CumulativeIntegral(
        [integrand, u0, sliver](double u) { return u <= u0 ? sliver / u0 : integrand(u); },
        0.0, std::sqrt(ls.split), std::move(head_knots), 0.5 * tol);
    if (s_max > ls.split) {
        ls.tail = num::CumulativeIntegral([bnd](double r) { return 1.0 / (r - bnd(r)); },
                                          ls.split, s_max, std::move(tail_knots), 0.5 * tol);
        ls.has_tail = true;
    }
    return ls;
}

}  // namespace

double max_survival(const AyBoundary& bd, double s, double tol) {
    if (s <= 0.0) return 1.0;
    const double xhat = bd.support_hi();
    if (s > xhat) throw NonIntegrableBoundaryError(s);
    if (s == xhat && bd.measure().atom_at(xhat) == 0.0) return 0.0;
    auto ls = make_log_survival([&](double r) { return bd.beta(r); }, bd.boundary_kinks(s), s,
                                tol, xhat);
    const double I = ls(s);
    return I > 700.0 ? 0.0 : std::exp(-I);
}

double max_survival(const PerkinsBoundary& bd, double s, double tol) {
    if (s <= 0.0) return 1.0;
    const double xhat = bd.support_hi();
    if (s > xhat) throw NonIntegrableBoundaryError(s);
    auto ls = make_log_survival([&](double r) { return bd.alpha_plus(r); },
                                bd.boundary_kinks(s), s, tol, xhat);
    const double I = ls(s);
    return I > 700.0 ? 0.0 : std::exp(-I);
}

num::CumulativeIntegral log_survival_integral(const AyBoundary& bd, double s_max, double tol) {
    const double xhat = bd.support_hi();
    return num::CumulativeIntegral(
        [bd, xhat](double r) {
            if (r >= xhat) r = xhat - 1e-12 * (1.0 + std::abs(xhat));
            const double d = r - bd.beta(r);
            return d > 0.0 ? 1.0 / d : 0.0;
        },
        0.0, s_max, bd.boundary_kinks(s_max), tol);
}

num::CumulativeIntegral log_survival_integral(const PerkinsBoundary& bd, double s_max,
                                              double tol) {
    const double xhat = bd.support_hi();
    return num::CumulativeIntegral(
        [bd, xhat](double r) {
            if (r >= xhat) r = xhat - 1e-12 * (1.0 + std::abs(xhat));
            const double d = r - bd.alpha_plus(r);
            return d > 0.0 ? 1.0 / d : 0.0;
        },
        0.0, s_max, bd.boundary_kinks(s_max), tol);
}

double reverse_barycentre(const TargetMeasure& m, double x) { return m.reverse_barycentre(x); }

}  // namespace sep
