#include "sep/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sep/errors.hpp"

namespace sep::num {

namespace {

struct SimpsonState {
    const Fn* f;
    double tol;
    int max_depth;
    double err_accum = 0.0;
    long evals = 0;
    long budget = 4'000'000;

    double eval(double x) {
        ++evals;
        return (*f)(x);
    }

    double rec(double a, double b, double fa, double fm, double fb, double whole, int depth) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = eval(lm);
        const double frm = eval(rm);
        const double h = b - a;
        const double left = h / 12.0 * (fa + 4.0 * flm + fm);
        const double right = h / 12.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        // the width floor stops subdivision once roundoff jitter in the
        // integrand dominates; the budget bounds pathological cases outright
        const bool stop = depth <= 0 || std::abs(delta) <= 15.0 * tol ||
                          h <= 1e-13 * (1.0 + std::abs(a) + std::abs(b)) || evals > budget;
        if (stop) {
            err_accum += std::abs(delta) / 15.0;
            return left + right + delta / 15.0;
        }
        const double saved = tol;
        tol = saved * 0.5;
        const double vl = rec(a, m, fa, flm, fm, left, depth - 1);
        const double vr = rec(m, b, fm, frm, fb, right, depth - 1);
        tol = saved;
        return vl + vr;
    }
};

double simpson_once(const Fn& f, double a, double b, double tol, int max_depth, double& err,
                    long budget = 4'000'000) {
    if (!(b > a)) {
        err = 0.0;
        return 0.0;
    }
    SimpsonState st{&f, tol, max_depth};
    st.budget = budget;
    const double fa = st.eval(a);
    const double fb = st.eval(b);
    const double m = 0.5 * (a + b);
    const double fm = st.eval(m);
    if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm))
        throw QuadratureFailureError("non-finite integrand value on [" + std::to_string(a) + "," +
                                     std::to_string(b) + "]");
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double v = st.rec(a, b, fa, fm, fb, whole, max_depth);
    err = st.err_accum;
    return v;
}

}  // namespace

QuadResult integrate(const Fn& f, double a, double b, double tol, int max_depth) {
    QuadResult r;
    if (b <= a) return r;
    r.value = simpson_once(f, a, b, tol, max_depth, r.error);
    return r;
}

QuadResult integrate_with_knots(const Fn& f, double a, double b, std::vector<double> knots,
                                double tol, int max_depth, long budget) {
    QuadResult r;
    if (b <= a) return r;
    knots.push_back(a);
    knots.push_back(b);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::remove_if(knots.begin(), knots.end(),
                               [&](double x) { return x < a || x > b || !std::isfinite(x); }),
                knots.end());
    knots.erase(std::unique(knots.begin(), knots.end(),
                            [](double x, double y) { return std::abs(x - y) < 1e-14; }),
                knots.end());
    const double per = tol / static_cast<double>(std::max<std::size_t>(1, knots.size() - 1));
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        double e = 0.0;
        r.value += simpson_once(f, knots[i], knots[i + 1], per, max_depth, e, budget);
        r.error += e;
    }
    return r;
}

QuadResult integrate_improper(const Fn& f, double a, double b, double tol,
                              std::vector<double> knots, bool singular_left,
                              bool singular_right) {
    QuadResult r;
    if (b <= a) return r;
    const double span = b - a;
    const double dl = singular_left ? 0.125 * span : 0.0;
    const double dr = singular_right ? 0.125 * span : 0.0;

    // interior part
    {
        QuadResult mid = integrate_with_knots(f, a + dl, b - dr, std::move(knots), tol);
        r.value += mid.value;
        r.error += mid.error;
    }

    // resolve an endpoint by geometric slices; decide divergence from the
    // decay of slice contributions
    auto endpoint = [&](bool left) {
        double delta = 0.125 * span;
        double prev = std::numeric_limits<double>::quiet_NaN();
        int flat = 0;
        for (int k = 0; k < 60; ++k) {
            const double hi = delta;
            const double lo = 0.5 * delta;
            double e = 0.0;
            const double lo_x = left ? a + lo : b - hi;
            const double hi_x = left ? a + hi : b - lo;
            const double piece = simpson_once(f, lo_x, hi_x, tol * 0.05, 48, e, 20'000);
            r.value += piece;
            r.error += e;
            const double ap = std::abs(piece);
            if (ap < tol * 0.01 && k > 3) return;  // converged
            if (std::isfinite(prev)) {
                const double ratio = prev > 0 ? ap / prev : 0.0;
                if (ratio >= 0.999) {
                    if (++flat >= 6) {  // non-decaying slices: divergent (log or worse)
                        r.divergent = true;
                        return;
                    }
                } else if (ratio > 0.0 && ratio < 0.95 && k > 45) {
                    // geometric decay: extrapolate the unresolved tail
                    r.value += piece * ratio / (1.0 - ratio);
                    r.error += std::abs(piece * ratio / (1.0 - ratio));
                    return;
                }
            }
            prev = ap;
            delta = lo;
        }
    };

    if (singular_left) endpoint(true);
    if (singular_right) endpoint(false);
    return r;
}

QuadResult integrate_to_inf(const Fn& f, double a, double tol) {
    // w = a + t/(1-t), dw = dt/(1-t)^2
    Fn g = [&](double t) {
        const double om = 1.0 - t;
        const double w = a + t / om;
        return f(w) / (om * om);
    };
    // the substitution is singular at t=1; treat as improper there
    return integrate_improper(g, 0.0, 1.0, tol, {}, false, true);
}

double bisect_sup_leq(const Fn& h, double lo, double hi, double tol) {
    double flo = h(lo);
    if (flo > 0.0) return lo;  // caller guarantees h(lo) <= 0; be forgiving
    for (int i = 0; i < 200 && hi - lo > tol; ++i) {
        const double m = 0.5 * (lo + hi);
        if (h(m) <= 0.0)
            lo = m;
        else
            hi = m;
    }
    return lo;
}

double bisect_inf_leq(const Fn& k, double lo, double hi, double tol) {
    for (int i = 0; i < 200 && hi - lo > tol; ++i) {
        const double m = 0.5 * (lo + hi);
        if (k(m) <= 0.0)
            hi = m;
        else
            lo = m;
    }
    return hi;
}

double bisect_monotone(const Fn& f, double target, double lo, double hi, double tol) {
    double flo = f(lo) - target;
    double fhi = f(hi) - target;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    const bool increasing = fhi > flo;
    for (int i = 0; i < 200 && hi - lo > tol; ++i) {
        const double m = 0.5 * (lo + hi);
        const double fm = f(m) - target;
        if ((fm <= 0.0) == increasing)
            lo = m;
        else
            hi = m;
    }
    return 0.5 * (lo + hi);
}

namespace {

struct LeafBuilder {
    const Fn* f;
    std::vector<double>* x0s;
    std::vector<double>* f0s;
    std::vector<double>* fms;
    std::vector<double>* f1s;
    double err = 0.0;
    long evals = 0;
    long budget = 4'000'000;

    double eval(double x) {
        ++evals;
        const double v = (*f)(x);
        if (!std::isfinite(v))
            throw QuadratureFailureError("non-finite integrand at x = " + std::to_string(x));
        return v;
    }

    void rec(double a, double b, double fa, double fm, double fb, double whole, double tol,
             int depth) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = eval(lm);
        const double frm = eval(rm);
        const double h = b - a;
        const double left = h / 12.0 * (fa + 4.0 * flm + fm);
        const double right = h / 12.0 * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        // quarter-point interpolation residuals bound the error of the
        // stored quadratic model on partial-cell queries
        const double res = std::abs(flm - (3.0 * fa + 6.0 * fm - fb) / 8.0) +
                           std::abs(frm - (-fa + 6.0 * fm + 3.0 * fb) / 8.0);
        const bool stop = depth <= 0 ||
                          (std::abs(delta) <= 15.0 * tol && res * h <= 60.0 * tol) ||
                          h <= 1e-13 * (1.0 + std::abs(a) + std::abs(b)) || evals > budget;
        if (stop) {
            err += std::abs(delta) / 15.0;
            x0s->push_back(a);
            f0s->push_back(fa);
            fms->push_back(flm);
            f1s->push_back(fm);
            x0s->push_back(m);
            f0s->push_back(fm);
            fms->push_back(frm);
            f1s->push_back(fb);
            return;
        }
        rec(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
        rec(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
};

}  // namespace

CumulativeIntegral::CumulativeIntegral(Fn f, double a, double b, std::vector<double> knots,
                                       double tol) : a_(a), b_(b) {
    knots.push_back(a);
    knots.push_back(b);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::remove_if(knots.begin(), knots.end(),
                               [&](double x) { return x < a || x > b || !std::isfinite(x); }),
                knots.end());
    knots.erase(std::unique(knots.begin(), knots.end(),
                            [](double x, double y) { return std::abs(x - y) < 1e-14; }),
                knots.end());
    if (knots.size() < 2) knots = {a, b};

    std::vector<double> x0s;
    LeafBuilder lb{&f, &x0s, &flo_, &fmid_, &fhi_, 0.0, 0, 4'000'000};
    const double per = tol / static_cast<double>(knots.size() - 1);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double lo = knots[i], hi = knots[i + 1];
        if (!(hi > lo)) continue;
        const double fa = lb.eval(lo);
        const double fb = lb.eval(hi);
        const double fm = lb.eval(0.5 * (lo + hi));
        const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        lb.rec(lo, hi, fa, fm, fb, whole, per, 44);
    }
    err_ = lb.err;

    const std::size_t n = x0s.size();
    nodes_.resize(n + 1);
    for (std::size_t i = 0; i < n; ++i) nodes_[i] = x0s[i];
    nodes_[n] = b;
    cum_.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double h = nodes_[i + 1] - nodes_[i];
        cum_[i + 1] = cum_[i] + h / 6.0 * (flo_[i] + 4.0 * fmid_[i] + fhi_[i]);
    }
}

double CumulativeIntegral::operator()(double s) const {
    if (cum_.empty() || s <= a_) return 0.0;
    if (s >= b_) return total();
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), s);
    std::size_t j = static_cast<std::size_t>(it - nodes_.begin());
    j = (j == 0) ? 0 : j - 1;
    if (j >= cum_.size() - 1) return total();
    const double h = nodes_[j + 1] - nodes_[j];
    const double t = (s - nodes_[j]) / h;
    // quadratic model through the stored leaf samples
    const double A = flo_[j];
    const double B = -3.0 * flo_[j] + 4.0 * fmid_[j] - fhi_[j];
    const double C = 2.0 * flo_[j] - 4.0 * fmid_[j] + 2.0 * fhi_[j];
    return cum_[j] + h * (A * t + 0.5 * B * t * t + C * t * t * t / 3.0);
}

}  // namespace sep::num
