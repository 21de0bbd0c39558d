#include "sep/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "sep/rng.hpp"

namespace sep {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// skip barrier-crossing bridge probabilities below exp(-18)
constexpr double kBridgeGuard = 9.0;
// skip within-step extreme exceedance probabilities below exp(-9); a missed
// hair-thin record is re-made by later steps, unlike a missed stop
constexpr double kExtremeGuard = 4.5;
// checkpoint times for the uniform-integrability proxy
const double kCheckpoints[] = {0.05, 0.1, 0.2, 0.5, 1.0, 2.0};
constexpr int kNumCheckpoints = 6;
}  // namespace

const char* to_string(StopCause c) {
    switch (c) {
        case StopCause::AyBoundary: return "ay-boundary";
        case StopCause::AlphaPlus: return "alpha-plus";
        case StopCause::AlphaMinus: return "alpha-minus";
        case StopCause::ZeroAtom: return "zero-atom";
        case StopCause::Truncation: return "truncation";
        default: return "cw-exit";
    }
}

namespace {

/// piecewise-linear cache of a monotone boundary in u = sqrt(s) coordinates
/// (uniform accuracy down to the origin, where the Perkins boundary has a
/// square-root contact); jump locations get explicit double nodes
struct BoundaryGrid {
    std::vector<double> u;
    std::vector<double> v;

    template <typename Eval>
    void build(const Eval& f, double s_max, const std::vector<double>& jump_knots, int n) {
        const double u_max = std::sqrt(std::max(s_max, 1e-30));
        std::vector<double> us;
        us.reserve(static_cast<std::size_t>(n) + 2 * jump_knots.size() + 2);
        for (int k = 0; k <= n; ++k) us.push_back(u_max * k / n);
        for (double sk : jump_knots) {
            if (sk <= 0.0 || sk >= s_max) continue;
            const double uj = std::sqrt(sk);
            us.push_back(uj * (1.0 - 1e-10));
            us.push_back(uj);
        }
        std::sort(us.begin(), us.end());
        us.erase(std::unique(us.begin(), us.end()), us.end());
        u = std::move(us);
        v.resize(u.size());
        for (std::size_t k = 0; k < u.size(); ++k) v[k] = f(u[k] * u[k]);
    }

    double operator()(double s) const {
        const double uu = std::sqrt(s);
        if (uu >= u.back()) return v.back();
        if (uu <= u.front()) return v.front();
        const auto it = std::upper_bound(u.begin(), u.end(), uu);
        const std::size_t j = static_cast<std::size_t>(it - u.begin()) - 1;
        const double f = (uu - u[j]) / (u[j + 1] - u[j]);
        return v[j] * (1.0 - f) + v[j + 1] * f;
    }
};

int resolve_threads(const SimConfig& cfg) {
    if (cfg.threads > 0) return cfg.threads;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

/// samples the within-step maximum of the Brownian bridge between (w0, w1)
/// over dt, conditioned to exceed `base` (call only after the Bernoulli
/// exceedance draw succeeded); base >= max(w0, w1)
inline double sample_bridge_max(double w0, double w1, double dt, double base, double v) {
    const double q = (base - w0) * (base - w1);
    const double K = std::max(q, 0.0) - 0.5 * dt * std::log(v);
    const double d = w1 - w0;
    return 0.5 * ((w0 + w1) + std::sqrt(d * d + 4.0 * K));
}

struct PathAccum {
    double sum_abs_w[kNumCheckpoints] = {0, 0, 0, 0, 0, 0};
    std::int64_t truncated = 0;
};

template <typename Engine>
std::vector<StoppedSample> run_parallel(const SimConfig& cfg, const Engine& engine,
                                        UiProxy* ui) {
    const std::int64_t n = cfg.num_paths;
    if (n < 1) throw ValidationError("num_paths must be >= 1");
    if (!(cfg.dt > 0.0)) throw ValidationError("dt must be positive");
    if (!(cfg.level_cap > 0.0)) throw ValidationError("level_cap must be positive");
    std::vector<StoppedSample> out(static_cast<std::size_t>(n));
    const int nt = resolve_threads(cfg);
    std::vector<PathAccum> accums(static_cast<std::size_t>(nt));
    std::vector<std::thread> threads;
    const std::int64_t chunk = (n + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        const std::int64_t lo = t * chunk;
        const std::int64_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back([&, lo, hi, t] {
            PathAccum& acc = accums[static_cast<std::size_t>(t)];
            for (std::int64_t p = lo; p < hi; ++p) {
                Rng rng(cfg.seed, static_cast<std::uint64_t>(p));
                out[static_cast<std::size_t>(p)] = engine(rng, acc);
            }
        });
    }
    for (auto& th : threads) th.join();

    std::int64_t truncated = 0;
    for (const auto& acc : accums) truncated += acc.truncated;
    if (ui) {
        ui->times.assign(kCheckpoints, kCheckpoints + kNumCheckpoints);
        ui->mean_abs_w.assign(kNumCheckpoints, 0.0);
        for (int k = 0; k < kNumCheckpoints; ++k) {
            double s = 0.0;
            for (const auto& acc : accums) s += acc.sum_abs_w[k];
            ui->mean_abs_w[static_cast<std::size_t>(k)] = s / static_cast<double>(n);
        }
    }
    const double frac = static_cast<double>(truncated) / static_cast<double>(n);
    if (frac > 0.01) throw TruncationDominatesError(frac);
    return out;
}

/// one Euler path against a single lower stopping boundary w <= bar(S)
struct AyEngine {
    const AyBoundary* bd;
    const RunningCost* g;
    const SimConfig* cfg;
    double xhat;
    BoundaryGrid grid;

    StoppedSample operator()(Rng& rng, PathAccum& acc) const {
        const double dt = cfg->dt;
        const bool bridge = cfg->bridge_correction;
        double w = 0.0, smax = 0.0, imin = 0.0, t = 0.0, integral = 0.0;
        double bar = grid(0.0);
        double gval = g ? (*g)(0.0) : 0.0;
        int cp = 0;
        StoppedSample out;
        std::int64_t steps = 0;
        const double sqdt = std::sqrt(dt);
        for (;;) {
            if (++steps > cfg->max_steps_per_path || std::abs(w) >= cfg->level_cap) {
                ++acc.truncated;
                out = {w, smax, imin, t, integral, StopCause::Truncation};
                break;
            }
            const double w1 = w + sqdt * rng.normal();
            double tau_frac = 1.0;
            bool stopped = false;
            double wstop = 0.0;

            // crossing of the frozen lower barrier
            if (w1 <= bar) {
                stopped = true;
                wstop = bar;
                tau_frac = (w - bar) > 0.0 ? (w - bar) / (w - w1) : 0.0;
            } else if (bridge && (w - bar) * (w1 - bar) < kBridgeGuard * dt) {
                const double p = fast_exp_neg(2.0 * (w - bar) * (w1 - bar) / dt);
                if (rng.uniform() < p) {
                    stopped = true;
                    wstop = bar;
                    tau_frac = 0.5;
                }
            }

            if (!stopped) {
                // within-step maximum against the running max
                double base = std::max(smax, std::max(w, w1));
                bool exceeded = w1 > smax;
                if (!exceeded && bridge) {
                    const double q = (smax - w) * (smax - w1);
                    if (q < kExtremeGuard * dt && rng.uniform() < fast_exp_neg(2.0 * q / dt))
                        exceeded = true;
                }
                if (exceeded) {
                    double m = bridge ? sample_bridge_max(w, w1, dt, base, rng.uniform())
                                      : std::max(w1, smax);
                    if (m > smax) {
                        smax = m;
                        if (smax >= xhat) {
                            // the boundary meets the diagonal: stop at the top
                            out = {xhat, xhat, imin, t + 0.5 * dt, integral + 0.5 * dt * gval,
                                   StopCause::AyBoundary};
                            stopped = true;
                            wstop = xhat;
                            goto record;
                        }
                        bar = grid(smax);
                        if (g) gval = (*g)(smax);
                        if (w1 <= bar) {  // the risen barrier caught the endpoint
                            stopped = true;
                            wstop = bar;
                            tau_frac = 0.75;
                        }
                    }
                }
            }

            integral += gval * dt * (stopped ? tau_frac : 1.0);
            t += dt * (stopped ? tau_frac : 1.0);
            if (stopped) {
                imin = std::min(imin, wstop);
                out = {wstop, smax, imin, t, integral, StopCause::AyBoundary};
                break;
            }
            w = w1;
            imin = std::min(imin, w);
            while (cp < kNumCheckpoints && t >= kCheckpoints[cp]) {
                acc.sum_abs_w[cp] += std::abs(w);
                ++cp;
            }
        }
    record:
        while (cp < kNumCheckpoints) {
            acc.sum_abs_w[cp] += std::abs(out.w_tau);
            ++cp;
        }
        return out;
    }
};

/// one path against the Perkins pair: stop when W <= alpha+(S) or W >= alpha-(I)
struct PerkinsEngine {
    const PerkinsBoundary* bd;
    const RunningCost* g;
    const SimConfig* cfg;
    double scale_floor;
    BoundaryGrid grid_dn;  // alpha_plus(s)
    BoundaryGrid grid_up;  // alpha_minus(-s) indexed by |i|

    StoppedSample operator()(Rng& rng, PathAccum& acc) const {
        const double z = rng.uniform();
        if (z <= bd->zero_atom_mass()) {
            StoppedSample out{0.0, 0.0, 0.0, 0.0, 0.0, StopCause::ZeroAtom};
            return out;
        }
        const double dt0 = cfg->dt;
        const double sqdt0 = std::sqrt(dt0);
        const bool bridge = cfg->bridge_correction;
        double w = 0.0, smax = 0.0, imin = 0.0, t = 0.0, integral = 0.0;
        double bar_dn = -kInf, bar_up = kInf;  // armed once the extremes move
        double gval = g ? (*g)(0.0) : 0.0;
        int cp = 0;
        StoppedSample out;
        std::int64_t steps = 0;
        for (;;) {
            if (++steps > cfg->max_steps_per_path || std::abs(w) >= cfg->level_cap) {
                ++acc.truncated;
                out = {w, smax, imin, t, integral, StopCause::Truncation};
                break;
            }
            const double scale = std::max({smax, -imin, scale_floor});
            const double fine = cfg->fine_factor * scale * scale;
            const double dt = fine < dt0 ? fine : dt0;
            const double w1 = w + (fine < dt0 ? std::sqrt(dt) : sqdt0) * rng.normal();

            // One uniform per side drives both the barrier crossing and the
            // within-step extreme: inverting the bridge-extreme law with the
            // same draw keeps the no-crossing record conditioned consistently
            // (the extreme never lands beyond an uncrossed barrier).
            double p_up = 0.0, p_rec_hi = 0.0;
            if (w1 >= bar_up) {
                p_up = 1.0;
            } else if (bridge) {
                const double qb = (bar_up - w) * (bar_up - w1);
                if (qb < kBridgeGuard * dt) p_up = fast_exp_neg(2.0 * qb / dt);
            }
            if (w1 > smax) {
                p_rec_hi = 1.0;
            } else if (bridge) {
                const double qs = (smax - w) * (smax - w1);
                if (qs < kExtremeGuard * dt) p_rec_hi = fast_exp_neg(2.0 * qs / dt);
            }
            double p_dn = 0.0, p_rec_lo = 0.0;
            if (w1 <= bar_dn) {
                p_dn = 1.0;
            } else if (bridge) {
                const double qb = (w - bar_dn) * (w1 - bar_dn);
                if (qb < kBridgeGuard * dt) p_dn = fast_exp_neg(2.0 * qb / dt);
            }
            if (w1 < imin) {
                p_rec_lo = 1.0;
            } else if (bridge) {
                const double qi = (w - imin) * (w1 - imin);
                if (qi < kExtremeGuard * dt) p_rec_lo = fast_exp_neg(2.0 * qi / dt);
            }

            const double v_hi = (p_up > 0.0 || p_rec_hi > 0.0) ? rng.uniform() : 1.0;
            const double v_lo = (p_dn > 0.0 || p_rec_lo > 0.0) ? rng.uniform() : 1.0;
            const bool up = v_hi < p_up;
            const bool dn = v_lo < p_dn;
            if (up || dn) {
                const bool pick_dn = dn && (!up || p_dn >= p_up);
                const double th =
                    pick_dn ? (w1 <= bar_dn ? (w - bar_dn) / (w - w1) : 0.5)
                            : (w1 >= bar_up ? (bar_up - w) / (w1 - w) : 0.5);
                integral += gval * dt * th;
                t += dt * th;
                if (pick_dn) {
                    imin = std::min(imin, bar_dn);
                    out = {bar_dn, smax, imin, t, integral, StopCause::AlphaPlus};
                } else {
                    smax = std::max(smax, bar_up);  // the max is achieved at the stop
                    out = {bar_up, smax, imin, t, integral, StopCause::AlphaMinus};
                }
                break;
            }
            if (v_hi < p_rec_hi) {
                // invert the bridge-max law at v_hi: above smax, below bar_up
                const double K = -0.5 * dt * std::log(v_hi);
                const double d = w1 - w;
                const double m = 0.5 * ((w + w1) + std::sqrt(d * d + 4.0 * K));
                if (m > smax) {
                    smax = m;
                    bar_dn = grid_dn(smax);
                    if (g) gval = (*g)(smax);
                }
            }
            if (v_lo < p_rec_lo) {
                const double K = -0.5 * dt * std::log(v_lo);
                const double d = w1 - w;
                const double m = 0.5 * ((-w - w1) + std::sqrt(d * d + 4.0 * K));
                if (-m < imin) {
                    imin = -m;
                    bar_up = grid_up(-imin);
                }
            }

            integral += gval * dt;
            t += dt;
            w = w1;
            while (cp < kNumCheckpoints && t >= kCheckpoints[cp]) {
                acc.sum_abs_w[cp] += std::abs(w);
                ++cp;
            }
        }
        while (cp < kNumCheckpoints) {
            acc.sum_abs_w[cp] += std::abs(out.w_tau);
            ++cp;
        }
        return out;
    }
};

}  // namespace

std::vector<StoppedSample> simulate_ay(const AyBoundary& bd, const SimConfig& cfg,
                                       const RunningCost* g, UiProxy* ui) {
    AyEngine eng{&bd, g, &cfg, bd.support_hi(), {}};
    const double s_max = std::min(bd.support_hi(), cfg.level_cap);
    eng.grid.build([&](double s) { return bd.beta(s); }, s_max, bd.boundary_kinks(s_max), 4096);
    return run_parallel(cfg, eng, ui);
}

std::vector<StoppedSample> simulate_perkins(const PerkinsBoundary& bd, const SimConfig& cfg,
                                            const RunningCost* g, UiProxy* ui) {
    const double span = std::max(std::abs(bd.support_lo()), std::abs(bd.support_hi()));
    double floor = cfg.scale_floor_rel * (std::isfinite(span) ? std::max(span, 1e-3) : 1.0);
    // when a gap around zero keeps both barriers away from the origin, no
    // small-scale resolution is needed
    const double gap = std::min(-bd.alpha_plus(1e-12), bd.alpha_minus(-1e-12));
    if (gap > 0.0) floor = std::max(floor, 0.25 * gap);
    PerkinsEngine eng{&bd, g, &cfg, floor, {}, {}};
    const double s_max = std::min(bd.support_hi(), cfg.level_cap);
    const double i_max = std::min(-bd.support_lo(), cfg.level_cap);
    eng.grid_dn.build([&](double s) { return bd.alpha_plus(s); }, s_max,
                      bd.boundary_kinks(s_max), 4096);
    // jump locations of alpha_minus in |i|: kinks of the reflected boundary
    {
        PerkinsBoundary refl = perkins_boundary(bd.measure().reflected());
        eng.grid_up.build([&](double a) { return bd.alpha_minus(-a); }, i_max,
                          refl.boundary_kinks(i_max), 4096);
    }
    return run_parallel(cfg, eng, ui);
}

// ---------------------------------------------------------------------------
// Chacon-Walsh

namespace {

struct CwStage {
    double lo, hi;
};

/// dyadic tangents to the potential define nested first-exit intervals
std::vector<CwStage> cw_stages(const TargetMeasure& m, double cap, int depth) {
    const double lo_supp = std::max(m.support_lo(), -cap);
    const double hi_supp = std::min(m.support_hi(), cap);

    // current potential as a piecewise-linear function: kinks (x, u)
    std::vector<std::pair<double, double>> cur = {
        {lo_supp - 1.0, std::abs(lo_supp - 1.0)}, {0.0, 0.0}, {hi_supp + 1.0, hi_supp + 1.0}};
    auto cur_at = [&](double x) {
        auto it = std::upper_bound(cur.begin(), cur.end(), x,
                                   [](double v, const auto& kv) { return v < kv.first; });
        if (it == cur.begin()) return cur.front().second + (cur.front().first - x);
        if (it == cur.end()) return cur.back().second + (x - cur.back().first);
        const auto& [x1, u1] = *it;
        const auto& [x0, u0] = *(it - 1);
        return u0 + (u1 - u0) * (x - x0) / (x1 - x0);
    };

    std::vector<CwStage> stages;
    for (int d = 1; d <= depth; ++d) {
        const int cells = 1 << d;
        for (int k = 1; k < cells; k += 2) {
            const double c = lo_supp + (hi_supp - lo_supp) * k / cells;
            const double uc = m.potential(c);
            const double slope =
                0.5 * ((m.call_dplus(c) + m.put_dplus(c)) + (m.call_dminus(c) + m.put_dminus(c)));
            auto line = [&](double x) { return uc + slope * (x - c); };
            if (line(c) <= cur_at(c) + 1e-15) continue;  // tangent already absorbed

            // the region where the line is above the current potential is an
            // interval around c; find its ends against the piecewise function
            double a = c, b = c;
            {
                // walk left
                double x_prev = c;
                for (auto it = std::upper_bound(
                         cur.begin(), cur.end(), c,
                         [](double v, const auto& kv) { return v < kv.first; });
                     it != cur.begin();) {
                    --it;
                    const double xk = it->first, uk = it->second;
                    if (line(xk) <= uk) {
                        // crossing between xk and x_prev on a linear segment
                        const double u_prev = cur_at(x_prev);
                        const double dl = line(xk) - uk;
                        const double dr = line(x_prev) - u_prev;
                        a = xk + (x_prev - xk) * (0.0 - dl) / (dr - dl);
                        break;
                    }
                    x_prev = xk;
                    if (it == cur.begin()) a = xk;  // should not happen: |x| wins far out
                }
            }
            {
                // walk right
                double x_prev = c;
                for (auto it = std::upper_bound(
                         cur.begin(), cur.end(), c,
                         [](double v, const auto& kv) { return v < kv.first; });
                     it != cur.end(); ++it) {
                    const double xk = it->first, uk = it->second;
                    if (line(xk) <= uk) {
                        const double u_prev = cur_at(x_prev);
                        const double dl = line(x_prev) - u_prev;
                        const double dr = line(xk) - uk;
                        b = x_prev + (xk - x_prev) * dl / (dl - dr);
                        break;
                    }
                    x_prev = xk;
                    if (it + 1 == cur.end()) b = xk;
                }
            }
            if (!(b > a)) continue;
            stages.push_back({a, b});

            // update the running potential: replace kinks inside (a,b) by the line
            std::vector<std::pair<double, double>> next;
            for (const auto& kv : cur)
                if (kv.first < a) next.push_back(kv);
            next.emplace_back(a, line(a));
            next.emplace_back(b, line(b));
            for (const auto& kv : cur)
                if (kv.first > b) next.push_back(kv);
            cur = std::move(next);
        }
    }
    return stages;
}

struct CwEngine {
    const std::vector<CwStage>* stages;
    const RunningCost* g;
    const SimConfig* cfg;

    StoppedSample operator()(Rng& rng, PathAccum& acc) const {
        const double dt = cfg->dt;
        const bool bridge = cfg->bridge_correction;
        const double sqdt = std::sqrt(dt);
        double w = 0.0, smax = 0.0, imin = 0.0, t = 0.0, integral = 0.0;
        double gval = g ? (*g)(0.0) : 0.0;
        int cp = 0;
        std::int64_t steps = 0;
        bool truncated = false;
        for (const CwStage& st : *stages) {
            if (truncated) break;
            if (!(w > st.lo && w < st.hi)) continue;
            for (;;) {
                if (++steps > cfg->max_steps_per_path) {
                    truncated = true;
                    break;
                }
                const double w1 = w + sqdt * rng.normal();
                bool hit_lo = w1 <= st.lo, hit_hi = w1 >= st.hi;
                double th_lo = hit_lo ? (w - st.lo) / (w - w1) : 1.0;
                double th_hi = hit_hi ? (st.hi - w) / (w1 - w) : 1.0;
                if (bridge && !hit_lo && (w - st.lo) * (w1 - st.lo) < kBridgeGuard * dt &&
                    rng.uniform() < fast_exp_neg(2.0 * (w - st.lo) * (w1 - st.lo) / dt)) {
                    hit_lo = true;
                    th_lo = 0.5;
                }
                if (bridge && !hit_hi && (st.hi - w) * (st.hi - w1) < kBridgeGuard * dt &&
                    rng.uniform() < fast_exp_neg(2.0 * (st.hi - w) * (st.hi - w1) / dt)) {
                    hit_hi = true;
                    th_hi = 0.5;
                }
                if (hit_lo || hit_hi) {
                    const bool lo_first = hit_lo && (!hit_hi || th_lo <= th_hi);
                    const double th = lo_first ? th_lo : th_hi;
                    integral += gval * dt * th;
                    t += dt * th;
                    w = lo_first ? st.lo : st.hi;
                    smax = std::max(smax, w);
                    imin = std::min(imin, w);
                    if (g) gval = (*g)(smax);
                    break;
                }
                // within-step max only matters for the running statistics
                if (w1 > smax || (bridge && (smax - w) * (smax - w1) < kExtremeGuard * dt &&
                                  rng.uniform() <
                                      fast_exp_neg(2.0 * (smax - w) * (smax - w1) / dt))) {
                    const double m = bridge ? sample_bridge_max(w, w1, dt,
                                                                std::max(smax, w1),
                                                                rng.uniform())
                                             : std::max(w1, smax);
                    if (m > smax) {
                        smax = std::min(m, st.hi);
                        if (g) gval = (*g)(smax);
                    }
                }
                imin = std::max(std::min(imin, w1), st.lo);
                integral += gval * dt;
                t += dt;
                w = w1;
                while (cp < kNumCheckpoints && t >= kCheckpoints[cp]) {
                    acc.sum_abs_w[cp] += std::abs(w);
                    ++cp;
                }
            }
        }
        if (truncated) ++acc.truncated;
        StoppedSample out{w, smax, imin, t, integral,
                          truncated ? StopCause::Truncation : StopCause::CwExit};
        while (cp < kNumCheckpoints) {
            acc.sum_abs_w[cp] += std::abs(out.w_tau);
            ++cp;
        }
        return out;
    }
};

}  // namespace

std::vector<StoppedSample> simulate_chacon_walsh(const TargetMeasure& m, const SimConfig& cfg,
                                                 const RunningCost* g, int tangent_depth) {
    auto stages = cw_stages(m, cfg.level_cap, tangent_depth);
    CwEngine eng{&stages, g, &cfg};
    return run_parallel(cfg, eng, nullptr);
}

// ---------------------------------------------------------------------------
// coupled Perkins rules on shared paths

std::vector<std::vector<StoppedSample>> simulate_perkins_coupled(
    const std::vector<const PerkinsBoundary*>& rules, const SimConfig& cfg) {
    const std::size_t nr = rules.size();
    std::vector<std::vector<StoppedSample>> out(nr);
    for (auto& v : out) v.resize(static_cast<std::size_t>(cfg.num_paths));

    const int nt = resolve_threads(cfg);
    std::vector<std::thread> threads;
    const std::int64_t chunk = (cfg.num_paths + nt - 1) / nt;
    std::vector<std::int64_t> truncated(static_cast<std::size_t>(nt), 0);

    struct RuleState {
        double w, smax, imin, t, integral;
        double bar_dn, bar_up;
        bool done;
        StoppedSample res;
    };

    for (int th = 0; th < nt; ++th) {
        const std::int64_t lo = th * chunk;
        const std::int64_t hi = std::min<std::int64_t>(cfg.num_paths, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back([&, lo, hi, th] {
            std::vector<RuleState> st(nr);
            for (std::int64_t p = lo; p < hi; ++p) {
                Rng rng(cfg.seed, static_cast<std::uint64_t>(p));
                const double z = rng.uniform();  // shared randomisation variable
                std::size_t live = 0;
                for (std::size_t k = 0; k < nr; ++k) {
                    st[k] = RuleState{0, 0, 0, 0, 0, -kInf, kInf, false, {}};
                    if (z <= rules[k]->zero_atom_mass()) {
                        st[k].done = true;
                        st[k].res = {0, 0, 0, 0, 0, StopCause::ZeroAtom};
                    } else {
                        ++live;
                    }
                }
                double w = 0.0, span_floor = 0.0;
                double gap = kInf;
                for (std::size_t k = 0; k < nr; ++k) {
                    span_floor = std::max(span_floor,
                                          std::abs(rules[k]->support_lo()) +
                                              std::abs(rules[k]->support_hi()));
                    gap = std::min({gap, -rules[k]->alpha_plus(1e-12),
                                    rules[k]->alpha_minus(-1e-12)});
                }
                double floor = cfg.scale_floor_rel * std::max(span_floor, 1e-3);
                if (gap > 0.0 && std::isfinite(gap)) floor = std::max(floor, 0.25 * gap);
                double gsmax = 0.0, gimin = 0.0;  // global extremes of the shared path
                std::int64_t steps = 0;
                while (live > 0) {
                    if (++steps > cfg.max_steps_per_path || std::abs(w) >= cfg.level_cap) {
                        for (std::size_t k = 0; k < nr; ++k)
                            if (!st[k].done) {
                                st[k].done = true;
                                st[k].res = {w, st[k].smax, st[k].imin, st[k].t,
                                             st[k].integral, StopCause::Truncation};
                                ++truncated[static_cast<std::size_t>(th)];
                            }
                        break;
                    }
                    const double scale = std::max({gsmax, -gimin, floor});
                    const double dt = std::min(cfg.dt, cfg.fine_factor * scale * scale);
                    const double w1 = w + std::sqrt(dt) * rng.normal();
                    // shared within-step extremes, sampled only when they
                    // can move the running records
                    double m_hi = std::max(w, w1);
                    double m_lo = std::min(w, w1);
                    if (cfg.bridge_correction) {
                        const double qh = (gsmax - w) * (gsmax - w1);
                        if (m_hi > gsmax ||
                            (qh < kExtremeGuard * dt &&
                             rng.uniform() < fast_exp_neg(2.0 * qh / dt)))
                            m_hi = sample_bridge_max(w, w1, dt, std::max(gsmax, m_hi),
                                                     rng.uniform());
                        const double ql = (w - gimin) * (w1 - gimin);
                        if (m_lo < gimin ||
                            (ql < kExtremeGuard * dt &&
                             rng.uniform() < fast_exp_neg(2.0 * ql / dt)))
                            m_lo = -sample_bridge_max(-w, -w1, dt,
                                                      std::max(-gimin, -m_lo), rng.uniform());
                    }
                    gsmax = std::max(gsmax, m_hi);
                    gimin = std::min(gimin, m_lo);
                    for (std::size_t k = 0; k < nr; ++k) {
                        RuleState& r = st[k];
                        if (r.done) continue;
                        if (m_hi > r.smax) {
                            r.smax = m_hi;
                            r.bar_dn = rules[k]->alpha_plus(r.smax);
                        }
                        if (m_lo < r.imin) {
                            r.imin = m_lo;
                            r.bar_up = rules[k]->alpha_minus(r.imin);
                        }
                        r.t += dt;
                        bool dn = m_lo <= r.bar_dn;
                        bool up = m_hi >= r.bar_up;
                        if (dn || up) {
                            r.done = true;
                            --live;
                            if (dn && (!up || std::abs(w - r.bar_dn) < std::abs(r.bar_up - w))) {
                                r.imin = std::min(r.imin, r.bar_dn);
                                r.res = {r.bar_dn, r.smax, r.imin, r.t, 0.0,
                                         StopCause::AlphaPlus};
                            } else {
                                r.smax = std::max(r.smax, r.bar_up);
                                r.res = {r.bar_up, r.smax, r.imin, r.t, 0.0,
                                         StopCause::AlphaMinus};
                            }
                        }
                    }
                    w = w1;
                }
                for (std::size_t k = 0; k < nr; ++k)
                    out[k][static_cast<std::size_t>(p)] = st[k].res;
            }
        });
    }
    for (auto& t : threads) t.join();

    std::int64_t total_trunc = 0;
    for (auto v : truncated) total_trunc += v;
    const double frac =
        static_cast<double>(total_trunc) / static_cast<double>(cfg.num_paths * nr);
    if (frac > 0.01) throw TruncationDominatesError(frac);
    return out;
}

// ---------------------------------------------------------------------------
// summary

McSummary mc_report(const std::vector<StoppedSample>& samples, const TargetMeasure* target,
                    const Payoff* F, const RunningCost* g) {
    if (samples.empty()) throw ValidationError("mc_report needs a non-empty sample set");
    McSummary s;
    s.n = samples.size();
    const double n = static_cast<double>(s.n);

    auto moments = [&](auto&& get, double& mean, double& se) {
        double m = 0.0;
        for (const auto& x : samples) m += get(x);
        m /= n;
        double v = 0.0;
        for (const auto& x : samples) {
            const double d = get(x) - m;
            v += d * d;
        }
        mean = m;
        se = n > 1 ? std::sqrt(v / (n - 1.0) / n) : 0.0;
    };
    moments([](const StoppedSample& x) { return x.w_tau; }, s.mean_w, s.se_w);
    moments([](const StoppedSample& x) { return x.tau; }, s.mean_tau, s.se_tau);
    if (F) moments([&](const StoppedSample& x) { return (*F)(x.w_tau, x.s_tau); },
                   s.payoff_mean, s.payoff_se);
    if (g) {
        moments([](const StoppedSample& x) { return x.running_integral; }, s.running_mean,
                s.running_se);
        moments([&](const StoppedSample& x) {
            const double d = x.s_tau - x.w_tau;
            return d == 0.0 ? 0.0 : d * d * (*g)(x.s_tau);
        },
                s.g_terminal_mean, s.g_terminal_se);
    }

    std::size_t trunc = 0;
    for (const auto& x : samples)
        if (x.stopped_by == StopCause::Truncation) ++trunc;
    s.truncated_fraction = static_cast<double>(trunc) / n;

    if (target) {
        std::vector<double> w(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) w[i] = samples[i].w_tau;
        std::sort(w.begin(), w.end());
        // tie-aware sup distance: compare whole blocks of equal values
        double d = 0.0;
        std::size_t i = 0;
        while (i < w.size()) {
            std::size_t j = i;
            while (j < w.size() && w[j] == w[i]) ++j;
            d = std::max(d, std::abs(static_cast<double>(j) / n - target->cdf(w[i])));
            d = std::max(d, std::abs(static_cast<double>(i) / n - target->cdf_left(w[i])));
            i = j;
        }
        s.ks_w = d;
        s.ks_threshold_1pct = std::sqrt(-0.5 * std::log(0.005)) / std::sqrt(n);
    }

    // empirical law of the maximum on a 21-point grid
    std::vector<double> smax(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) smax[i] = samples[i].s_tau;
    std::sort(smax.begin(), smax.end());
    const double s_hi = smax.back();
    for (int k = 0; k <= 20; ++k) {
        const double level = s_hi * k / 20.0;
        const auto it = std::lower_bound(smax.begin(), smax.end(), level);
        const double frac = static_cast<double>(smax.end() - it) / n;
        s.max_survival.emplace_back(level, frac);
    }
    return s;
}

}  // namespace sep
