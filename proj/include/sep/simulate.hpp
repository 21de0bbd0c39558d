#pragma once

#include <cstdint>
#include <vector>

#include "sep/boundary.hpp"
#include "sep/certificate.hpp"
#include "sep/measure.hpp"

namespace sep {

struct SimConfig {
    std::int64_t num_paths = 100000;
    double dt = 1e-4;          // base time step
    std::uint64_t seed = 0;
    double level_cap = 64.0;   // truncation barrier for |W| (device for unbounded targets)
    bool bridge_correction = true;
    int threads = 0;           // 0: hardware concurrency
    std::int64_t max_steps_per_path = 100'000'000;
    // near time zero the Perkins rules live on vanishing scales; steps shrink
    // to fine_factor * scale^2 until the state outgrows the scale floor
    double fine_factor = 1.0 / 16.0;
    double scale_floor_rel = 1e-6;
};

enum class StopCause : std::uint8_t {
    AyBoundary,
    AlphaPlus,
    AlphaMinus,
    ZeroAtom,
    Truncation,
    CwExit
};

const char* to_string(StopCause c);

struct StoppedSample {
    double w_tau = 0.0;
    double s_tau = 0.0;
    double i_tau = 0.0;
    double tau = 0.0;
    double running_integral = 0.0;  // int_0^tau g(S_u) du when g was supplied
    StopCause stopped_by = StopCause::AyBoundary;
};

/// mean |W_{tau ^ t}| at fixed checkpoint times: the uniform-integrability
/// proxy (must stay below E|X| for a minimal embedding)
struct UiProxy {
    std::vector<double> times;
    std::vector<double> mean_abs_w;
};

std::vector<StoppedSample> simulate_ay(const AyBoundary& bd, const SimConfig& cfg,
                                       const RunningCost* g = nullptr, UiProxy* ui = nullptr);
std::vector<StoppedSample> simulate_perkins(const PerkinsBoundary& bd, const SimConfig& cfg,
                                            const RunningCost* g = nullptr,
                                            UiProxy* ui = nullptr);

/// Chacon-Walsh baseline: iterated first exits from the intervals cut by a
/// fixed dyadic sequence of tangents to the potential. A non-extremal
/// uniformly integrable embedding used for sandwich tests.
std::vector<StoppedSample> simulate_chacon_walsh(const TargetMeasure& m, const SimConfig& cfg,
                                                 const RunningCost* g = nullptr,
                                                 int tangent_depth = 10);

/// Runs several Perkins stopping rules on shared Brownian paths (and a shared
/// zero-atom randomisation variable per path). result[k][p] is rule k on path p.
std::vector<std::vector<StoppedSample>> simulate_perkins_coupled(
    const std::vector<const PerkinsBoundary*>& rules, const SimConfig& cfg);

struct McSummary {
    std::size_t n = 0;
    double mean_w = 0.0, se_w = 0.0;
    double mean_tau = 0.0, se_tau = 0.0;
    double payoff_mean = 0.0, payoff_se = 0.0;          // F(w_tau, s_tau)
    double running_mean = 0.0, running_se = 0.0;        // int g(S) dt
    double g_terminal_mean = 0.0, g_terminal_se = 0.0;  // G(w_tau, s_tau)
    double ks_w = 0.0;             // KS distance of w_tau against the target law
    double ks_threshold_1pct = 0.0;
    std::vector<std::pair<double, double>> max_survival;  // (s, empirical P(S >= s))
    double truncated_fraction = 0.0;
};

McSummary mc_report(const std::vector<StoppedSample>& samples,
                    const TargetMeasure* target = nullptr, const Payoff* F = nullptr,
                    const RunningCost* g = nullptr);

}  // namespace sep
