#include "sep/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sep {

namespace {
constexpr double kMassTol = 1e-12;
constexpr double kMeanTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

DensityPiece DensityPiece::uniform(double lo, double hi, double mass) {
    DensityPiece p;
    p.kind = PieceKind::Uniform;
    p.lo = lo;
    p.hi = hi;
    p.mass = mass;
    return p;
}

DensityPiece DensityPiece::pareto(double shift, double mass, double offset, bool mirrored) {
    DensityPiece p;
    p.kind = PieceKind::Pareto;
    p.shift = shift;
    p.offset = offset;
    p.mirrored = mirrored;
    p.mass = mass;
    if (!mirrored) {
        p.lo = offset - shift;
        p.hi = kInf;
    } else {
        p.lo = -kInf;
        p.hi = -(offset - shift);
    }
    return p;
}

DensityPiece DensityPiece::piecewise_linear_cdf(std::vector<std::pair<double, double>> knots,
                                                double mass) {
    DensityPiece p;
    p.kind = PieceKind::PiecewiseLinearCdf;
    p.knots = std::move(knots);
    p.mass = mass;
    if (!p.knots.empty()) {
        p.lo = p.knots.front().first;
        p.hi = p.knots.back().first;
    }
    return p;
}

TargetMeasure TargetMeasure::from_parts(std::vector<Atom> atoms,
                                        std::vector<DensityPiece> pieces) {
    return build(std::move(atoms), std::move(pieces), true);
}

TargetMeasure TargetMeasure::from_parts_uncentred(std::vector<Atom> atoms,
                                                  std::vector<DensityPiece> pieces) {
    return build(std::move(atoms), std::move(pieces), false);
}

TargetMeasure TargetMeasure::build(std::vector<Atom> atoms, std::vector<DensityPiece> pieces,
                                   bool require_centred) {
    TargetMeasure m;

    // atoms: sorted, merged, nonnegative
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
    for (const Atom& a : atoms) {
        if (a.p < -kMassTol) throw ValidationError("negative atom mass");
        if (!std::isfinite(a.x)) throw ValidationError("atom at non-finite location");
        if (a.p <= 0.0) continue;
        if (!m.atoms_.empty() && a.x == m.atoms_.back().x)
            m.atoms_.back().p += a.p;
        else
            m.atoms_.push_back(a);
    }

    double total = 0.0, mean = 0.0;
    for (const Atom& a : m.atoms_) {
        total += a.p;
        mean += a.p * a.x;
    }

    for (DensityPiece& p : pieces) {
        if (p.mass < -kMassTol) throw ValidationError("negative piece mass");
        if (p.mass <= 0.0) continue;
        switch (p.kind) {
            case PieceKind::Uniform:
                if (!(p.lo < p.hi) || !std::isfinite(p.lo) || !std::isfinite(p.hi))
                    throw ValidationError("uniform piece needs finite lo < hi");
                mean += p.mass * 0.5 * (p.lo + p.hi);
                break;
            case PieceKind::Pareto: {
                if (!(p.shift > 0.0)) throw ValidationError("pareto piece needs shift > 0");
                p = DensityPiece::pareto(p.shift, p.mass, p.offset, p.mirrored);
                const double c = p.mirrored ? -p.offset : p.offset;
                mean += p.mass * c;
                break;
            }
            case PieceKind::PiecewiseLinearCdf: {
                if (p.knots.size() < 2)
                    throw ValidationError("piecewise-linear-cdf piece needs >= 2 knots");
                if (std::abs(p.knots.front().second) > 1e-12 ||
                    std::abs(p.knots.back().second - 1.0) > 1e-12)
                    throw ValidationError("piecewise-linear-cdf must run from 0 to 1");
                for (std::size_t i = 0; i + 1 < p.knots.size(); ++i) {
                    if (!(p.knots[i].first < p.knots[i + 1].first))
                        throw ValidationError("piecewise-linear-cdf knots must increase in x");
                    if (p.knots[i + 1].second < p.knots[i].second - 1e-14)
                        throw ValidationError("piecewise-linear-cdf values must be nondecreasing");
                }
                p.lo = p.knots.front().first;
                p.hi = p.knots.back().first;
                for (std::size_t i = 0; i + 1 < p.knots.size(); ++i) {
                    const double cm = p.mass * (p.knots[i + 1].second - p.knots[i].second);
                    mean += cm * 0.5 * (p.knots[i].first + p.knots[i + 1].first);
                }
                break;
            }
        }
        total += p.mass;
        m.pieces_.push_back(std::move(p));
    }

    if (std::abs(total - 1.0) > 1e-10) throw MassNotOneError(total);
    if (require_centred && std::abs(mean) > kMeanTol) throw NonCentredError(mean);
    m.mean_ = mean;

    if (m.pieces_.empty() && m.atoms_.size() == 1 && m.atoms_[0].x == 0.0)
        throw DegenerateDelta0Error();
    if (m.atoms_.empty() && m.pieces_.empty()) throw ValidationError("empty measure");

    // compile cells and suffix sums
    m.cells_.resize(m.pieces_.size());
    for (std::size_t i = 0; i < m.pieces_.size(); ++i) {
        const DensityPiece& p = m.pieces_[i];
        Cells& c = m.cells_[i];
        if (p.kind == PieceKind::Uniform) {
            c.edge = {p.lo, p.hi};
            c.cmass = {p.mass};
        } else if (p.kind == PieceKind::PiecewiseLinearCdf) {
            for (const auto& [x, u] : p.knots) c.edge.push_back(x);
            for (std::size_t j = 0; j + 1 < p.knots.size(); ++j)
                c.cmass.push_back(p.mass * (p.knots[j + 1].second - p.knots[j].second));
        } else {
            continue;  // pareto evaluated analytically
        }
        const std::size_t n = c.cmass.size();
        c.sufmass.assign(n + 1, 0.0);
        c.sufmean.assign(n + 1, 0.0);
        for (std::size_t j = n; j-- > 0;) {
            c.sufmass[j] = c.sufmass[j + 1] + c.cmass[j];
            c.sufmean[j] = c.sufmean[j + 1] + c.cmass[j] * 0.5 * (c.edge[j] + c.edge[j + 1]);
        }
    }
    const std::size_t na = m.atoms_.size();
    m.atom_sufmass_.assign(na + 1, 0.0);
    m.atom_sufmean_.assign(na + 1, 0.0);
    for (std::size_t j = na; j-- > 0;) {
        m.atom_sufmass_[j] = m.atom_sufmass_[j + 1] + m.atoms_[j].p;
        m.atom_sufmean_[j] = m.atom_sufmean_[j + 1] + m.atoms_[j].p * m.atoms_[j].x;
    }

    // support and kinks
    m.lo_ = kInf;
    m.hi_ = -kInf;
    for (const Atom& a : m.atoms_) {
        m.lo_ = std::min(m.lo_, a.x);
        m.hi_ = std::max(m.hi_, a.x);
        m.kinks_.push_back(a.x);
    }
    for (std::size_t i = 0; i < m.pieces_.size(); ++i) {
        const DensityPiece& p = m.pieces_[i];
        m.lo_ = std::min(m.lo_, p.lo);
        m.hi_ = std::max(m.hi_, p.hi);
        if (p.kind == PieceKind::Pareto) {
            if (std::isfinite(p.lo)) m.kinks_.push_back(p.lo);
            if (std::isfinite(p.hi)) m.kinks_.push_back(p.hi);
        } else {
            for (double e : m.cells_[i].edge) m.kinks_.push_back(e);
        }
    }
    std::sort(m.kinks_.begin(), m.kinks_.end());
    m.kinks_.erase(std::unique(m.kinks_.begin(), m.kinks_.end()), m.kinks_.end());

    m.mass_at_zero_ = m.atom_at(0.0);
    return m;
}

double TargetMeasure::atom_at(double x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                               [](const Atom& a, double v) { return a.x < v; });
    return (it != atoms_.end() && it->x == x) ? it->p : 0.0;
}

double TargetMeasure::piece_call(std::size_t i, double x) const {
    const DensityPiece& p = pieces_[i];
    if (p.kind == PieceKind::Pareto) {
        auto base_call = [&](double y) {
            const double t = y - p.offset + 2.0 * p.shift;
            if (y <= p.offset - p.shift) return p.mass * (p.offset - y);
            return p.mass * p.shift * p.shift / t;
        };
        if (!p.mirrored) return base_call(x);
        // call of the mirrored piece = put of the base at -x
        const double y = -x;
        const double base_put = base_call(y) + (y - p.offset) * p.mass;
        return base_put;
    }
    const Cells& c = cells_[i];
    if (x >= c.edge.back()) return 0.0;
    if (x <= c.edge.front()) {
        // sufmean[0] - x * sufmass[0]
        return c.sufmean[0] - x * c.sufmass[0];
    }
    const auto it = std::upper_bound(c.edge.begin(), c.edge.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - c.edge.begin()) - 1;
    const double a = c.edge[j], b = c.edge[j + 1];
    const double within = c.cmass[j] * (b - x) * (b - x) / (2.0 * (b - a));
    return within + (c.sufmean[j + 1] - x * c.sufmass[j + 1]);
}

double TargetMeasure::piece_tail(std::size_t i, double x) const {
    const DensityPiece& p = pieces_[i];
    if (p.kind == PieceKind::Pareto) {
        auto base_tail = [&](double y) {
            if (y <= p.offset - p.shift) return p.mass;
            const double t = y - p.offset + 2.0 * p.shift;
            return p.mass * p.shift * p.shift / (t * t);
        };
        if (!p.mirrored) return base_tail(x);
        return p.mass - base_tail(-x);
    }
    const Cells& c = cells_[i];
    if (x >= c.edge.back()) return 0.0;
    if (x <= c.edge.front()) return c.sufmass[0];
    const auto it = std::upper_bound(c.edge.begin(), c.edge.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - c.edge.begin()) - 1;
    const double a = c.edge[j], b = c.edge[j + 1];
    return c.cmass[j] * (b - x) / (b - a) + c.sufmass[j + 1];
}

double TargetMeasure::piece_mean_ge(std::size_t i, double x) const {
    const DensityPiece& p = pieces_[i];
    if (p.kind == PieceKind::Pareto) {
        auto base_mean_ge = [&](double y) {
            if (y <= p.offset - p.shift) return p.mass * p.offset;
            const double t = y - p.offset + 2.0 * p.shift;
            const double s2 = p.shift * p.shift;
            return p.mass * (2.0 * s2 / t + s2 * (p.offset - 2.0 * p.shift) / (t * t));
        };
        if (!p.mirrored) return base_mean_ge(x);
        return base_mean_ge(-x) - p.offset * p.mass;
    }
    const Cells& c = cells_[i];
    if (x >= c.edge.back()) return 0.0;
    if (x <= c.edge.front()) return c.sufmean[0];
    const auto it = std::upper_bound(c.edge.begin(), c.edge.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - c.edge.begin()) - 1;
    const double a = c.edge[j], b = c.edge[j + 1];
    const double within = c.cmass[j] * (b * b - x * x) / (2.0 * (b - a));
    return within + c.sufmean[j + 1];
}

double TargetMeasure::piece_variance(std::size_t i) const {
    const DensityPiece& p = pieces_[i];
    if (p.kind == PieceKind::Pareto) return kInf;
    const Cells& c = cells_[i];
    double v = 0.0;
    for (std::size_t j = 0; j < c.cmass.size(); ++j) {
        const double a = c.edge[j], b = c.edge[j + 1];
        v += c.cmass[j] * (a * a + a * b + b * b) / 3.0;
    }
    return v;
}

double TargetMeasure::call(double x) const {
    double v = 0.0;
    auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x,
                               [](double v_, const Atom& a) { return v_ < a.x; });
    const std::size_t idx = static_cast<std::size_t>(it - atoms_.begin());
    v += atom_sufmean_[idx] - x * atom_sufmass_[idx];
    for (std::size_t i = 0; i < pieces_.size(); ++i) v += piece_call(i, x);
    return std::max(v, 0.0);
}

double TargetMeasure::put(double x) const { return std::max(call(x) + x - mean_, 0.0); }

double TargetMeasure::potential(double x) const { return 2.0 * call(x) + x - mean_; }

double TargetMeasure::tail_ge(double x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                               [](const Atom& a, double v_) { return a.x < v_; });
    double t = atom_sufmass_[static_cast<std::size_t>(it - atoms_.begin())];
    for (std::size_t i = 0; i < pieces_.size(); ++i) t += piece_tail(i, x);
    return t;
}

double TargetMeasure::tail_gt(double x) const {
    auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x,
                               [](double v_, const Atom& a) { return v_ < a.x; });
    double t = atom_sufmass_[static_cast<std::size_t>(it - atoms_.begin())];
    for (std::size_t i = 0; i < pieces_.size(); ++i) t += piece_tail(i, x);
    return t;
}

double TargetMeasure::mean_ge(double x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                               [](const Atom& a, double v_) { return a.x < v_; });
    double t = atom_sufmean_[static_cast<std::size_t>(it - atoms_.begin())];
    for (std::size_t i = 0; i < pieces_.size(); ++i) t += piece_mean_ge(i, x);
    return t;
}

double TargetMeasure::mean_gt(double x) const {
    auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x,
                               [](double v_, const Atom& a) { return v_ < a.x; });
    double t = atom_sufmean_[static_cast<std::size_t>(it - atoms_.begin())];
    for (std::size_t i = 0; i < pieces_.size(); ++i) t += piece_mean_ge(i, x);
    return t;
}

double TargetMeasure::barycentre(double x) const {
    if (x >= hi_) return x;
    const double t = tail_ge(x);
    if (t <= 0.0) return x;
    return x + call(x) / t;
}

double TargetMeasure::reverse_barycentre(double x) const {
    const double below = cdf(x);
    if (below <= 0.0) throw NoMassBelowError(x);
    return (mean_ - mean_gt(x)) / below;
}

double TargetMeasure::variance() const {
    double v = 0.0;
    for (const Atom& a : atoms_) v += a.p * a.x * a.x;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const double pv = piece_variance(i);
        if (!std::isfinite(pv)) return kInf;
        v += pv;
    }
    return v - mean_ * mean_;
}

bool TargetMeasure::bounded() const { return std::isfinite(lo_) && std::isfinite(hi_); }

TargetMeasure TargetMeasure::reflected() const {
    std::vector<Atom> atoms;
    for (const Atom& a : atoms_) atoms.push_back({-a.x, a.p});
    std::vector<DensityPiece> pieces;
    for (const DensityPiece& p : pieces_) {
        if (p.kind == PieceKind::Pareto) {
            pieces.push_back(DensityPiece::pareto(p.shift, p.mass, p.offset, !p.mirrored));
        } else if (p.kind == PieceKind::Uniform) {
            pieces.push_back(DensityPiece::uniform(-p.hi, -p.lo, p.mass));
        } else {
            std::vector<std::pair<double, double>> knots;
            for (auto it = p.knots.rbegin(); it != p.knots.rend(); ++it)
                knots.emplace_back(-it->first, 1.0 - it->second);
            pieces.push_back(DensityPiece::piecewise_linear_cdf(std::move(knots), p.mass));
        }
    }
    return build(std::move(atoms), std::move(pieces), false);
}

TargetMeasure TargetMeasure::translated(double c) const {
    std::vector<Atom> atoms;
    for (const Atom& a : atoms_) atoms.push_back({a.x + c, a.p});
    std::vector<DensityPiece> pieces;
    for (const DensityPiece& p : pieces_) {
        if (p.kind == PieceKind::Pareto) {
            const double off = p.mirrored ? p.offset - c : p.offset + c;
            pieces.push_back(DensityPiece::pareto(p.shift, p.mass, off, p.mirrored));
        } else if (p.kind == PieceKind::Uniform) {
            pieces.push_back(DensityPiece::uniform(p.lo + c, p.hi + c, p.mass));
        } else {
            auto knots = p.knots;
            for (auto& [x, u] : knots) x += c;
            pieces.push_back(DensityPiece::piecewise_linear_cdf(std::move(knots), p.mass));
        }
    }
    return build(std::move(atoms), std::move(pieces), false);
}

TargetMeasure TargetMeasure::scaled(double k) const {
    if (!(k > 0.0)) throw ValidationError("scale factor must be positive");
    std::vector<Atom> atoms;
    for (const Atom& a : atoms_) atoms.push_back({a.x * k, a.p});
    std::vector<DensityPiece> pieces;
    for (const DensityPiece& p : pieces_) {
        if (p.kind == PieceKind::Pareto) {
            pieces.push_back(DensityPiece::pareto(p.shift * k, p.mass, p.offset * k, p.mirrored));
        } else if (p.kind == PieceKind::Uniform) {
            pieces.push_back(DensityPiece::uniform(p.lo * k, p.hi * k, p.mass));
        } else {
            auto knots = p.knots;
            for (auto& [x, u] : knots) x *= k;
            pieces.push_back(DensityPiece::piecewise_linear_cdf(std::move(knots), p.mass));
        }
    }
    return build(std::move(atoms), std::move(pieces), false);
}

StarMeasure TargetMeasure::star() const {
    const double p0 = mass_at_zero_;
    if (p0 >= 1.0 - kMassTol) throw DegenerateDelta0Error();
    const double scale = 1.0 / (1.0 - p0);
    std::vector<Atom> atoms;
    for (const Atom& a : atoms_)
        if (a.x != 0.0) atoms.push_back({a.x, a.p * scale});
    std::vector<DensityPiece> pieces = pieces_;
    for (DensityPiece& p : pieces) p.mass *= scale;
    return {build(std::move(atoms), std::move(pieces), false), p0};
}

TargetMeasure TargetMeasure::from_call_prices(
    const std::vector<std::pair<double, double>>& quotes, double spot) {
    if (!(spot > 0.0)) throw ValidationError("spot must be positive");
    if (quotes.size() < 2) throw ValidationError("need at least two call quotes");

    std::vector<std::pair<double, double>> q;
    for (const auto& [k, c] : quotes) {
        if (!std::isfinite(k) || !std::isfinite(c)) throw ValidationError("non-finite quote");
        if (c < 0.0) throw ArbitrageViolationError("negative call price");
        q.emplace_back(k, c);
    }
    for (std::size_t i = 0; i + 1 < q.size(); ++i)
        if (!(q[i].first < q[i + 1].first))
            throw ValidationError("strikes must be strictly increasing");

    // the curve must pass through (0, spot): C(0) = E[X_T] = spot for support in R+
    if (q.front().first > 0.0) {
        q.insert(q.begin(), {0.0, spot});
    } else if (q.front().first == 0.0) {
        if (std::abs(q.front().second - spot) > 1e-9 * std::max(1.0, spot))
            throw NonCentredError(q.front().second - spot);
        q.front().second = spot;
    } else {
        throw ValidationError("negative strikes are not meaningful for a price law");
    }

    std::vector<double> slope(q.size() - 1);
    for (std::size_t i = 0; i + 1 < q.size(); ++i)
        slope[i] = (q[i + 1].second - q[i].second) / (q[i + 1].first - q[i].first);
    for (std::size_t i = 0; i < slope.size(); ++i) {
        if (slope[i] < -1.0 - 1e-12)
            throw ArbitrageViolationError("call curve steeper than -1 after strike " +
                                          std::to_string(q[i].first));
        if (slope[i] > 1e-12)
            throw ArbitrageViolationError("call prices increase after strike " +
                                          std::to_string(q[i].first));
        if (i > 0 && slope[i] < slope[i - 1] - 1e-12)
            throw ArbitrageViolationError("call curve not convex at strike " +
                                          std::to_string(q[i].first));
    }

    // close the curve: extend with the last slope until it hits zero
    double last_k = q.back().first;
    double last_c = q.back().second;
    double last_s = slope.back();
    std::vector<Atom> atoms;
    // atom at strike 0 when the initial slope exceeds -1 (mass at price zero)
    if (slope.front() > -1.0) atoms.push_back({0.0, slope.front() + 1.0});
    for (std::size_t i = 1; i < slope.size(); ++i) {
        const double jump = slope[i] - slope[i - 1];
        if (jump > 0.0) atoms.push_back({q[i].first, jump});
    }
    if (last_c > 1e-14) {
        if (last_s >= -1e-14)
            throw ArbitrageViolationError(
                "flat positive call price at the largest strike leaves mass unaccounted");
        const double k_star = last_k - last_c / last_s;
        atoms.push_back({k_star, -last_s});
    } else {
        atoms.push_back({last_k, -last_s});
    }

    for (Atom& a : atoms) a.x -= spot;  // centre at 0
    return build(std::move(atoms), {}, true);
}

bool convex_order_leq(const TargetMeasure& a, const TargetMeasure& b,
                      const std::vector<double>& grid, double tol) {
    for (double x : grid)
        if (a.potential(x) > b.potential(x) + tol) return false;
    return true;
}

}  // namespace sep
