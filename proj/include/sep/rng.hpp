#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace sep {

namespace detail {

struct ZigTables {
    std::uint32_t kn[128];
    double wn[128];
    double fn[128];
};

inline const ZigTables kZig = [] {
    ZigTables tb{};
    const double m1 = 2147483648.0;
    double dn = 3.442619855899, tn = dn;
    const double vn = 9.91256303526217e-3;
    const double q = vn / std::exp(-0.5 * dn * dn);
    tb.kn[0] = static_cast<std::uint32_t>((dn / q) * m1);
    tb.kn[1] = 0;
    tb.wn[0] = q / m1;
    tb.wn[127] = dn / m1;
    tb.fn[0] = 1.0;
    tb.fn[127] = std::exp(-0.5 * dn * dn);
    for (int i = 126; i >= 1; --i) {
        dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
        tb.kn[i + 1] = static_cast<std::uint32_t>((dn / tn) * m1);
        tn = dn;
        tb.fn[i] = std::exp(-0.5 * dn * dn);
        tb.wn[i] = dn / m1;
    }
    return tb;
}();

/// exp(-x) for x >= 0 via a 2048-entry table with linear interpolation;
/// relative error ~1e-5, plenty for bridge-crossing probabilities
struct NegExpTable {
    static constexpr int kN = 2048;
    static constexpr double kXMax = 20.0;
    double v[kN + 1];
};

inline const NegExpTable kNegExp = [] {
    NegExpTable t{};
    for (int i = 0; i <= NegExpTable::kN; ++i)
        t.v[i] = std::exp(-NegExpTable::kXMax * i / NegExpTable::kN);
    return t;
}();

}  // namespace detail

inline double fast_exp_neg(double x) {
    if (x >= detail::NegExpTable::kXMax) return 0.0;
    if (x <= 0.0) return 1.0;
    const double u = x * (detail::NegExpTable::kN / detail::NegExpTable::kXMax);
    const int i = static_cast<int>(u);
    const double f = u - i;
    return detail::kNegExp.v[i] * (1.0 - f) + detail::kNegExp.v[i + 1] * f;
}

/// splitmix64: seeds derived streams; also fine as a standalone mixer.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ with a ziggurat normal sampler. Each path gets its own stream
/// derived from (seed, stream index), so results do not depend on scheduling.
class Rng {
public:
    Rng() : Rng(0, 0) {}

    Rng(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t sm = seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
        for (auto& word : s_) word = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// uniform on (0,1); never returns 0 or 1
    double uniform() {
        const std::uint64_t u = next_u64() >> 11;  // 53 bits
        return (static_cast<double>(u) + 0.5) * 0x1.0p-53;
    }

    /// standard normal via 128-layer ziggurat
    double normal() {
        for (;;) {
            const std::uint64_t u = next_u64();
            const std::int32_t hz = static_cast<std::int32_t>(static_cast<std::uint32_t>(u));
            const std::uint32_t iz = static_cast<std::uint32_t>(hz) & 127u;
            if (static_cast<std::uint32_t>(hz < 0 ? -hz : hz) < detail::kZig.kn[iz])
                return hz * detail::kZig.wn[iz];
            const double x = fix(hz, iz);
            if (std::isfinite(x)) return x;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    double fix(std::int32_t hz, std::uint32_t iz) {
        constexpr double r = 3.442619855899;
        double x = hz * detail::kZig.wn[iz];
        if (iz == 0) {
            double y;
            do {
                x = -std::log(uniform()) / r;
                y = -std::log(uniform());
            } while (y + y < x * x);
            return hz > 0 ? r + x : -(r + x);
        }
        if (detail::kZig.fn[iz] + uniform() * (detail::kZig.fn[iz - 1] - detail::kZig.fn[iz]) <
            std::exp(-0.5 * x * x))
            return x;
        return std::numeric_limits<double>::infinity();  // redraw
    }

    std::uint64_t s_[4];
};

}  // namespace sep
