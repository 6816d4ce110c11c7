#pragma once

// Seeded, reproducible random fields and directions. Everything that
// samples randomness threads an explicit engine so identical seeds give
// byte-identical outputs.

#include <cstdint>
#include <random>

#include "fcalc/grid.hpp"

namespace fcalc {

using rng_t = std::mt19937_64;

inline rng_t make_rng(std::uint64_t seed) { return rng_t{seed}; }

// Random real field, then hard low-pass at |k|_inf <= band per axis.
// Band-limited fields keep high Sobolev norms finite and resolvable.
inline Field random_band_limited(const Grid& g, rng_t& rng, int band = 0, double amplitude = 1.0) {
    if (band <= 0) band = g.npts / 4;
    std::normal_distribution<double> normal(0.0, 1.0);
    Field f(g);
    for (auto& v : f.values) v = amplitude * normal(rng);
    SpectralField F = forward_transform(f);
    for (std::size_t i = 0; i < F.coeffs.size(); ++i) {
        std::size_t idx = i;
        bool keep = true;
        for (int d = 0; d < g.n; ++d) {
            const int k = g.freq_index(static_cast<int>(idx % g.npts));
            idx /= g.npts;
            if (std::abs(k) > band) keep = false;
        }
        if (!keep) F.coeffs[i] = cplx{0.0, 0.0};
    }
    return inverse_transform(F);
}

// Radial (binned) band-limited field: projection of a random field.
inline Field random_radial_field(const Grid& g, rng_t& rng, int band = 0, double amplitude = 1.0) {
    return radial_project(random_band_limited(g, rng, band, amplitude));
}

// Deterministic extremal candidates used alongside random trials when
// fitting empirical operator constants: slowly varying fields concentrate
// on the low-frequency modes where the spectral weights are smallest,
// which is where the sup ratios live.
inline std::vector<Field> probe_fields(const Grid& g) {
    std::vector<Field> probes;
    probes.emplace_back(g, 1.0);
    const double L = g.half_width;
    for (double sigma : {L / 8.0, L / 4.0, L / 2.0}) {
        Field f(g);
        for (std::size_t i = 0; i < f.size(); ++i) {
            const auto x = g.node(i);
            double r2 = 0.0;
            for (int d = 0; d < g.n; ++d) r2 += x[d] * x[d];
            f[i] = std::exp(-r2 / (2.0 * sigma * sigma));
        }
        probes.push_back(std::move(f));
    }
    for (int k : {1, 2, 4}) {
        Field f(g);
        const double xi = g.freq_step() * k;
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::cos(xi * g.node(i)[0]);
        probes.push_back(radial_project(f));
    }
    return probes;
}

// Uniform direction on the unit sphere in n dimensions.
inline std::array<double, 3> random_direction(int n, rng_t& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::array<double, 3> u{0.0, 0.0, 0.0};
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (int d = 0; d < n; ++d) {
            u[d] = normal(rng);
            norm2 += u[d] * u[d];
        }
    } while (norm2 < 1e-12);
    const double inv = 1.0 / std::sqrt(norm2);
    for (int d = 0; d < n; ++d) u[d] *= inv;
    return u;
}

} // namespace fcalc
