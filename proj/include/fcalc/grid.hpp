#pragma once

// Periodic tensor grids on [-L, L)^n with the discrete transform pair
//
//   F(xi_k) = sum_j f(x_j) e^{-i xi_k.x_j} (2L/N)^n
//   f(x_j)  = (2pi)^{-n} sum_k F(xi_k) e^{i xi_k.x_j} (pi/L)^n
//
// so that the discrete Parseval identity and the Bessel-kernel formulas
// hold with explicit constants. Frequencies are xi_k = (pi/L) k with
// integer k in [-N/2, N/2).

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcalc/fft.hpp"

namespace fcalc {

struct Grid {
    int n = 1;          // dimension, 1..3
    int npts = 4;       // points per axis, even, >= 4
    double half_width = 1.0;

    double spacing() const { return 2.0 * half_width / npts; }
    double freq_step() const { return std::numbers::pi / half_width; }
    std::size_t size() const {
        std::size_t s = 1;
        for (int d = 0; d < n; ++d) s *= static_cast<std::size_t>(npts);
        return s;
    }

    // axis index -> signed frequency index k in [-N/2, N/2)
    int freq_index(int i) const { return i < npts / 2 ? i : i - npts; }
    double node_coord(int i) const { return -half_width + i * spacing(); }
    double freq_coord(int i) const { return freq_step() * freq_index(i); }

    // row-major decomposition of a flat node index (axis 0 slowest)
    std::array<int, 3> unflatten(std::size_t idx) const {
        std::array<int, 3> ix{0, 0, 0};
        for (int d = n - 1; d >= 0; --d) {
            ix[d] = static_cast<int>(idx % npts);
            idx /= npts;
        }
        return ix;
    }
    std::size_t flatten(const std::array<int, 3>& ix) const {
        std::size_t idx = 0;
        for (int d = 0; d < n; ++d) idx = idx * npts + static_cast<std::size_t>(ix[d]);
        return idx;
    }

    std::array<double, 3> node(std::size_t idx) const {
        const auto ix = unflatten(idx);
        std::array<double, 3> x{0.0, 0.0, 0.0};
        for (int d = 0; d < n; ++d) x[d] = node_coord(ix[d]);
        return x;
    }

    // flat index of the node nearest to x, wrapped periodically
    std::size_t node_index_of(const std::array<double, 3>& x) const {
        std::array<int, 3> ix{0, 0, 0};
        for (int d = 0; d < n; ++d) {
            const long j = std::lround((x[d] + half_width) / spacing());
            ix[d] = static_cast<int>(((j % npts) + npts) % npts);
        }
        return flatten(ix);
    }
    std::array<double, 3> freq(std::size_t idx) const {
        const auto ix = unflatten(idx);
        std::array<double, 3> xi{0.0, 0.0, 0.0};
        for (int d = 0; d < n; ++d) xi[d] = freq_coord(ix[d]);
        return xi;
    }
    double freq_norm2(std::size_t idx) const {
        const auto xi = freq(idx);
        double s = 0.0;
        for (int d = 0; d < n; ++d) s += xi[d] * xi[d];
        return s;
    }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.n == b.n && a.npts == b.npts && a.half_width == b.half_width;
    }
};

inline Grid make_grid(int n, int npts, double half_width) {
    if (n < 1 || n > 3) throw std::invalid_argument("make_grid: dimension must be 1, 2 or 3");
    if (npts < 4 || npts % 2 != 0) throw std::invalid_argument("make_grid: N must be even and >= 4");
    if (!(half_width > 0.0)) throw std::invalid_argument("make_grid: L must be positive");
    return Grid{n, npts, half_width};
}

struct Field {
    Grid grid;
    std::vector<double> values;

    Field() = default;
    explicit Field(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
};

struct SpectralField {
    Grid grid;
    std::vector<cplx> coeffs;

    SpectralField() = default;
    explicit SpectralField(const Grid& g) : grid(g), coeffs(g.size(), cplx{0.0, 0.0}) {}
};

inline void check_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (!(a == b)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

namespace detail {
// parity of the sum of storage indices; gives the (-1)^k phase that
// accounts for grid nodes starting at -L (N even, so (-1)^{i-N} = (-1)^i)
inline int index_parity(const Grid& g, std::size_t idx) {
    int s = 0;
    for (int d = 0; d < g.n; ++d) {
        s += static_cast<int>(idx % g.npts);
        idx /= g.npts;
    }
    return s & 1;
}
} // namespace detail

inline SpectralField forward_transform(const Field& f) {
    const Grid& g = f.grid;
    SpectralField F(g);
    for (std::size_t i = 0; i < f.size(); ++i) F.coeffs[i] = cplx{f.values[i], 0.0};
    fft_nd(F.coeffs, g.n, static_cast<std::size_t>(g.npts), /*inverse=*/false);
    const double cell = std::pow(g.spacing(), g.n);
    for (std::size_t i = 0; i < F.coeffs.size(); ++i) {
        const double phase = detail::index_parity(g, i) ? -cell : cell;
        F.coeffs[i] *= phase;
    }
    return F;
}

inline Field inverse_transform(const SpectralField& F) {
    const Grid& g = F.grid;
    if (F.coeffs.size() != g.size())
        throw std::invalid_argument("inverse_transform: coefficient array does not match grid");
    std::vector<cplx> buf(F.coeffs);
    for (std::size_t i = 0; i < buf.size(); ++i)
        if (detail::index_parity(g, i)) buf[i] = -buf[i];
    fft_nd(buf, g.n, static_cast<std::size_t>(g.npts), /*inverse=*/true);
    const double scale =
        std::pow(g.freq_step() / (2.0 * std::numbers::pi), g.n);
    Field f(g);
    for (std::size_t i = 0; i < buf.size(); ++i) f.values[i] = buf[i].real() * scale;
    return f;
}

// Discrete L^p quadrature norm; p = infinity() takes the nodewise max.
inline double lp_norm(const Field& f, double p) {
    if (p == std::numeric_limits<double>::infinity()) {
        double m = 0.0;
        for (double v : f.values) m = std::max(m, std::fabs(v));
        return m;
    }
    if (!(p > 1.0)) throw std::invalid_argument("lp_norm: exponent must exceed 1 (or be infinite)");
    const double cell = std::pow(f.grid.spacing(), f.grid.n);
    double acc = 0.0;
    for (double v : f.values) acc += std::pow(std::fabs(v), p);
    return std::pow(acc * cell, 1.0 / p);
}

// Radial binning projector: nodes are grouped by round(|x|/spacing) and
// replaced by the bin average. Idempotent by construction.
inline Field radial_project(const Field& f) {
    const Grid& g = f.grid;
    const double h = g.spacing();
    const int max_bin = static_cast<int>(std::lround(std::sqrt(3.0) * g.half_width / h)) + 2;
    // averaged as ref + mean(value - ref) so that bin-constant fields are
    // exact fixed points (projecting twice equals projecting once, bitwise)
    const std::size_t nbins = static_cast<std::size_t>(max_bin) + 1;
    std::vector<double> dev(nbins, 0.0), ref(nbins, 0.0);
    std::vector<std::size_t> count(nbins, 0);
    std::vector<bool> seen(nbins, false);
    std::vector<int> bin_of(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto x = g.node(i);
        double r2 = 0.0;
        for (int d = 0; d < g.n; ++d) r2 += x[d] * x[d];
        const int b = static_cast<int>(std::lround(std::sqrt(r2) / h));
        bin_of[i] = b;
        if (!seen[b]) {
            seen[b] = true;
            ref[b] = f.values[i];
        }
        dev[b] += f.values[i] - ref[b];
        count[b] += 1;
    }
    Field out(g);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const std::size_t b = static_cast<std::size_t>(bin_of[i]);
        out.values[i] = ref[b] + dev[b] / static_cast<double>(count[b]);
    }
    return out;
}

inline double radial_defect(const Field& f) {
    const Field p = radial_project(f);
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        m = std::max(m, std::fabs(f.values[i] - p.values[i]));
    return m;
}

// ---- Field CSV serialization -------------------------------------------
//
// Header line "# n=<n> N=<N> L=<L>", then one row per node in row-major
// order: coordinates, then the value, 17 significant digits.

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_field_csv(const Field& f, std::ostream& os) {
    const Grid& g = f.grid;
    os << "# n=" << g.n << " N=" << g.npts << " L=" << format_g17(g.half_width) << "\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto x = g.node(i);
        for (int d = 0; d < g.n; ++d) os << format_g17(x[d]) << ",";
        os << format_g17(f.values[i]) << "\n";
    }
}

inline void write_field_csv(const Field& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_field_csv(f, os);
}

inline Field read_field_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("field csv: empty stream");
    int n = 0, N = 0;
    double L = 0.0;
    if (std::sscanf(header.c_str(), "# n=%d N=%d L=%lf", &n, &N, &L) != 3)
        throw std::runtime_error("field csv: malformed header");
    Field f(make_grid(n, N, L));
    std::string line;
    std::size_t idx = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (idx >= f.size()) throw std::runtime_error("field csv: too many rows");
        const auto pos = line.find_last_of(',');
        if (pos == std::string::npos) throw std::runtime_error("field csv: malformed row");
        f.values[idx++] = std::strtod(line.c_str() + pos + 1, nullptr);
    }
    if (idx != f.size()) throw std::runtime_error("field csv: row count does not match grid");
    return f;
}

inline Field read_field_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_field_csv(is);
}

// ---- small field algebra helpers ----------------------------------------

inline Field operator+(const Field& a, const Field& b) {
    check_same_grid(a.grid, b.grid, "field sum");
    Field out(a.grid);
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = a.values[i] + b.values[i];
    return out;
}

inline Field operator-(const Field& a, const Field& b) {
    check_same_grid(a.grid, b.grid, "field difference");
    Field out(a.grid);
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = a.values[i] - b.values[i];
    return out;
}

inline Field operator*(double c, const Field& a) {
    Field out(a.grid);
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = c * a.values[i];
    return out;
}

inline double max_abs(const Field& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::fabs(v));
    return m;
}

inline double max_abs_diff(const Field& a, const Field& b) {
    check_same_grid(a.grid, b.grid, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::fabs(a.values[i] - b.values[i]));
    return m;
}

inline bool all_finite(const Field& f) {
    for (double v : f.values)
        if (!std::isfinite(v)) return false;
    return true;
}

} // namespace fcalc
