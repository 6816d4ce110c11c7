#pragma once

// The functional calculus on a periodic grid: the smoothing operator
// T_s (spectral division by w(xi) = (1 + a(|xi|^2))^{s/2}), its inverse
// A (spectral multiplication), the convolution kernel of T_s, the
// symbol-adapted norm ||A u||_{L^p}, classical Bessel-potential norms,
// and empirical audits of the embedding constants.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcalc/grid.hpp"
#include "fcalc/multipliers.hpp"
#include "fcalc/random.hpp"
#include "fcalc/symbols.hpp"

namespace fcalc {

struct resolution_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Calculus {
public:
    Calculus(Symbol sym, double s, Grid grid) : sym_(std::move(sym)), s_(s), grid_(grid) {
        if (!(s > 0.0)) throw std::invalid_argument("Calculus: order s must be positive");
        weight_.resize(grid_.size());
        for (std::size_t i = 0; i < weight_.size(); ++i) {
            const double a = sym_.eval(grid_.freq_norm2(i));
            if (!std::isfinite(a) || a < 0.0)
                throw resolution_error("Calculus: symbol not finite/nonnegative on the frequency lattice");
            const double w = std::exp(0.5 * s_ * std::log1p(a));
            if (!std::isfinite(w))
                throw resolution_error("Calculus: spectral weight overflows; grid resolves beyond the floating range");
            weight_[i] = w;
        }
    }

    const Grid& grid() const { return grid_; }
    const Symbol& symbol() const { return sym_; }
    double order() const { return s_; }
    const std::vector<double>& weights() const { return weight_; }

    // multiplier value m_{a,s}(xi) used by T_s at one frequency
    double multiplier_at(std::size_t i) const { return 1.0 / weight_[i]; }

private:
    Symbol sym_;
    double s_;
    Grid grid_;
    std::vector<double> weight_;
};

inline Field apply_Ts(const Calculus& calc, const Field& g) {
    check_same_grid(calc.grid(), g.grid, "apply_Ts");
    SpectralField G = forward_transform(g);
    for (std::size_t i = 0; i < G.coeffs.size(); ++i) G.coeffs[i] /= calc.weights()[i];
    return inverse_transform(G);
}

inline Field apply_A(const Calculus& calc, const Field& u) {
    check_same_grid(calc.grid(), u.grid, "apply_A");
    SpectralField U = forward_transform(u);
    for (std::size_t i = 0; i < U.coeffs.size(); ++i) {
        U.coeffs[i] *= calc.weights()[i];
        if (!std::isfinite(U.coeffs[i].real()) || !std::isfinite(U.coeffs[i].imag()))
            throw resolution_error("apply_A: weighted coefficient overflow (field under-resolved for this order)");
    }
    return inverse_transform(U);
}

// ||u||_{H^{s,p}(a)} = ||A u||_{L^p}
inline double h_norm(const Calculus& calc, const Field& u, double p) {
    return lp_norm(apply_A(calc, u), p);
}

// Classical Bessel-potential norm ||F^-1((1+|xi|^2)^{r/2} F u)||_{L^p}.
inline double sobolev_norm(const Field& u, double r, double p) {
    if (!(r >= 0.0)) throw std::invalid_argument("sobolev_norm: order r must be >= 0");
    if (r == 0.0) return lp_norm(u, p);
    const Grid& g = u.grid;
    SpectralField U = forward_transform(u);
    for (std::size_t i = 0; i < U.coeffs.size(); ++i)
        U.coeffs[i] *= std::pow(1.0 + g.freq_norm2(i), 0.5 * r);
    return lp_norm(inverse_transform(U), p);
}

// Apply an arbitrary radial frequency multiplier xi -> w(|xi|^2).
inline Field apply_radial_multiplier(const Field& u, const std::function<double(double)>& w) {
    SpectralField U = forward_transform(u);
    for (std::size_t i = 0; i < U.coeffs.size(); ++i) U.coeffs[i] *= w(u.grid.freq_norm2(i));
    return inverse_transform(U);
}

namespace detail {

// Sum of the T_s multiplier over the frequency-lattice images
// xi + 2*Xi*nu (Xi = pi N / 2L), with a power-law tail extrapolation.
// By the Poisson summation argument this turns the inverse transform of
// the sampled multiplier into exact samples of the periodized continuum
// kernel, eliminating the O(ximax^{1-beta*s/2}) truncation error of the
// bare lattice sum.
inline double alias_summed_multiplier_1d(const Calculus& calc, double xi, int images) {
    const auto m = [&](double z) {
        const double a = calc.symbol().eval(z * z);
        if (!std::isfinite(a)) return 0.0;
        return std::exp(-0.5 * calc.order() * std::log1p(a));
    };
    const double period = calc.grid().freq_step() * calc.grid().npts; // 2*Xi
    double total = m(xi);
    for (int nu = 1; nu <= images; ++nu)
        total += m(xi + period * nu) + m(xi - period * nu);
    // tail: fit the per-image decay exponent and integrate it
    const double gV = m(xi + period * images) + m(xi - period * images);
    const double gH = m(xi + period * (images / 2)) + m(xi - period * (images / 2));
    if (gV > 0.0 && gH > gV) {
        const double q = std::log(gH / gV) / std::numbers::ln2;
        if (q > 1.0)
            total += gV * std::pow(images, q) * std::pow(images + 0.5, 1.0 - q) / (q - 1.0);
    }
    return total;
}

inline double alias_summed_multiplier_nd(const Calculus& calc, std::size_t idx, int images) {
    const Grid& g = calc.grid();
    const auto m = [&](double norm2) {
        const double a = calc.symbol().eval(norm2);
        if (!std::isfinite(a)) return 0.0;
        return std::exp(-0.5 * calc.order() * std::log1p(a));
    };
    const double period = g.freq_step() * g.npts;
    const auto xi = g.freq(idx);
    double total = 0.0;
    std::array<int, 3> nu{0, 0, 0};
    std::function<void(int)> loop = [&](int d) {
        if (d == g.n) {
            double norm2 = 0.0;
            for (int dd = 0; dd < g.n; ++dd) {
                const double z = xi[dd] + period * nu[dd];
                norm2 += z * z;
            }
            total += m(norm2);
            return;
        }
        for (nu[d] = -images; nu[d] <= images; ++nu[d]) loop(d + 1);
    };
    loop(0);
    return total;
}

} // namespace detail

// The grid kernel F_d^{-1}(m): the unique field whose quadrature-weighted
// periodic convolution reproduces T_s exactly on the grid.
inline Field kernel_grid(const Calculus& calc) {
    SpectralField M(calc.grid());
    for (std::size_t i = 0; i < M.coeffs.size(); ++i) M.coeffs[i] = cplx{calc.multiplier_at(i), 0.0};
    return inverse_transform(M);
}

// The continuum kernel K = F^{-1}(m) sampled on the grid: alias-summed
// multiplier coefficients, so grid values equal the periodized continuum
// kernel up to the (exponentially small) periodization tail.
// Pre: beta*s >= 4n, the admissibility regime in which K is certified
// square-integrable.
inline Field kernel_K(const Calculus& calc, int images = 0) {
    const Grid& g = calc.grid();
    const double bs = calc.symbol().beta * calc.order();
    if (!(bs >= 4.0 * g.n))
        throw class_precondition_error("kernel_K: beta*s = " + format_g17(bs) +
                                       " below the 4n admissibility threshold");
    if (images <= 0) images = g.n == 1 ? 64 : 8;
    SpectralField M(g);
    if (g.n == 1) {
        for (std::size_t i = 0; i < M.coeffs.size(); ++i)
            M.coeffs[i] = cplx{detail::alias_summed_multiplier_1d(calc, g.freq_coord(static_cast<int>(i)), images), 0.0};
    } else {
        for (std::size_t i = 0; i < M.coeffs.size(); ++i)
            M.coeffs[i] = cplx{detail::alias_summed_multiplier_nd(calc, i, images), 0.0};
    }
    Field K = inverse_transform(M);
    // the multiplier is even, so enforce K(-x) = K(x) exactly
    for (std::size_t i = 0; i < K.size(); ++i) {
        auto ix = g.unflatten(i);
        std::array<int, 3> jx{0, 0, 0};
        for (int d = 0; d < g.n; ++d) jx[d] = ix[d] == 0 ? 0 : g.npts - ix[d];
        const std::size_t j = g.flatten(jx);
        if (j > i) {
            const double avg = 0.5 * (K.values[i] + K.values[j]);
            K.values[i] = avg;
            K.values[j] = avg;
        }
    }
    return K;
}

// Quadrature-weighted periodic convolution of a kernel field with g.
// Direct summation: an implementation path independent of the FFT route.
inline Field convolve_field(const Field& kernel, const Field& g) {
    check_same_grid(kernel.grid, g.grid, "convolve_field");
    const Grid& gr = g.grid;
    const double cell = std::pow(gr.spacing(), gr.n);
    const int N = gr.npts;
    Field out(gr);
    std::vector<std::array<int, 3>> idx(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) idx[i] = gr.unflatten(i);
    for (std::size_t j = 0; j < g.size(); ++j) {
        double acc = 0.0;
        for (std::size_t l = 0; l < g.size(); ++l) {
            std::array<int, 3> off{0, 0, 0};
            // kernel index of the wrapped displacement x_j - x_l
            for (int d = 0; d < gr.n; ++d) off[d] = ((idx[j][d] - idx[l][d]) + N + N / 2) % N;
            acc += kernel.values[gr.flatten(off)] * g.values[l];
        }
        out.values[j] = acc * cell;
    }
    return out;
}

// T_s as convolution with the grid kernel; agrees with apply_Ts up to
// floating-point roundoff by the discrete convolution theorem.
inline Field convolve_with_kernel(const Calculus& calc, const Field& g) {
    check_same_grid(calc.grid(), g.grid, "convolve_with_kernel");
    return convolve_field(kernel_grid(calc), g);
}

// ---- embedding audits ------------------------------------------------------

struct EmbeddingRow {
    std::string name;
    double max_ratio = 0.0;      // over `trials` fields
    double max_ratio_2x = 0.0;   // over 2*trials fields
    double drift = 0.0;          // relative growth of the max on doubling
    int trials = 0;
};

struct EmbeddingAudit {
    std::vector<EmbeddingRow> rows;

    KeyValueReport serialize() const {
        KeyValueReport rep;
        for (const auto& r : rows) {
            rep.add(r.name + ".max_ratio", r.max_ratio);
            rep.add(r.name + ".max_ratio_2x", r.max_ratio_2x);
            rep.add(r.name + ".drift", r.drift);
            rep.add(r.name + ".trials", r.trials);
        }
        return rep;
    }
};

namespace detail {
inline EmbeddingRow ratio_audit(const std::string& name, int trials, rng_t& rng,
                                const std::vector<Field>& probes,
                                const std::function<Field(rng_t&)>& gen,
                                const std::function<double(const Field&)>& num,
                                const std::function<double(const Field&)>& den) {
    EmbeddingRow row;
    row.name = name;
    row.trials = trials;
    auto account = [&](const Field& u, bool first_batch) {
        const double d = den(u);
        if (d == 0.0) return; // zero fields excluded from ratios
        const double q = num(u) / d;
        if (first_batch) row.max_ratio = std::max(row.max_ratio, q);
        row.max_ratio_2x = std::max(row.max_ratio_2x, q);
    };
    for (const Field& u : probes) account(u, true);
    for (int i = 0; i < 2 * trials; ++i) account(gen(rng), i < trials);
    row.drift = row.max_ratio > 0.0 ? row.max_ratio_2x / row.max_ratio - 1.0 : 0.0;
    return row;
}

// Band-limited field with spectral profile 1/w(xi)^2: the coherent
// maximizer of ||u||_inf / ||F^-1(w u^)||_2 over the band.
inline Field coherent_probe(const Grid& g, const std::vector<double>& weights) {
    SpectralField M(g);
    const int band = g.npts / 4;
    for (std::size_t i = 0; i < M.coeffs.size(); ++i) {
        std::size_t idx = i;
        bool keep = true;
        for (int d = 0; d < g.n; ++d) {
            const int k = g.freq_index(static_cast<int>(idx % g.npts));
            idx /= g.npts;
            if (std::abs(k) > band) keep = false;
        }
        if (keep) M.coeffs[i] = cplx{1.0 / (weights[i] * weights[i]), 0.0};
    }
    return inverse_transform(M);
}
} // namespace detail

// Empirical constants for the four embedding statements: into L^p, into
// the Bessel scale H^{r,p}, into the lower symbol-adapted order, and into
// L^inf. Each row reports the max ratio target/source norm over random
// band-limited fields plus its drift when the trial count doubles.
inline EmbeddingAudit embedding_audit(const Calculus& calc, double p, double r, double delta,
                                      int trials, rng_t& rng) {
    const Grid& g = calc.grid();
    if (!(r > static_cast<double>(g.n) / p))
        throw std::invalid_argument("embedding_audit: the sup-norm row needs r > n/p");
    const Symbol& sym = calc.symbol();
    const double s = calc.order();
    const Calculus calc_shift(sym, s + 2.0 * r / sym.beta, g);
    const Calculus calc_high(sym, 2.0 * s + delta, g);
    const double inf = std::numeric_limits<double>::infinity();

    auto gen = [&](rng_t& rr) { return random_band_limited(g, rr); };
    std::vector<Field> probes = probe_fields(g);
    probes.push_back(detail::coherent_probe(g, calc_shift.weights()));

    EmbeddingAudit audit;
    audit.rows.push_back(detail::ratio_audit(
        "into_lp", trials, rng, probes, gen,
        [&](const Field& u) { return lp_norm(u, p); },
        [&](const Field& u) { return h_norm(calc, u, p); }));
    audit.rows.push_back(detail::ratio_audit(
        "into_sobolev", trials, rng, probes, gen,
        [&](const Field& u) { return sobolev_norm(u, r, p); },
        [&](const Field& u) { return h_norm(calc_shift, u, p); }));
    audit.rows.push_back(detail::ratio_audit(
        "into_lower_order", trials, rng, probes, gen,
        [&](const Field& u) { return h_norm(calc, u, p); },
        [&](const Field& u) { return h_norm(calc_high, u, p); }));
    audit.rows.push_back(detail::ratio_audit(
        "into_sup_norm", trials, rng, probes, gen,
        [&](const Field& u) { return lp_norm(u, inf); },
        [&](const Field& u) { return h_norm(calc_shift, u, p); }));
    return audit;
}

} // namespace fcalc
