#pragma once

// Closed-form multiplier evaluation and the Mikhlin-type certification.
//
//   m_{a,mu}(x)  = (1 + a(|x|^2))^{-mu/2}
//   varphi(x)    = (1+|x|^2)^{r/2} (1 + a(|x|^2))^{-(s + 2r/beta)/2}
//   m_exp(x)     = (1 + |x|^2 e^{c|x|^2})^{-1}   (= m_{a,2} for a = t e^{ct})
//
// Partial derivatives with respect to distinct axes come from the chain
// rule expanded over set partitions: with psi(y) = (1+y)^{-mu/2},
//
//   d_I m = sum over partitions {I_1..I_r} of I of
//           psi^(r)(a) * prod_q d_{I_q}( a(|x|^2) )
//   psi^(r)(a) = prod_{j<r}(-mu/2 - j) * m_{a, mu+2r}
//   d_{I_q}(a(|x|^2)) = 2^{|I_q|} * prod_{i in I_q} x_i * a^(|I_q|)(|x|^2)
//
// Terms are accumulated in log magnitude + sign so symbols with huge
// intermediate values (the exponential family) evaluate without overflow.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcalc/random.hpp"
#include "fcalc/report.hpp"
#include "fcalc/symbols.hpp"

namespace fcalc {

namespace detail {

// All partitions of {0, 1, ..., k-1} into nonempty blocks. Indexed
// iteration: the recursion appends to `blocks`, which may reallocate.
inline void set_partitions_rec(int k, int next, std::vector<std::vector<int>>& blocks,
                               std::vector<std::vector<std::vector<int>>>& out) {
    if (next == k) {
        out.push_back(blocks);
        return;
    }
    const std::size_t nblocks = blocks.size();
    for (std::size_t bi = 0; bi < nblocks; ++bi) {
        blocks[bi].push_back(next);
        set_partitions_rec(k, next + 1, blocks, out);
        blocks[bi].pop_back();
    }
    blocks.push_back({next});
    set_partitions_rec(k, next + 1, blocks, out);
    blocks.pop_back();
}

inline const std::vector<std::vector<std::vector<int>>>& set_partitions(int k) {
    static const auto table = [] {
        std::vector<std::vector<std::vector<std::vector<int>>>> t(5);
        for (int k = 1; k <= 4; ++k) {
            std::vector<std::vector<int>> blocks;
            blocks.reserve(static_cast<std::size_t>(k));
            set_partitions_rec(k, 0, blocks, t[static_cast<std::size_t>(k)]);
        }
        return t;
    }();
    return table[static_cast<std::size_t>(k)];
}

struct LogSigned {
    double log_mag = 0.0;
    double sign = 1.0; // 0 kills the term

    void mul(double v) {
        if (v == 0.0) {
            sign = 0.0;
            return;
        }
        sign *= v > 0.0 ? 1.0 : -1.0;
        log_mag += std::log(std::fabs(v));
    }
    void mul_log(double lg, double sg) {
        if (sg == 0.0) {
            sign = 0.0;
            return;
        }
        sign *= sg;
        log_mag += lg;
    }
    double value() const { return sign == 0.0 ? 0.0 : sign * std::exp(log_mag); }
};

} // namespace detail

inline double norm2_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

// m_{a,mu}(x) = (1 + a(|x|^2))^{-mu/2}
inline double eval_m_mu(const Symbol& sym, double mu, std::span<const double> x) {
    if (!(mu > 0.0)) throw std::invalid_argument("eval_m_mu: mu must be positive");
    const double a = sym.eval(norm2_of(x));
    if (!std::isfinite(a)) return 0.0; // elliptic symbol overflow: multiplier underflows
    return std::exp(-0.5 * mu * std::log1p(a));
}

// Derivative of m_{a,mu} with respect to the strictly increasing list of
// distinct axes in `axes` (0-based), evaluated at x.
inline double partial_m_mu(const Symbol& sym, double mu, std::span<const int> axes,
                           std::span<const double> x) {
    if (!(mu > 0.0)) throw std::invalid_argument("partial_m_mu: mu must be positive");
    const int k = static_cast<int>(axes.size());
    if (k == 0) return eval_m_mu(sym, mu, x);
    if (k > 4) throw std::invalid_argument("partial_m_mu: at most 4 distinct axes supported");
    for (int i = 0; i < k; ++i) {
        if (axes[i] < 0 || axes[i] >= static_cast<int>(x.size()))
            throw std::invalid_argument("partial_m_mu: axis out of range");
        if (i > 0 && axes[i] <= axes[i - 1])
            throw std::invalid_argument("partial_m_mu: axes must be strictly increasing (all distinct)");
    }
    if (sym.max_deriv < k)
        throw derivative_capability_error("partial_m_mu: derivative order " + std::to_string(k) +
                                          " unavailable for " + sym.label);

    const double t = norm2_of(x);
    const double a = sym.eval(t);
    if (!std::isfinite(a)) return 0.0;
    const double log1pa = std::log1p(a);
    // Deep in the underflow regime every term carries at least
    // (1+a)^{-mu/2}; the derivative factors of the shipped symbols grow
    // at most like powers of a, so the whole expansion vanishes.
    if (0.5 * mu * log1pa > 600.0) return 0.0;

    double total = 0.0;
    for (const auto& partition : detail::set_partitions(k)) {
        const int r = static_cast<int>(partition.size());
        detail::LogSigned term;
        for (int j = 0; j < r; ++j) term.mul(-0.5 * mu - j); // psi^(r) coefficient
        term.mul_log(-0.5 * (mu + 2.0 * r) * log1pa, 1.0);   // m_{a, mu+2r}
        for (const auto& block : partition) {
            const int b = static_cast<int>(block.size());
            term.mul_log(b * std::numbers::ln2, 1.0); // 2^|block|
            for (int pos : block) term.mul(x[static_cast<std::size_t>(axes[pos])]);
            term.mul(sym.deriv(b, t));
            if (term.sign == 0.0) break;
        }
        total += term.value();
    }
    return total;
}

// varphi(x) = (1+|x|^2)^{r/2} m_{a, s + 2r/beta}(x)
inline double eval_varphi(const Symbol& sym, double r, double s, std::span<const double> x) {
    if (!(r > 0.0)) throw std::invalid_argument("eval_varphi: r must be positive");
    const double mu = s + 2.0 * r / sym.beta;
    const double t = norm2_of(x);
    const double a = sym.eval(t);
    if (!std::isfinite(a)) return 0.0;
    return std::exp(0.5 * r * std::log1p(t) - 0.5 * mu * std::log1p(a));
}

// Leibniz expansion of d^alpha varphi over subsets of the (distinct)
// axes; mixed second derivatives of |x|^2 across distinct axes vanish,
// so the Bessel factor contributes one first-derivative chain per axis.
inline double partial_varphi(const Symbol& sym, double r, double s, std::span<const int> axes,
                             std::span<const double> x) {
    if (!(r > 0.0)) throw std::invalid_argument("partial_varphi: r must be positive");
    const int k = static_cast<int>(axes.size());
    if (k == 0) return eval_varphi(sym, r, s, x);
    const double mu = s + 2.0 * r / sym.beta;
    const double t = norm2_of(x);
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
        // subset hits the Bessel factor, complement hits m_{a,mu}
        double coeff = 1.0;
        double bessel = 1.0;
        std::vector<int> rest;
        int taken = 0;
        for (int i = 0; i < k; ++i) {
            if (mask & (1u << i)) {
                coeff *= (0.5 * r - taken) * 2.0;
                bessel *= x[static_cast<std::size_t>(axes[i])];
                ++taken;
            } else {
                rest.push_back(axes[i]);
            }
        }
        bessel *= std::pow(1.0 + t, 0.5 * r - taken);
        total += coeff * bessel * partial_m_mu(sym, mu, rest, x);
    }
    return total;
}

// ---- multiplier specification --------------------------------------------

struct MultiplierSpec {
    enum class Kind { m_mu, varphi, exp_m };
    Kind kind = Kind::m_mu;
    Symbol sym;
    double mu = 2.0;  // m_mu
    double r = 1.0;   // varphi
    double s = 2.0;   // varphi
    std::string label;

    static MultiplierSpec make_m_mu(Symbol symbol, double mu) {
        if (!(mu > 0.0)) throw std::invalid_argument("m_mu multiplier: mu must be positive");
        MultiplierSpec sp;
        sp.kind = Kind::m_mu;
        sp.label = "m_mu(" + symbol.label + ", mu=" + format_g17(mu) + ")";
        sp.sym = std::move(symbol);
        sp.mu = mu;
        return sp;
    }
    static MultiplierSpec make_varphi(Symbol symbol, double r, double s) {
        if (!(r > 0.0)) throw std::invalid_argument("varphi multiplier: r must be positive");
        MultiplierSpec sp;
        sp.kind = Kind::varphi;
        sp.label = "varphi(" + symbol.label + ", r=" + format_g17(r) + ", s=" + format_g17(s) + ")";
        sp.sym = std::move(symbol);
        sp.r = r;
        sp.s = s;
        return sp;
    }
    static MultiplierSpec make_exp_m(double c) {
        MultiplierSpec sp;
        sp.kind = Kind::exp_m;
        sp.sym = exp_symbol(c);
        sp.mu = 2.0;
        sp.label = "m_exp(c=" + format_g17(c) + ")";
        return sp;
    }

    double eval(std::span<const double> x) const {
        switch (kind) {
            case Kind::varphi: return eval_varphi(sym, r, s, x);
            default: return eval_m_mu(sym, mu, x);
        }
    }
    double partial(std::span<const int> axes, std::span<const double> x) const {
        switch (kind) {
            case Kind::varphi: return partial_varphi(sym, r, s, axes, x);
            default: return partial_m_mu(sym, mu, axes, x);
        }
    }
};

// ---- Mikhlin-type certification --------------------------------------------

struct MultiplierEntry {
    std::vector<int> alpha; // distinct axes of the multi-index (empty = the function itself)
    double sup = 0.0;           // over every sample in the certified regime
    double sup_punctured = 0.0; // restricted to |x| >= 1e-3 (the punctured regime)
    double stability = 1.0;     // cumulative sup at previous rung / final rung
    bool pass = false;
};

struct MultiplierReport {
    std::string label;
    int n = 1;
    std::vector<MultiplierEntry> entries;
    double C = 0.0; // overall fitted constant: max over alpha of the sups
    bool pass = false;
    bool origin_included = true;
    std::string sample_spec;

    KeyValueReport serialize() const {
        KeyValueReport rep;
        rep.add("multiplier", label);
        rep.add("n", n);
        for (const auto& e : entries) {
            std::string name = "alpha";
            if (e.alpha.empty()) name += "_0";
            for (int a : e.alpha) name += "_" + std::to_string(a + 1);
            rep.add(name + ".sup", e.sup);
            rep.add(name + ".sup_punctured", e.sup_punctured);
            rep.add(name + ".stability", e.stability);
            rep.add(name + ".pass", e.pass);
        }
        rep.add("C", C);
        rep.add("origin_included", origin_included);
        rep.add("sample_spec", sample_spec);
        rep.add("pass", pass);
        return rep;
    }
};

// Samples |x^alpha D^alpha m| for every multi-index alpha <= (1,...,1)
// over random directions x geometric radii plus a fine shell near
// |x| = 1, fits the sup per alpha and demands rung-to-rung stability.
inline MultiplierReport mikhlin_certify(const MultiplierSpec& spec, int n, rng_t& rng,
                                        const LadderSpec& lad = LadderSpec{1e-6, 10.0, 12, 32}) {
    if (n < 1 || n > 3) throw std::invalid_argument("mikhlin_certify: dimension must be 1, 2 or 3");
    if (spec.sym.max_deriv < n)
        throw derivative_capability_error("mikhlin_certify: symbol derivatives unavailable to order n");

    std::vector<std::array<double, 3>> dirs;
    if (n == 1) {
        dirs.push_back({1.0, 0.0, 0.0});
        dirs.push_back({-1.0, 0.0, 0.0});
    } else {
        for (int d = 0; d < n; ++d) {
            std::array<double, 3> e{0.0, 0.0, 0.0};
            e[d] = 1.0;
            dirs.push_back(e);
        }
        std::array<double, 3> diag{0.0, 0.0, 0.0};
        for (int d = 0; d < n; ++d) diag[d] = 1.0 / std::sqrt(static_cast<double>(n));
        dirs.push_back(diag);
        for (int i = 0; i < 24; ++i) dirs.push_back(random_direction(n, rng));
    }

    // every subset of {0..n-1} as a sorted axis list
    std::vector<std::vector<int>> alphas;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> axes;
        for (int d = 0; d < n; ++d)
            if (mask & (1u << d)) axes.push_back(d);
        alphas.push_back(std::move(axes));
    }

    const bool include_origin = !spec.sym.singular_at_zero;
    std::vector<double> shell;
    for (int i = 0; i <= 75; ++i) shell.push_back(0.25 + 3.75 * i / 75.0); // hits 1.0 exactly

    MultiplierReport rep;
    rep.label = spec.label;
    rep.n = n;
    rep.origin_included = include_origin;
    rep.sample_spec = lad.describe() + "; fine shell [0.25,4]; " + std::to_string(dirs.size()) +
                      " directions" + (include_origin ? "; origin included" : "; origin excluded (singular derivative)");

    std::vector<double> sup(alphas.size(), 0.0), sup_prev(alphas.size(), 0.0);
    std::vector<double> sup_far(alphas.size(), 0.0); // punctured regime |x| >= 1e-3
    std::vector<bool> finite(alphas.size(), true);

    auto probe = [&](const std::array<double, 3>& x) {
        std::span<const double> xs(x.data(), static_cast<std::size_t>(n));
        double norm2 = 0.0;
        for (int d = 0; d < n; ++d) norm2 += x[static_cast<std::size_t>(d)] * x[static_cast<std::size_t>(d)];
        for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
            const auto& axes = alphas[ai];
            double mono = 1.0;
            for (int d : axes) mono *= x[static_cast<std::size_t>(d)];
            const double v = mono * spec.partial(axes, xs);
            if (!std::isfinite(v)) {
                finite[ai] = false;
            } else {
                sup[ai] = std::max(sup[ai], std::fabs(v));
                if (norm2 >= 1e-6) sup_far[ai] = std::max(sup_far[ai], std::fabs(v));
            }
        }
    };

    if (include_origin) probe({0.0, 0.0, 0.0});
    for (double rsh : shell)
        for (const auto& u : dirs) probe({rsh * u[0], rsh * u[1], rsh * u[2]});
    for (int rung = 0; rung < lad.rungs; ++rung) {
        for (double rad : detail::ladder_radii(lad, rung))
            for (const auto& u : dirs) probe({rad * u[0], rad * u[1], rad * u[2]});
        if (rung == lad.rungs - 2) sup_prev = sup;
    }

    rep.pass = true;
    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
        MultiplierEntry e;
        e.alpha = alphas[ai];
        e.sup = sup[ai];
        e.sup_punctured = sup_far[ai];
        e.stability = (sup[ai] == 0.0 && sup_prev[ai] == 0.0) ? 1.0 : sup_prev[ai] / sup[ai];
        e.pass = finite[ai] && std::isfinite(sup[ai]) &&
                 detail::stable_ratio(sup_prev[ai], sup[ai]);
        rep.C = std::max(rep.C, e.sup);
        rep.pass = rep.pass && e.pass;
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

} // namespace fcalc
