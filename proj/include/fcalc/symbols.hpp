#pragma once

// Scalar symbols a(t), t >= 0, with analytic derivatives, and the
// numeric certification of the three admissibility conditions
//
//   G1: a in C^n([0,inf)), t -> a(t^2) non-negative
//   G2: M (1+|x|^2)^{beta/2} <= a(|x|^2) for |x| > R, some M > 0
//   G3: |a^(k)(|x|^2)| <= N (1+|x|^2)^{k(beta*s/4n - 1) + beta/2}
//       for |x| > rho, each 1 <= k <= n
//
// G2/G3 are existential in (M, R) and (N, rho); the checker turns them
// into falsifiable statements by fitting the best constants over a
// geometric radius ladder and demanding that the fitted extrema
// stabilize across the last two rungs.

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcalc/report.hpp"

namespace fcalc {

struct class_precondition_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct derivative_capability_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Symbol {
    std::string label;
    double beta = 2.0;
    int max_deriv = 3;            // analytic derivatives available up to this order
    bool singular_at_zero = false; // derivatives blow up at t = 0 (the pure power family)
    std::function<double(double)> eval;           // a(t)
    std::function<double(int, double)> deriv_fn;  // a^(k)(t), 1 <= k <= max_deriv
    std::map<std::string, double> params;

    double operator()(double t) const { return eval(t); }
    double deriv(int k, double t) const {
        if (k < 1 || k > max_deriv)
            throw derivative_capability_error(label + ": derivative order " + std::to_string(k) +
                                              " unavailable (max " + std::to_string(max_deriv) + ")");
        return deriv_fn(k, t);
    }
};

// a(t) = (|t| + m^2)^{gamma/2}; a^(k)(t) = C(k) (t+m^2)^{(gamma-2k)/2}
// with C(k) = prod_{j<k} (gamma/2 - j). beta = gamma.
inline Symbol fractional_symbol(double gamma, double m) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("fractional_symbol: gamma must lie in (0,1)");
    if (m == 0.0)
        throw std::invalid_argument("fractional_symbol: m must be nonzero (use the pure power symbol instead)");
    const double m2 = m * m;
    Symbol s;
    s.label = "fractional(gamma=" + format_g17(gamma) + ",m=" + format_g17(m) + ")";
    s.beta = gamma;
    s.max_deriv = 4;
    s.params = {{"gamma", gamma}, {"m", m}};
    s.eval = [gamma, m2](double t) { return std::pow(std::fabs(t) + m2, gamma / 2.0); };
    s.deriv_fn = [gamma, m2](int k, double t) {
        double c = 1.0;
        for (int j = 0; j < k; ++j) c *= gamma / 2.0 - j;
        return c * std::pow(t + m2, (gamma - 2.0 * k) / 2.0);
    };
    return s;
}

// Reference symbol a(t) = t (classical Bessel potential), beta = 2.
inline Symbol laplace_symbol() {
    Symbol s;
    s.label = "laplace";
    s.beta = 2.0;
    s.max_deriv = 4;
    s.eval = [](double t) { return t; };
    s.deriv_fn = [](int k, double) { return k == 1 ? 1.0 : 0.0; };
    return s;
}

// a(t) = t e^{ct}. Elliptic of every order but over-grows every G3
// bound; its induced multiplier is certified empirically only.
inline Symbol exp_symbol(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("exp_symbol: rate c must be positive");
    Symbol s;
    s.label = "exp(c=" + format_g17(c) + ")";
    s.beta = 2.0;
    s.max_deriv = 4;
    s.params = {{"c", c}};
    s.eval = [c](double t) { return t * std::exp(c * t); };
    // a^(k)(t) = c^{k-1} (k + c t) e^{ct}
    s.deriv_fn = [c](int k, double t) {
        return std::pow(c, k - 1) * (k + c * t) * std::exp(c * t);
    };
    return s;
}

// Counterexample symbol a(t) = t (2 + sin t): elliptic of order 1 but
// a' grows like t, overshooting the G3 envelope (1+|x|^2)^{1/2} at
// beta = 1, s = 4n.
inline Symbol oscillatory_symbol() {
    Symbol s;
    s.label = "oscillatory";
    s.beta = 1.0;
    s.max_deriv = 3;
    s.eval = [](double t) { return t * (2.0 + std::sin(t)); };
    s.deriv_fn = [](int k, double t) {
        switch (k) {
            case 1: return 2.0 + std::sin(t) + t * std::cos(t);
            case 2: return 2.0 * std::cos(t) - t * std::sin(t);
            default: return -3.0 * std::sin(t) - t * std::cos(t);
        }
    };
    return s;
}

// Scaled pure power a(t) = t^{gamma/2} / kappa. Derivatives are singular
// at t = 0, so the symbol sits outside every admissibility class; only
// ellipticity (G1/G2) is claimed for it.
inline Symbol power_symbol(double gamma, double kappa = 1.0) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("power_symbol: gamma must lie in (0,1)");
    if (!(kappa > 0.0)) throw std::invalid_argument("power_symbol: kappa must be positive");
    Symbol s;
    s.label = "power(gamma=" + format_g17(gamma) + ",kappa=" + format_g17(kappa) + ")";
    s.beta = gamma;
    s.max_deriv = 4;
    s.singular_at_zero = true;
    s.params = {{"gamma", gamma}, {"kappa", kappa}};
    s.eval = [gamma, kappa](double t) { return std::pow(std::fabs(t), gamma / 2.0) / kappa; };
    s.deriv_fn = [gamma, kappa](int k, double t) {
        double c = 1.0 / kappa;
        for (int j = 0; j < k; ++j) c *= gamma / 2.0 - j;
        return c * std::pow(t, (gamma - 2.0 * k) / 2.0);
    };
    return s;
}

// Scaled massive power a(t) = (t + m^2)^{gamma/2} / kappa (smooth at 0).
inline Symbol scaled_fractional_symbol(double gamma, double m, double kappa) {
    Symbol s = fractional_symbol(gamma, m);
    if (!(kappa > 0.0)) throw std::invalid_argument("scaled_fractional_symbol: kappa must be positive");
    const auto base_eval = s.eval;
    const auto base_deriv = s.deriv_fn;
    s.eval = [base_eval, kappa](double t) { return base_eval(t) / kappa; };
    s.deriv_fn = [base_deriv, kappa](int k, double t) { return base_deriv(k, t) / kappa; };
    s.label = "scaled-" + s.label + "/kappa=" + format_g17(kappa);
    s.params["kappa"] = kappa;
    return s;
}

// ---- class certification --------------------------------------------------

// Radius ladder: rung j covers |x| in (r0 * factor^(j-1), r0 * factor^j],
// log-spaced samples per rung. Decade rungs separate a diverging fitted
// constant from a stable one by an order of magnitude per rung.
struct LadderSpec {
    double r0 = 1.0;
    double factor = 10.0;
    int rungs = 7;
    int samples_per_rung = 48;

    std::string describe() const {
        return "|x| in (" + format_g17(r0) + ", " + format_g17(r0 * std::pow(factor, rungs)) +
               "], " + std::to_string(rungs) + " rungs x" + std::to_string(samples_per_rung) +
               " log-spaced samples, factor " + format_g17(factor);
    }
};

struct G3Entry {
    int k = 0;
    double exponent = 0.0;  // k (beta s / 4n - 1) + beta/2
    double fitted_N = 0.0;  // sup over the ladder
    double stability = 1.0; // cumulative sup at previous rung / final rung
    int stable_from_rung = 0;
    bool pass = false;
};

struct ClassReport {
    std::string symbol;
    double s_used = 0.0;
    int n_used = 0;
    double beta_used = 0.0;

    bool g1_pass = false;       // nonnegativity/finiteness AND the C^n probe
    double g1_min = 0.0;
    bool g1_smooth = false;     // derivatives k <= n bounded as t -> 0

    double g2_M = 0.0;
    double g2_R = 1.0;
    double g2_stability = 1.0;
    bool g2_pass = false;

    std::vector<G3Entry> g3;
    std::string sample_spec;
    bool verdict = false;

    KeyValueReport serialize() const {
        KeyValueReport r;
        r.add("symbol", symbol);
        r.add("s", s_used);
        r.add("n", n_used);
        r.add("beta", beta_used);
        r.add("g1.pass", g1_pass);
        r.add("g1.min", g1_min);
        r.add("g1.smooth", g1_smooth);
        r.add("g2.M", g2_M);
        r.add("g2.R", g2_R);
        r.add("g2.stability", g2_stability);
        r.add("g2.pass", g2_pass);
        for (const auto& e : g3) {
            const std::string p = "g3.k" + std::to_string(e.k) + ".";
            r.add(p + "exponent", e.exponent);
            r.add(p + "N", e.fitted_N);
            r.add(p + "stability", e.stability);
            r.add(p + "stable_from_rung", e.stable_from_rung);
            r.add(p + "pass", e.pass);
        }
        r.add("sample_spec", sample_spec);
        r.add("verdict", verdict ? "pass" : "fail");
        return r;
    }
};

namespace detail {

inline std::vector<double> ladder_radii(const LadderSpec& lad, int rung) {
    std::vector<double> radii;
    const double lo = lad.r0 * std::pow(lad.factor, rung);
    const double hi = lo * lad.factor;
    radii.reserve(lad.samples_per_rung);
    for (int i = 1; i <= lad.samples_per_rung; ++i) {
        const double u = static_cast<double>(i) / lad.samples_per_rung;
        radii.push_back(lo * std::pow(hi / lo, u));
    }
    return radii;
}

// ratio of successive cumulative extrema is "stable" when within [0.5, 2]
inline bool stable_ratio(double prev, double fin) {
    if (prev == 0.0 && fin == 0.0) return true;
    if (!(std::isfinite(prev) && std::isfinite(fin)) || fin == 0.0) return false;
    const double q = prev / fin;
    return q >= 0.5 && q <= 2.0;
}

} // namespace detail

// Numeric admissibility check at calculus order s and dimension n.
// Pre: beta*s >= 4n (the class is empty below that threshold) and the
// symbol must supply derivatives up to order n.
inline ClassReport check_class(const Symbol& sym, double s, int n, const LadderSpec& lad = {}) {
    if (n < 1 || n > 3) throw std::invalid_argument("check_class: dimension must be 1, 2 or 3");
    if (!(sym.beta * s >= 4.0 * n))
        throw class_precondition_error("check_class: beta*s = " + format_g17(sym.beta * s) +
                                       " violates beta*s >= 4n = " + format_g17(4.0 * n));
    if (sym.max_deriv < n)
        throw derivative_capability_error("check_class: symbol supplies derivatives only to order " +
                                          std::to_string(sym.max_deriv));

    ClassReport rep;
    rep.symbol = sym.label;
    rep.s_used = s;
    rep.n_used = n;
    rep.beta_used = sym.beta;
    rep.sample_spec = lad.describe() + "; G3 checked for k <= n only";

    // G1: finiteness and nonnegativity of u -> a(u^2) on a moderate range,
    // plus a C^n probe at the origin (derivatives up to order n must stay
    // bounded as t -> 0; the pure power family fails exactly here).
    rep.g1_pass = true;
    rep.g1_min = std::numeric_limits<double>::infinity();
    auto g1_probe = [&](double u) {
        const double v = sym.eval(u * u);
        if (!std::isfinite(v) || v < 0.0) rep.g1_pass = false;
        rep.g1_min = std::min(rep.g1_min, v);
    };
    for (int i = 0; i <= 512; ++i) g1_probe(16.0 * i / 512.0);
    for (int i = 0; i <= 128; ++i) g1_probe(std::pow(10.0, -8.0 + 9.0 * i / 128.0));

    rep.g1_smooth = true;
    for (int k = 1; k <= n && rep.g1_smooth; ++k) {
        double sup_inner = 0.0, sup_outer = 0.0;
        for (int i = 0; i <= 64; ++i) {
            const double t_in = std::pow(10.0, -10.0 + 4.0 * i / 64.0);  // (1e-10, 1e-6]
            const double t_out = std::pow(10.0, -2.0 + 2.0 * i / 64.0);  // (1e-2, 1]
            const double din = sym.deriv(k, t_in);
            const double dout = sym.deriv(k, t_out);
            if (!std::isfinite(din) || !std::isfinite(dout)) {
                rep.g1_smooth = false;
                break;
            }
            sup_inner = std::max(sup_inner, std::fabs(din));
            sup_outer = std::max(sup_outer, std::fabs(dout));
        }
        if (sup_inner > 100.0 * (1.0 + sup_outer)) rep.g1_smooth = false;
    }
    rep.g1_pass = rep.g1_pass && rep.g1_smooth;

    // G2: cumulative inf of a(|x|^2) / (1+|x|^2)^{beta/2} over |x| > R = 1.
    rep.g2_R = lad.r0;
    double inf_prev = std::numeric_limits<double>::infinity();
    double inf_cur = std::numeric_limits<double>::infinity();
    for (int rung = 0; rung < lad.rungs; ++rung) {
        for (double r : detail::ladder_radii(lad, rung)) {
            const double t = r * r;
            const double q = sym.eval(t) / std::pow(1.0 + t, sym.beta / 2.0);
            if (std::isfinite(q)) inf_cur = std::min(inf_cur, q);
        }
        if (rung == lad.rungs - 2) inf_prev = inf_cur;
    }
    rep.g2_M = inf_cur;
    rep.g2_stability = inf_prev / inf_cur;
    rep.g2_pass = std::isfinite(inf_cur) && inf_cur > 0.0 && detail::stable_ratio(inf_prev, inf_cur);

    // G3 per derivative order k <= n: cumulative sup of the ratio against
    // the class envelope; divergence shows up as an unstable sup.
    for (int k = 1; k <= n; ++k) {
        G3Entry e;
        e.k = k;
        e.exponent = k * (sym.beta * s / (4.0 * n) - 1.0) + sym.beta / 2.0;
        double sup_prev = 0.0, sup_cur = 0.0;
        bool finite = true;
        e.stable_from_rung = lad.rungs;
        double last_rung_sup = 0.0;
        for (int rung = 0; rung < lad.rungs; ++rung) {
            for (double r : detail::ladder_radii(lad, rung)) {
                const double t = r * r;
                const double d = sym.deriv(k, t);
                if (!std::isfinite(d)) {
                    finite = false;
                    continue;
                }
                const double q = std::fabs(d) / std::pow(1.0 + t, e.exponent);
                sup_cur = std::max(sup_cur, q);
            }
            if (rung > 0 && e.stable_from_rung == lad.rungs &&
                detail::stable_ratio(last_rung_sup, sup_cur))
                e.stable_from_rung = rung;
            last_rung_sup = sup_cur;
            if (rung == lad.rungs - 2) sup_prev = sup_cur;
        }
        e.fitted_N = sup_cur;
        e.stability = (sup_cur == 0.0 && sup_prev == 0.0) ? 1.0 : sup_prev / sup_cur;
        e.pass = finite && std::isfinite(sup_cur) && detail::stable_ratio(sup_prev, sup_cur);
        rep.g3.push_back(e);
    }

    rep.verdict = rep.g1_pass && rep.g2_pass;
    for (const auto& e : rep.g3) rep.verdict = rep.verdict && e.pass;
    return rep;
}

// Class nesting in the calculus order: a passing verdict at s1 must imply
// a passing verdict at s2 > s1 on the same ladder.
inline bool class_nesting_check(const Symbol& sym, double s1, double s2, int n,
                                const LadderSpec& lad = {}) {
    if (!(s1 >= 0.0 && s1 < s2))
        throw std::invalid_argument("class_nesting_check: need 0 <= s1 < s2 (strict)");
    if (!(sym.beta * s1 >= 4.0 * n))
        throw class_precondition_error("class_nesting_check: beta*s1 < 4n");
    const bool pass1 = check_class(sym, s1, n, lad).verdict;
    const bool pass2 = check_class(sym, s2, n, lad).verdict;
    return !pass1 || pass2;
}

} // namespace fcalc
