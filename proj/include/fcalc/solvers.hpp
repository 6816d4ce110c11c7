#pragma once

// Fixed-point solution of [1 + a(-Delta)]^{s/2} u = RHS(u):
//   - the one-step linear solve (spectral division) with its exact norm
//     identity,
//   - Picard iteration in the contraction regime with the delta
//     threshold bookkeeping,
//   - damped Picard with a Sobolev-ball projection for the localized
//     cutoff equation,
//   - damped Picard with radial projection and an L^{alpha p} ball for
//     the radial regime, including the (eps, rho_eps, N) feasibility
//     arithmetic.
//
// Convergence of every solve is confirmed by the standalone residual
// operation, never by the iteration's own stopping test alone.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcalc/calculus.hpp"
#include "fcalc/grid.hpp"
#include "fcalc/random.hpp"
#include "fcalc/report.hpp"

namespace fcalc {

using nonlinearity_fn = std::function<double(const std::array<double, 3>&, double)>;

struct Problem {
    Calculus calc;
    double p = 2.0;
    nonlinearity_fn V;             // V(x, y)
    nonlinearity_fn dV_dy;         // d/dy V(x, y)
    double alpha = 2.0;            // growth exponent, > 1
    double growth_C = 1.0;         // fitted growth constant
    Field h_growth;                // L^p witness of |V| <= C(|h| + |y|^alpha)
    Field g_growth;                // L^{alpha p/(alpha-1)} witness for dV/dy
    std::optional<Field> lipschitz_h; // L^inf witness |V(x,y1)-V(x,y2)| <= h|y1-y2|
    std::optional<Field> cutoff;   // compactly supported varphi for the localized equation
    double delta = 1.0;            // coupling
    bool radial = false;
    bool window_certified = true;  // false when built outside its certified window
    std::string certificate = "none";
    std::string notes;

    Problem(Calculus c, double lebesgue_p) : calc(std::move(c)), p(lebesgue_p) {
        if (!(p > 1.0)) throw std::invalid_argument("Problem: p must exceed 1");
    }
    const Grid& grid() const { return calc.grid(); }
};

struct SolverOptions {
    double tol_step = 1e-10;       // H-norm step tolerance (contraction)
    double tol_residual = 1e-8;    // L^p residual tolerance
    int max_iter_contraction = 500;
    int max_iter = 1000;
    double damping = 1.0;          // initial theta, halved on residual increase
    double damping_floor = 1.0 / 16.0;
    std::optional<double> epsilon; // radial ball radius; unset = maximize rho_eps
    std::optional<double> n_emb;   // supplied embedding constant
    std::optional<double> m_reg;   // auxiliary regularity exponent (localized)
    int trials = 200;              // samples for empirical constants
    std::uint64_t seed = 12345;
    std::optional<Field> initial;  // u0; default identically zero
};

struct HistoryRow {
    int iter = 0;
    double residual = 0.0;
    double h_norm = 0.0;
    double lp_alpha = 0.0;
    double damping = 1.0;
    int projection_flag = 0;
};

struct SolveResult {
    Field u;
    std::vector<HistoryRow> history;
    int iterations = 0;
    bool converged = false;
    bool certified = false;
    std::map<std::string, double> constants;
    int projection_events = 0;
    std::string notes;
};

inline void write_history_csv(const SolveResult& res, std::ostream& os) {
    os << "iter,residual,h_norm,lp_alpha_norm,damping,projection_flag\n";
    for (const auto& r : res.history)
        os << r.iter << "," << format_g17(r.residual) << "," << format_g17(r.h_norm) << ","
           << format_g17(r.lp_alpha) << "," << format_g17(r.damping) << "," << r.projection_flag
           << "\n";
}

inline void write_history_csv(const SolveResult& res, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_history_csv(res, os);
}

// V applied nodewise.
inline Field apply_nonlinearity(const Problem& prob, const Field& u) {
    Field out(prob.grid());
    for (std::size_t i = 0; i < u.size(); ++i) out.values[i] = prob.V(prob.grid().node(i), u.values[i]);
    return out;
}

// The configured right-hand side delta * (cutoff *) V(., u).
inline Field rhs_field(const Problem& prob, const Field& u) {
    Field out = apply_nonlinearity(prob, u);
    if (prob.cutoff)
        for (std::size_t i = 0; i < out.size(); ++i) out.values[i] *= prob.cutoff->values[i];
    for (auto& v : out.values) v *= prob.delta;
    return out;
}

// || A u - RHS(u) ||_{L^p}: the independent convergence criterion.
inline double residual(const Problem& prob, const Field& u) {
    check_same_grid(prob.grid(), u.grid, "residual");
    return lp_norm(apply_A(prob.calc, u) - rhs_field(prob, u), prob.p);
}

// ---- linear theory ---------------------------------------------------------

inline SolveResult solve_linear(const Calculus& calc, const Field& g, double p) {
    check_same_grid(calc.grid(), g.grid, "solve_linear");
    SolveResult res;
    res.u = apply_Ts(calc, g);
    const double rnorm = lp_norm(apply_A(calc, res.u) - g, p);
    const double gnorm = lp_norm(g, p);
    const double unorm_h = h_norm(calc, res.u, p);
    res.iterations = 1;
    res.converged = rnorm <= 1e-11 * std::max(gnorm, 1e-300);
    res.certified = true;
    res.history.push_back({0, rnorm, unorm_h, lp_norm(res.u, p), 1.0, 0});
    res.constants["residual"] = rnorm;
    res.constants["g_lp_norm"] = gnorm;
    res.constants["u_h_norm"] = unorm_h;
    res.constants["norm_identity_defect"] =
        gnorm > 0.0 ? std::fabs(unorm_h - gnorm) / gnorm : std::fabs(unorm_h);
    return res;
}

// ---- empirical embedding constants -----------------------------------------

struct EmbeddingConstant {
    double value = 0.0;     // safety factor 2 applied
    double max_ratio = 0.0; // raw empirical max
    double drift = 0.0;     // relative growth of the max on trial doubling
    int trials = 0;
};

namespace detail {

inline EmbeddingConstant ratio_sup(const Calculus& calc, double p, int trials, rng_t& rng,
                                   bool radial_fields,
                                   const std::function<double(const Field&)>& numerator) {
    EmbeddingConstant out;
    out.trials = trials;
    auto account = [&](const Field& u, bool first_batch) {
        const double den = h_norm(calc, u, p);
        if (den == 0.0) return;
        const double q = numerator(u) / den;
        if (first_batch) out.max_ratio = std::max(out.max_ratio, q);
        out.value = std::max(out.value, q);
    };
    for (const Field& u : fcalc::probe_fields(calc.grid())) account(u, true);
    for (int i = 0; i < 2 * trials; ++i) {
        const Field u = radial_fields ? random_radial_field(calc.grid(), rng)
                                      : random_band_limited(calc.grid(), rng);
        account(u, i < trials);
    }
    out.drift = out.max_ratio > 0.0 ? out.value / out.max_ratio - 1.0 : 0.0;
    out.value = 2.0 * std::max(out.value, out.max_ratio);
    return out;
}

} // namespace detail

// N with ||u||_{L^{alpha p}} <= N ||u||_{H^{s,p}(a)} over radial fields
// (deterministic probes plus random band-limited samples), inflated by a
// safety factor of 2.
inline EmbeddingConstant estimate_embedding_constant(const Calculus& calc, double p, double alpha,
                                                     int trials, rng_t& rng) {
    if (trials < 100) throw std::invalid_argument("estimate_embedding_constant: need trials >= 100");
    return detail::ratio_sup(calc, p, trials, rng, /*radial_fields=*/true,
                             [&](const Field& u) { return lp_norm(u, alpha * p); });
}

// C with ||u||_{L^p} <= C ||u||_{H^{s,p}(a)} (the inclusion into L^p),
// same sampling scheme and safety factor.
inline EmbeddingConstant estimate_lp_embedding_constant(const Calculus& calc, double p, int trials,
                                                        rng_t& rng) {
    return detail::ratio_sup(calc, p, trials, rng, /*radial_fields=*/false,
                             [&](const Field& u) { return lp_norm(u, p); });
}

// ---- contraction regime ----------------------------------------------------

inline SolveResult solve_contraction(const Problem& prob, const SolverOptions& opts = {}) {
    if (!prob.lipschitz_h)
        throw std::invalid_argument("solve_contraction: problem lacks the L^inf Lipschitz witness h");
    check_same_grid(prob.grid(), prob.lipschitz_h->grid, "solve_contraction witness");
    if (!all_finite(*prob.lipschitz_h))
        throw std::invalid_argument("solve_contraction: Lipschitz witness is not finite");

    const double h_inf = max_abs(*prob.lipschitz_h);
    rng_t rng = make_rng(opts.seed);
    const EmbeddingConstant cemb = estimate_lp_embedding_constant(prob.calc, prob.p, opts.trials, rng);
    const double delta_max = 1.0 / (2.0 * cemb.value * h_inf);

    SolveResult res;
    res.certified = prob.window_certified && prob.delta < delta_max;
    if (!(prob.delta < delta_max))
        res.notes = "delta >= contraction threshold 1/(2 C ||h||_inf); best-effort run, not certified. ";

    Field u = opts.initial.value_or(Field(prob.grid()));
    check_same_grid(prob.grid(), u.grid, "solve_contraction initial");

    double rate = 0.0, prev_step = -1.0, prev_res = std::numeric_limits<double>::infinity();
    int growth_run = 0;
    bool step_converged = false;
    for (int k = 1; k <= std::max(1, opts.max_iter_contraction); ++k) {
        const Field next = apply_Ts(prob.calc, rhs_field(prob, u));
        const double step = lp_norm(apply_A(prob.calc, next - u), prob.p);
        const double rnorm = residual(prob, next);
        res.history.push_back({k, rnorm, h_norm(prob.calc, next, prob.p), lp_norm(next, prob.p), 1.0, 0});
        if (prev_step > 1e-13) rate = std::max(rate, step / prev_step);
        prev_step = step;
        u = next;
        res.iterations = k;
        if (step <= opts.tol_step) {
            step_converged = true;
            break;
        }
        growth_run = rnorm > prev_res ? growth_run + 1 : 0;
        prev_res = rnorm;
        if (growth_run >= 10) {
            res.notes += "divergence: residual grew over 10 consecutive iterations. ";
            break;
        }
    }

    const double final_res = residual(prob, u);
    res.u = std::move(u);
    res.converged = step_converged && final_res <= opts.tol_residual && all_finite(res.u);
    res.constants["C_emb"] = cemb.value;
    res.constants["C_emb_drift"] = cemb.drift;
    res.constants["h_inf"] = h_inf;
    res.constants["delta"] = prob.delta;
    res.constants["delta_max"] = delta_max;
    res.constants["contraction_rate"] = rate;
    res.constants["residual"] = final_res;
    return res;
}

// ---- localized regime (cutoff equation) -------------------------------------

inline SolveResult solve_localized(const Problem& prob, const SolverOptions& opts = {}) {
    if (!prob.cutoff)
        throw std::invalid_argument("solve_localized: problem lacks the compactly supported cutoff");
    if (!(prob.alpha > 1.0)) throw std::invalid_argument("solve_localized: growth exponent alpha must exceed 1");
    const Grid& g = prob.grid();
    const double n = g.n;
    const double beta = prob.calc.symbol().beta;
    const double s = prob.calc.order();
    const double r_alpha = n * (prob.alpha - 1.0) / (prob.p * prob.alpha);
    const double m_floor = n / (prob.alpha * prob.p);
    const double m_reg = opts.m_reg.value_or(1.25 * m_floor);
    if (!(m_reg > m_floor))
        throw std::invalid_argument("solve_localized: need m_reg > n/(alpha p) = " + format_g17(m_floor));
    if (!(s > 4.0 * m_reg * prob.alpha / beta))
        throw std::invalid_argument("solve_localized: need s > 4 m alpha / beta = " +
                                    format_g17(4.0 * m_reg * prob.alpha / beta));
    const double reg_slack = 0.5 * s - 2.0 * (r_alpha + m_reg) / beta;
    const double ball_order = r_alpha + m_reg;

    SolveResult res;
    res.certified = prob.window_certified;
    Field u = opts.initial.value_or(Field(g));
    check_same_grid(g, u.grid, "solve_localized initial");

    double theta = opts.damping;
    double prev_res = std::numeric_limits<double>::infinity();
    int growth_at_floor = 0;
    for (int k = 1; k <= std::max(1, opts.max_iter); ++k) {
        const Field mapped = apply_Ts(prob.calc, rhs_field(prob, u));
        Field next = (1.0 - theta) * u + theta * mapped;
        int flag = 0;
        const double bnorm = sobolev_norm(next, ball_order, prob.p);
        if (bnorm > 1.0) {
            next = (1.0 / bnorm) * next;
            ++res.projection_events;
            flag = 1;
        }
        const double rnorm = residual(prob, next);
        res.history.push_back({k, rnorm, h_norm(prob.calc, next, prob.p),
                               lp_norm(next, prob.alpha * prob.p), theta, flag});
        const bool stationary = max_abs_diff(next, u) == 0.0;
        u = next;
        res.iterations = k;
        if (rnorm <= opts.tol_residual || stationary) break;
        if (rnorm > prev_res) {
            if (theta > opts.damping_floor)
                theta = std::max(0.5 * theta, opts.damping_floor);
            else if (++growth_at_floor >= 10) {
                res.notes = "nonconvergence: damping at floor with growing residual "
                            "(the fixed point exists by compactness; Picard need not reach it). ";
                break;
            }
        } else {
            growth_at_floor = 0;
        }
        prev_res = rnorm;
    }

    const double final_res = residual(prob, u);
    res.u = std::move(u);
    res.converged = final_res <= opts.tol_residual && all_finite(res.u);
    res.constants["r_alpha"] = r_alpha;
    res.constants["m_reg"] = m_reg;
    res.constants["reg_slack"] = reg_slack;
    res.constants["ball_order"] = ball_order;
    res.constants["delta"] = prob.delta;
    res.constants["residual"] = final_res;
    return res;
}

// ---- radial regime -----------------------------------------------------------

namespace detail {
// V must depend on x only through |x|: compare across exact-|x| grid
// symmetries (sign flips and axis permutations).
inline void validate_radial_nonlinearity(const Problem& prob) {
    const Grid& g = prob.grid();
    const double ys[] = {-1.3, 0.0, 0.4, 2.1};
    for (std::size_t i = 0; i < g.size(); i += std::max<std::size_t>(1, g.size() / 64)) {
        const auto x = g.node(i);
        std::array<double, 3> flipped{-x[0], x[1], x[2]};
        std::array<double, 3> swapped = g.n >= 2 ? std::array<double, 3>{x[1], x[0], x[2]} : x;
        for (double y : ys) {
            const double v = prob.V(x, y);
            const double scale = 1.0 + std::fabs(v);
            if (std::fabs(prob.V(flipped, y) - v) > 1e-12 * scale ||
                std::fabs(prob.V(swapped, y) - v) > 1e-12 * scale)
                throw std::invalid_argument("solve_radial: nonlinearity is not spherically symmetric in x");
        }
    }
}
} // namespace detail

inline SolveResult solve_radial(const Problem& prob, const SolverOptions& opts = {}) {
    if (!prob.radial) throw std::invalid_argument("solve_radial: problem is not flagged radial");
    if (!(prob.alpha > 1.0)) throw std::invalid_argument("solve_radial: growth exponent alpha must exceed 1");
    if (!(prob.growth_C > 0.0))
        throw std::invalid_argument("solve_radial: growth constant must be positive");
    if (!std::isfinite(prob.growth_C) && !opts.epsilon)
        throw std::invalid_argument(
            "solve_radial: no finite growth certificate; an explicit ball radius epsilon is required");
    detail::validate_radial_nonlinearity(prob);
    const Grid& g = prob.grid();
    check_same_grid(g, prob.h_growth.grid, "solve_radial h witness");
    check_same_grid(g, prob.g_growth.grid, "solve_radial g witness");
    if (!all_finite(prob.h_growth) || !all_finite(prob.g_growth))
        throw std::invalid_argument("solve_radial: growth witnesses are not finite");

    SolveResult res;
    rng_t rng = make_rng(opts.seed);
    EmbeddingConstant est;
    double n_emb = 0.0;
    if (opts.n_emb) {
        n_emb = *opts.n_emb;
    } else {
        est = estimate_embedding_constant(prob.calc, prob.p, prob.alpha, std::max(100, opts.trials), rng);
        n_emb = est.value;
    }

    const double C = prob.growth_C;
    const double D = std::pow(2.0, prob.p) * std::pow(C, prob.p) * n_emb; // 2^p C^p N
    const double eps_max = std::pow(D, 1.0 / (1.0 - prob.alpha));
    // auto choice maximizes rho_eps = eps/D - eps^alpha over (0, eps_max)
    const double eps = opts.epsilon.value_or(std::pow(prob.alpha * D, 1.0 / (1.0 - prob.alpha)));
    const double rho_eps = eps / D - std::pow(eps, prob.alpha);
    const double h_p = lp_norm(prob.h_growth, prob.p);

    res.certified = prob.window_certified && rho_eps > 0.0 && h_p < rho_eps;
    if (!(rho_eps > 0.0))
        res.notes += "rho_eps <= 0 for the chosen ball radius (needs eps < (2^p C^p N)^{1/(1-alpha)}); "
                     "running uncertified. ";
    else if (!(h_p < rho_eps))
        res.notes += "forcing too large: ||h||_p >= rho_eps; running uncertified. ";

    Field u = radial_project(opts.initial.value_or(Field(g)));
    double theta = opts.damping;
    double prev_res = std::numeric_limits<double>::infinity();
    int growth_at_floor = 0;
    for (int k = 1; k <= std::max(1, opts.max_iter); ++k) {
        const Field mapped = radial_project(apply_Ts(prob.calc, rhs_field(prob, u)));
        Field next = (1.0 - theta) * u + theta * mapped;
        int flag = 0;
        const double ball = lp_norm(next, prob.alpha * prob.p);
        if (ball > eps) {
            next = (eps / ball) * next;
            ++res.projection_events;
            flag = 1;
        }
        const double rnorm = residual(prob, next);
        res.history.push_back({k, rnorm, h_norm(prob.calc, next, prob.p),
                               lp_norm(next, prob.alpha * prob.p), theta, flag});
        const bool stationary = max_abs_diff(next, u) == 0.0;
        u = next;
        res.iterations = k;
        if (rnorm <= opts.tol_residual || stationary) break;
        if (rnorm > prev_res) {
            if (theta > opts.damping_floor)
                theta = std::max(0.5 * theta, opts.damping_floor);
            else if (++growth_at_floor >= 10) {
                res.notes += "nonconvergence: damping at floor with growing residual. ";
                break;
            }
        } else {
            growth_at_floor = 0;
        }
        prev_res = rnorm;
    }

    const double final_res = residual(prob, u);
    const double defect = radial_defect(u);
    const double final_ball = lp_norm(u, prob.alpha * prob.p);
    res.u = std::move(u);
    res.converged = final_res <= opts.tol_residual && defect <= 1e-10 &&
                    final_ball <= eps * (1.0 + 1e-12) && all_finite(res.u);
    res.constants["N_emb"] = n_emb;
    if (!opts.n_emb) res.constants["N_emb_drift"] = est.drift;
    res.constants["growth_C"] = C;
    res.constants["alpha"] = prob.alpha;
    res.constants["p"] = prob.p;
    res.constants["r_alpha"] = g.n * (prob.alpha - 1.0) / (prob.p * prob.alpha);
    res.constants["eps"] = eps;
    res.constants["eps_max"] = eps_max; // admissible radii satisfy eps < eps_max (rho_eps > 0)
    res.constants["rho_eps"] = rho_eps;
    res.constants["h_lp_norm"] = h_p;
    res.constants["g_lq_norm"] = lp_norm(prob.g_growth, prob.alpha * prob.p / (prob.alpha - 1.0));
    res.constants["residual"] = final_res;
    res.constants["radial_defect"] = defect;
    res.constants["ball_norm"] = final_ball;
    return res;
}

} // namespace fcalc
