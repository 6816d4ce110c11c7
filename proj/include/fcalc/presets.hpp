#pragma once

// Ready-made problem instances for the physically motivated equations:
// the massive fractional family (generalized equation, Allen-Cahn type,
// power nonlinearity), the pure-power L^2 family (Benjamin-Ono,
// Peierls-Nabarro, the m = 0 cubic), and the fractional NLS reduction.
// Every builder validates the parameter window its certificate depends
// on; building outside a window requires the explicit uncertified
// override.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcalc/solvers.hpp"

namespace fcalc {

struct preset_window_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct PresetInfo {
    std::string name;
    std::string certificate;
    std::string constraints;
};

inline std::vector<PresetInfo> presets_catalog() {
    return {
        {"linear", "linear solve, exact norm identity", "none"},
        {"contraction", "Banach fixed point", "delta < 1/(2 C ||h||_inf), Lipschitz V"},
        {"localized", "compact self-map on a Sobolev ball", "m > n/(alpha p), s > 4 m alpha / beta, compact cutoff"},
        {"gp", "radial fixed point, massive fractional symbol", "s > 4n/gamma, 0 < gamma < 1, m != 0"},
        {"allen-cahn", "radial fixed point, cubic + radial bump", "s > 4n/gamma; ||rho||_p < rho_eps at solve time"},
        {"power", "radial fixed point, |u|^beta u + radial bump", "s > 4n/gamma; ||rho||_p < rho_eps at solve time"},
        {"l2", "ellipticity-only radial theory (s = p = 2)", "gamma > (n/2) delta/(1+delta), 0 < gamma < 1"},
        {"benjamin-ono", "ellipticity-only radial theory, V = u^2", "gamma > n/4"},
        {"peierls-nabarro", "ellipticity-only radial theory, V = d(|x|) sin u / kappa", "gamma > (n/2) delta/(1+delta)"},
        {"allen-cahn-a0", "ellipticity-only radial theory, V = u^3", "gamma > n/3"},
        {"fnls", "ellipticity-only radial theory, V = |u|^{p-2} u", "2 s_nls in the power-window for (n, p-2); mu > m^{2 s_nls} on the absorbing split"},
    };
}

// Smooth radial bump of compact support: amp * exp(1 - 1/(1 - (|x|/w)^2))
// inside |x| < w, zero outside.
inline Field radial_bump(const Grid& g, double amplitude, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("radial_bump: width must be positive");
    Field f(g);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto x = g.node(i);
        double r2 = 0.0;
        for (int d = 0; d < g.n; ++d) r2 += x[d] * x[d];
        const double q = r2 / (width * width);
        f.values[i] = q < 1.0 ? amplitude * std::exp(1.0 - 1.0 / (1.0 - q)) : 0.0;
    }
    return f;
}

inline Field gaussian_field(const Grid& g, double amplitude = 1.0, double sigma2 = 1.0) {
    Field f(g);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto x = g.node(i);
        double r2 = 0.0;
        for (int d = 0; d < g.n; ++d) r2 += x[d] * x[d];
        f.values[i] = amplitude * std::exp(-r2 / (2.0 * sigma2));
    }
    return f;
}

// Fit the smallest constant making both growth inequalities
//   |V(x,y)|     <= C (|h(x)| + |y|^alpha)
//   |dV/dy(x,y)| <= C (|g(x)| + |y|^{alpha-1})
// hold on a ~10^4-point sample of (node) x [-5, 5]. Returns +inf when a
// sample point admits no constant (nonzero V against a zero envelope).
inline double fit_growth_constant(const Problem& prob) {
    const Grid& g = prob.grid();
    const std::size_t stride = std::max<std::size_t>(1, g.size() / 128);
    double C = 0.0;
    for (std::size_t i = 0; i < g.size(); i += stride) {
        const auto x = g.node(i);
        const double habs = std::fabs(prob.h_growth.values[i]);
        const double gabs = std::fabs(prob.g_growth.values[i]);
        for (int j = 0; j <= 100; ++j) {
            const double y = -5.0 + 0.1 * j;
            const double envV = habs + std::pow(std::fabs(y), prob.alpha);
            const double envD = gabs + std::pow(std::fabs(y), prob.alpha - 1.0);
            const double v = std::fabs(prob.V(x, y));
            const double d = std::fabs(prob.dV_dy(x, y));
            if (v > 0.0) C = envV > 0.0 ? std::max(C, v / envV) : std::numeric_limits<double>::infinity();
            if (d > 0.0) C = envD > 0.0 ? std::max(C, d / envD) : std::numeric_limits<double>::infinity();
        }
    }
    return C;
}

// ---- massive fractional family ----------------------------------------------

struct GpSpec {
    double m = 1.0;
    double gamma = 0.5;
    double s = 9.0;
    double p = 2.0;
    nonlinearity_fn V;
    nonlinearity_fn dV_dy;
    double alpha = 2.0;
    Field h_growth;
    Field g_growth;
};

// Generalized massive-fractional problem with the radial flag set.
inline Problem preset_gp(const Grid& grid, const GpSpec& spec, bool uncertified = false) {
    if (!(spec.s > 4.0 * grid.n / spec.gamma)) {
        if (!uncertified)
            throw preset_window_error("gp preset: requires s > 4n/gamma = " +
                                      format_g17(4.0 * grid.n / spec.gamma) +
                                      " (in particular s = 2 is excluded for gamma < 1)");
    }
    Problem prob(Calculus(fractional_symbol(spec.gamma, spec.m), spec.s, grid), spec.p);
    prob.V = spec.V;
    prob.dV_dy = spec.dV_dy;
    prob.alpha = spec.alpha;
    prob.h_growth = spec.h_growth.values.empty() ? Field(grid) : spec.h_growth;
    prob.g_growth = spec.g_growth.values.empty() ? Field(grid) : spec.g_growth;
    prob.radial = true;
    prob.window_certified = spec.s > 4.0 * grid.n / spec.gamma;
    prob.certificate = prob.window_certified
                           ? "radial fixed point for the massive fractional symbol"
                           : "uncertified (outside the gp window)";
    prob.growth_C = fit_growth_constant(prob);
    if (!std::isfinite(prob.growth_C))
        throw preset_window_error("gp preset: growth witnesses do not dominate the nonlinearity");
    return prob;
}

inline bool field_is_radial(const Field& f) { return radial_defect(f) <= 1e-12 * (1.0 + max_abs(f)); }

// kappa u^3 + rho(|x|); rho continuous, radial, compactly supported.
inline Problem preset_allen_cahn(const Grid& grid, double m, double gamma, double s, double kappa,
                                 const Field& rho, double p = 2.0, bool uncertified = false) {
    check_same_grid(grid, rho.grid, "preset_allen_cahn rho");
    if (!field_is_radial(rho))
        throw std::invalid_argument("preset_allen_cahn: rho must be radial");
    GpSpec spec;
    spec.m = m;
    spec.gamma = gamma;
    spec.s = s;
    spec.p = p;
    spec.alpha = 3.0;
    const std::vector<double> rho_vals = rho.values;
    const Grid grid_copy = grid;
    spec.V = [rho_vals, grid_copy, kappa](const std::array<double, 3>& x, double y) {
        // rho is sampled on the grid; locate the node from its coordinates
        return kappa * y * y * y + rho_vals[grid_copy.node_index_of(x)];
    };
    spec.dV_dy = [kappa](const std::array<double, 3>&, double y) { return 3.0 * kappa * y * y; };
    spec.h_growth = rho;
    spec.g_growth = Field(grid);
    Problem prob = preset_gp(grid, spec, uncertified);
    prob.certificate += "; cubic + radial bump";
    return prob;
}

// |u|^{beta_pow} u + rho(|x|)
inline Problem preset_power(const Grid& grid, double m, double gamma, double s, double beta_pow,
                            const Field& rho, double p = 2.0, bool uncertified = false) {
    check_same_grid(grid, rho.grid, "preset_power rho");
    if (!(beta_pow > 0.0)) throw std::invalid_argument("preset_power: beta_pow must be positive");
    if (!field_is_radial(rho)) throw std::invalid_argument("preset_power: rho must be radial");
    GpSpec spec;
    spec.m = m;
    spec.gamma = gamma;
    spec.s = s;
    spec.p = p;
    spec.alpha = beta_pow + 1.0;
    const std::vector<double> rho_vals = rho.values;
    const Grid grid_copy = grid;
    spec.V = [rho_vals, grid_copy, beta_pow](const std::array<double, 3>& x, double y) {
        return std::pow(std::fabs(y), beta_pow) * y + rho_vals[grid_copy.node_index_of(x)];
    };
    spec.dV_dy = [beta_pow](const std::array<double, 3>&, double y) {
        return (beta_pow + 1.0) * std::pow(std::fabs(y), beta_pow);
    };
    spec.h_growth = rho;
    spec.g_growth = Field(grid);
    Problem prob = preset_gp(grid, spec, uncertified);
    prob.certificate += "; power nonlinearity + radial bump";
    return prob;
}

// ---- ellipticity-only L^2 family ---------------------------------------------

struct L2Spec {
    double gamma = 0.5;
    double kappa = 1.0;
    double delta_growth = 1.0; // growth exponent defect: alpha = 1 + delta
    nonlinearity_fn V;
    nonlinearity_fn dV_dy;
    Field h_growth;
    Field g_growth;
    std::string label = "l2";
};

// Problems of the form (1/kappa)(-Delta)^{gamma/2} u = -u + V(x,u),
// normalized to [1 + a(-Delta)] u = V with a(t) = t^{gamma/2}/kappa,
// s = 2, p = 2. Only ellipticity of the symbol is claimed; its
// derivative is singular at zero, which is recorded on the problem.
inline Problem preset_l2_theory(const Grid& grid, const L2Spec& spec, bool uncertified = false) {
    const double n = grid.n;
    const double window = 0.5 * n * spec.delta_growth / (1.0 + spec.delta_growth);
    if (!(spec.gamma > window) && !uncertified)
        throw preset_window_error("l2 preset (" + spec.label + "): requires gamma > (n/2) delta/(1+delta) = " +
                                  format_g17(window));
    if (!(spec.gamma > 0.0 && spec.gamma < 1.0))
        throw std::invalid_argument("l2 preset: gamma must lie in (0,1)");
    Problem prob(Calculus(power_symbol(spec.gamma, spec.kappa), 2.0, grid), 2.0);
    prob.V = spec.V;
    prob.dV_dy = spec.dV_dy;
    prob.alpha = 1.0 + spec.delta_growth;
    prob.h_growth = spec.h_growth.values.empty() ? Field(grid) : spec.h_growth;
    prob.g_growth = spec.g_growth.values.empty() ? Field(grid) : spec.g_growth;
    prob.radial = true;
    prob.window_certified = spec.gamma > window;
    prob.certificate = (prob.window_certified ? "ellipticity-only radial theory (" + spec.label + ")"
                                              : "uncertified (outside the gamma window)");
    prob.notes = "symbol derivative singular at 0: admissibility-class checks skipped, "
                 "ellipticity (G1/G2) only; multiplier sampling excludes the origin ball.";
    prob.growth_C = fit_growth_constant(prob);
    if (!std::isfinite(prob.growth_C))
        throw preset_window_error("l2 preset: growth witnesses do not dominate the nonlinearity");
    return prob;
}

// (-Delta)^{gamma/2} u = u^2 - u  ->  V = u^2, kappa = 1
inline Problem preset_benjamin_ono(const Grid& grid, double gamma, bool uncertified = false) {
    L2Spec spec;
    spec.gamma = gamma;
    spec.kappa = 1.0;
    spec.delta_growth = 1.0; // quadratic growth: window gamma > n/4
    spec.label = "benjamin-ono";
    spec.V = [](const std::array<double, 3>&, double y) { return y * y; };
    spec.dV_dy = [](const std::array<double, 3>&, double y) { return 2.0 * y; };
    spec.h_growth = Field(grid);
    spec.g_growth = Field(grid);
    return preset_l2_theory(grid, spec, uncertified);
}

// (-Delta)^{gamma/2} u = -kappa u + d(|x|) sin u  ->  V = d sin(u)/kappa, h = g = d
inline Problem preset_peierls_nabarro(const Grid& grid, double gamma, double kappa, const Field& d,
                                      double delta_growth = 0.5, bool uncertified = false) {
    check_same_grid(grid, d.grid, "preset_peierls_nabarro d");
    if (!field_is_radial(d))
        throw std::invalid_argument("peierls-nabarro preset: d must be radial");
    L2Spec spec;
    spec.gamma = gamma;
    spec.kappa = kappa;
    spec.delta_growth = delta_growth;
    spec.label = "peierls-nabarro";
    const std::vector<double> dv = d.values;
    const Grid gc = grid;
    spec.V = [dv, gc, kappa](const std::array<double, 3>& x, double y) {
        return dv[gc.node_index_of(x)] * std::sin(y) / kappa;
    };
    spec.dV_dy = [dv, gc, kappa](const std::array<double, 3>& x, double y) {
        return dv[gc.node_index_of(x)] * std::cos(y) / kappa;
    };
    // the same compactly supported profile witnesses both growth bounds
    Field dk = d;
    for (auto& v : dk.values) v = std::fabs(v) / kappa;
    spec.h_growth = dk;
    spec.g_growth = dk;
    return preset_l2_theory(grid, spec, uncertified);
}

// m = 0 cubic: (-Delta)^{gamma/2} u = -u + u^3
inline Problem preset_allen_cahn_a0(const Grid& grid, double gamma, bool uncertified = false) {
    L2Spec spec;
    spec.gamma = gamma;
    spec.kappa = 1.0;
    spec.delta_growth = 2.0; // cubic growth: window gamma > n/3
    spec.label = "allen-cahn-a0";
    spec.V = [](const std::array<double, 3>&, double y) { return y * y * y; };
    spec.dV_dy = [](const std::array<double, 3>&, double y) { return 3.0 * y * y; };
    spec.h_growth = Field(grid);
    spec.g_growth = Field(grid);
    return preset_l2_theory(grid, spec, uncertified);
}

// ---- fractional NLS ------------------------------------------------------------

// [(-Delta + m^2)^{s_nls} - m^{2 s_nls}] u + mu u = |u|^{p_pow - 2} u.
// The canonical left side fixes neither linear term; the split is an
// explicit parameter:
//   absorb: kappa_eff = mu - m^{2 s_nls} > 0 joins the left side exactly;
//   keep:   V keeps m^{2 s_nls} u + |u|^{p-2} u, which admits no L^p
//           growth witness (a constant envelope is not integrable), so
//           this split builds only with the uncertified override.
enum class FnlsSplit { absorb, keep };

inline Problem preset_fnls(const Grid& grid, double m, double s_nls, double mu, double p_pow,
                           FnlsSplit split = FnlsSplit::absorb, bool uncertified = false) {
    if (!(p_pow > 2.0)) throw std::invalid_argument("fnls preset: power p must exceed 2");
    const double beta_pow = p_pow - 2.0;
    const double gamma_eff = 2.0 * s_nls;
    const double window = grid.n == 1 ? beta_pow / (2.0 * (beta_pow + 1.0))
                                      : beta_pow / (beta_pow + 1.0);
    if (grid.n > 2) throw preset_window_error("fnls preset: the power window covers n <= 2 only");
    if (!(gamma_eff > window && gamma_eff < 1.0) && !uncertified)
        throw preset_window_error("fnls preset: 2 s_nls = " + format_g17(gamma_eff) +
                                  " outside the admissible window (" + format_g17(window) + ", 1)");

    const double mass_term = m == 0.0 ? 0.0 : std::pow(m * m, s_nls);
    double kappa_eff = mu;
    nonlinearity_fn V, dV;
    std::string split_note;
    if (split == FnlsSplit::absorb) {
        kappa_eff = mu - mass_term;
        if (!(kappa_eff > 0.0))
            throw preset_window_error("fnls preset: absorbing split needs mu > m^{2 s_nls}");
        V = [kappa_eff, beta_pow](const std::array<double, 3>&, double y) {
            return std::pow(std::fabs(y), beta_pow) * y / kappa_eff;
        };
        dV = [kappa_eff, beta_pow](const std::array<double, 3>&, double y) {
            return (beta_pow + 1.0) * std::pow(std::fabs(y), beta_pow) / kappa_eff;
        };
        split_note = "split=absorb: kappa_eff = mu - m^{2 s_nls} = " + format_g17(kappa_eff);
    } else {
        if (!uncertified)
            throw preset_window_error("fnls preset: split=keep leaves a linear term in V whose growth "
                                      "witness is not integrable; pass the uncertified override to build it");
        V = [mu, mass_term, beta_pow](const std::array<double, 3>&, double y) {
            return (mass_term * y + std::pow(std::fabs(y), beta_pow) * y) / mu;
        };
        dV = [mu, mass_term, beta_pow](const std::array<double, 3>&, double y) {
            return (mass_term + (beta_pow + 1.0) * std::pow(std::fabs(y), beta_pow)) / mu;
        };
        split_note = "split=keep (uncertified)";
    }

    Symbol sym = m == 0.0 ? power_symbol(gamma_eff, kappa_eff)
                          : scaled_fractional_symbol(gamma_eff, m, kappa_eff);
    Problem prob(Calculus(std::move(sym), 2.0, grid), 2.0);
    prob.V = V;
    prob.dV_dy = dV;
    prob.alpha = p_pow - 1.0;
    prob.h_growth = Field(grid);
    prob.g_growth = Field(grid);
    prob.radial = true;
    prob.window_certified = split == FnlsSplit::absorb && gamma_eff > window && gamma_eff < 1.0;
    prob.certificate = prob.window_certified
                           ? "ellipticity-only radial theory (fnls); " + split_note
                           : "uncertified; " + split_note;
    prob.notes = "V(x,0) = 0: the zero field is an exact discrete solution (trivial branch).";
    if (split == FnlsSplit::keep) {
        prob.growth_C = std::numeric_limits<double>::infinity();
    } else {
        prob.growth_C = fit_growth_constant(prob);
    }
    return prob;
}

} // namespace fcalc
