#pragma once

// Command layer shared by the command-line binary and the test suites.
// Exit-code contract: 0 ok/certified, 1 usage error, 2 check failed,
// 3 uncertified success, 4 nonconvergence. Diagnostics go to stderr;
// result files are written into the output directory.

#include <filesystem>
#include <iostream>
#include <string>

#include "fcalc/config.hpp"
#include "fcalc/presets.hpp"
#include "fcalc/solvers.hpp"

namespace fcalc {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_check_failed = 2,
    exit_uncertified = 3,
    exit_nonconverged = 4,
};

struct CliOptions {
    std::string out_dir = ".";
    std::uint64_t seed = 12345;
    bool uncertified = false;
    std::string in_path; // optional input field for `norms`
};

namespace detail {

inline Grid grid_from_config(const RunConfig& cfg) {
    return make_grid(cfg.require_int("grid", "n"), cfg.require_int("grid", "N"),
                     cfg.require_double("grid", "L"));
}

inline std::string out_path(const CliOptions& opts, const std::string& name) {
    std::filesystem::create_directories(opts.out_dir);
    return (std::filesystem::path(opts.out_dir) / name).string();
}

inline Field forcing_from_config(const RunConfig& cfg, const Grid& g, rng_t& rng) {
    const std::string kind = cfg.get_string("equation", "forcing", "gaussian");
    const double amp = cfg.get_double("equation", "forcing_amplitude", 1.0);
    const double width = cfg.get_double("equation", "forcing_width", 1.0);
    if (kind == "gaussian") return gaussian_field(g, amp, width * width);
    if (kind == "bump") return radial_bump(g, amp, width);
    if (kind == "random") return random_band_limited(g, rng, 0, amp);
    throw config_error("config: unknown forcing '" + kind + "'");
}

inline std::optional<Field> initial_from_config(const RunConfig& cfg, const Grid& g, rng_t& rng) {
    const std::string kind = cfg.get_string("equation", "initial", "zero");
    const double amp = cfg.get_double("equation", "initial_amplitude", 0.05);
    const double width = cfg.get_double("equation", "initial_width", 3.0);
    if (kind == "zero") return std::nullopt;
    if (kind == "bump") return radial_bump(g, amp, width);
    if (kind == "random") return random_band_limited(g, rng, 0, amp);
    throw config_error("config: unknown initial '" + kind + "'");
}

inline SolverOptions solver_options_from_config(const RunConfig& cfg, std::uint64_t seed) {
    SolverOptions opts;
    opts.tol_step = cfg.get_double("solver", "tol_step", 1e-10);
    opts.tol_residual = cfg.get_double("solver", "tol_residual", 1e-8);
    opts.max_iter = cfg.get_int("solver", "max_iter", 1000);
    opts.max_iter_contraction = cfg.get_int("solver", "max_iter_contraction", 500);
    opts.damping = cfg.get_double("solver", "damping", 1.0);
    opts.epsilon = cfg.get_auto_double("solver", "epsilon");
    opts.n_emb = cfg.get_auto_double("solver", "n_emb");
    opts.m_reg = cfg.get_auto_double("solver", "m_reg");
    opts.trials = cfg.get_int("solver", "trials", 200);
    opts.seed = seed;
    return opts;
}

inline void emit_solve_outputs(const RunConfig& cfg, const CliOptions& opts,
                               const SolveResult& res, const std::string& preset,
                               const std::string& certificate) {
    if (cfg.get_bool("output", "emit_solution", true))
        write_field_csv(res.u, out_path(opts, "solution.csv"));
    if (cfg.get_bool("output", "emit_history", true))
        write_history_csv(res, out_path(opts, "history.csv"));
    if (cfg.get_bool("output", "emit_constants", true)) {
        KeyValueReport rep;
        rep.add("preset", preset);
        rep.add("seed", static_cast<int>(opts.seed));
        rep.add("converged", res.converged);
        rep.add("certified", res.certified);
        rep.add("iterations", res.iterations);
        rep.add("projection_events", res.projection_events);
        for (const auto& [k, v] : res.constants) rep.add(k, v);
        rep.add("certificate", certificate);
        if (!res.notes.empty()) rep.add("notes", res.notes);
        rep.write(out_path(opts, "constants.txt"));
    }
}

inline int solve_exit_code(const SolveResult& res) {
    if (!res.converged) return exit_nonconverged;
    return res.certified ? exit_ok : exit_uncertified;
}

} // namespace detail

// check-symbol: admissibility-class verdict for the configured symbol.
inline int cmd_check_symbol(const RunConfig& cfg, const CliOptions& opts) {
    const int n = cfg.require_int("grid", "n");
    const Symbol sym = symbol_from_config(cfg);
    const double s = cfg.require_double("symbol", "s");
    const ClassReport rep = check_class(sym, s, n);
    rep.serialize().write(detail::out_path(opts, "class_report.txt"));
    return rep.verdict ? exit_ok : exit_check_failed;
}

// verify-multiplier: Mikhlin-type certification of the configured multiplier.
inline int cmd_verify_multiplier(const RunConfig& cfg, const CliOptions& opts) {
    const int n = cfg.require_int("grid", "n");
    const Symbol sym = symbol_from_config(cfg);
    const std::string kind = cfg.get_string("symbol", "multiplier", "m_mu");
    const double s = cfg.get_double("symbol", "s", 2.0);

    MultiplierSpec spec = [&] {
        if (kind == "m_mu")
            return MultiplierSpec::make_m_mu(sym, cfg.get_double("symbol", "mu", s));
        if (kind == "varphi")
            return MultiplierSpec::make_varphi(sym, cfg.get_double("symbol", "r", 1.0), s);
        if (kind == "exp_m")
            return MultiplierSpec::make_exp_m(cfg.get_double("symbol", "c", 1.0));
        throw config_error("config: unknown multiplier kind '" + kind + "'");
    }();

    rng_t rng = make_rng(opts.seed);
    const MultiplierReport rep = mikhlin_certify(spec, n, rng);
    // the sufficient-condition certificate applies to m_mu only for mu >= s
    const bool certified = kind != "m_mu" || spec.mu >= s;
    KeyValueReport out = rep.serialize();
    out.add("certified", certified);
    out.add("seed", static_cast<int>(opts.seed));
    out.write(detail::out_path(opts, "multiplier_report.txt"));
    if (certified && !rep.pass) return exit_check_failed;
    return exit_ok;
}

// kernel: continuum-faithful kernel of T_s plus its refinement stability.
inline int cmd_kernel(const RunConfig& cfg, const CliOptions& opts) {
    const Grid g = detail::grid_from_config(cfg);
    const Symbol sym = symbol_from_config(cfg);
    const double s = cfg.require_double("symbol", "s");
    const Calculus calc(sym, s, g);
    const Field K = kernel_K(calc); // throws the admissibility error below 4n
    write_field_csv(K, detail::out_path(opts, "kernel.csv"));

    const Grid g2 = make_grid(g.n, 2 * g.npts, 2.0 * g.half_width);
    const Field K2 = kernel_K(Calculus(sym, s, g2));
    const double norm = lp_norm(K, 2.0);
    const double norm2 = lp_norm(K2, 2.0);
    KeyValueReport rep;
    rep.add("symbol", sym.label);
    rep.add("s", s);
    rep.add("l2_norm", norm);
    rep.add("l2_norm_refined", norm2);
    rep.add("stability_ratio", norm / norm2);
    rep.write(detail::out_path(opts, "constants.txt"));
    return exit_ok;
}

// norms: discrete norms of a field (from --in, or the configured forcing).
inline int cmd_norms(const RunConfig& cfg, const CliOptions& opts) {
    const Grid g = detail::grid_from_config(cfg);
    const Symbol sym = symbol_from_config(cfg);
    const double s = cfg.get_double("symbol", "s", 2.0);
    const double p = cfg.get_double("equation", "p", 2.0);
    const double r = cfg.get_double("symbol", "r", 1.0);
    rng_t rng = make_rng(opts.seed);
    const Field f = opts.in_path.empty() ? detail::forcing_from_config(cfg, g, rng)
                                         : read_field_csv(opts.in_path);
    if (!(f.grid == g)) throw config_error("norms: input field grid does not match [grid]");
    const Calculus calc(sym, s, g);
    KeyValueReport rep;
    rep.add("p", p);
    rep.add("lp_norm", lp_norm(f, p));
    rep.add("l2_norm", lp_norm(f, 2.0));
    rep.add("linf_norm", lp_norm(f, std::numeric_limits<double>::infinity()));
    rep.add("h_norm", h_norm(calc, f, p));
    rep.add("sobolev_r", r);
    rep.add("sobolev_norm", sobolev_norm(f, r, p));
    rep.write(detail::out_path(opts, "norms.txt"));
    return exit_ok;
}

// presets: catalog listing on stdout.
inline int cmd_presets(std::ostream& os = std::cout) {
    for (const auto& info : presets_catalog())
        os << info.name << "\t" << info.certificate << "\t" << info.constraints << "\n";
    return exit_ok;
}

// solve: dispatch on [equation] preset.
inline int cmd_solve(const RunConfig& cfg, const CliOptions& opts) {
    const Grid g = detail::grid_from_config(cfg);
    const std::string preset = cfg.require_string("equation", "preset");
    const double p = cfg.get_double("equation", "p", 2.0);
    rng_t rng = make_rng(opts.seed);
    SolverOptions sopts = detail::solver_options_from_config(cfg, opts.seed);
    sopts.initial = detail::initial_from_config(cfg, g, rng);

    if (preset == "linear") {
        const Symbol sym = symbol_from_config(cfg);
        const Calculus calc(sym, cfg.require_double("symbol", "s"), g);
        const Field forcing = detail::forcing_from_config(cfg, g, rng);
        const SolveResult res = solve_linear(calc, forcing, p);
        detail::emit_solve_outputs(cfg, opts, res, preset, "linear solve, exact norm identity");
        return detail::solve_exit_code(res);
    }

    if (preset == "contraction") {
        const Symbol sym = symbol_from_config(cfg);
        Problem prob(Calculus(sym, cfg.get_double("symbol", "s", 2.0), g), p);
        prob.V = [](const std::array<double, 3>& x, double y) {
            return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])) * std::cos(y);
        };
        prob.dV_dy = [](const std::array<double, 3>& x, double y) {
            return -std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])) * std::sin(y);
        };
        prob.delta = cfg.get_double("equation", "delta", 0.1);
        prob.lipschitz_h = gaussian_field(g, 1.0, 0.5);
        prob.h_growth = Field(g);
        prob.g_growth = Field(g);
        const SolveResult res = solve_contraction(prob, sopts);
        detail::emit_solve_outputs(cfg, opts, res, preset, "Banach fixed point");
        return detail::solve_exit_code(res);
    }

    if (preset == "localized") {
        const Symbol sym = symbol_from_config(cfg);
        Problem prob(Calculus(sym, cfg.require_double("symbol", "s"), g), p);
        prob.V = [](const std::array<double, 3>& x, double y) {
            return y * y + std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
        };
        prob.dV_dy = [](const std::array<double, 3>&, double y) { return 2.0 * y; };
        prob.alpha = cfg.get_double("equation", "alpha", 2.0);
        prob.h_growth = gaussian_field(g, 1.0, 0.5);
        prob.g_growth = Field(g);
        prob.cutoff = radial_bump(g, 1.0, cfg.get_double("equation", "cutoff_width", g.half_width / 3.0));
        prob.delta = cfg.get_double("equation", "delta", 1e-2);
        const SolveResult res = solve_localized(prob, sopts);
        detail::emit_solve_outputs(cfg, opts, res, preset, "compact self-map on a Sobolev ball");
        return detail::solve_exit_code(res);
    }

    // radial preset family
    Problem prob = [&]() -> Problem {
        if (preset == "allen-cahn" || preset == "gp") {
            const Field rho = radial_bump(g, cfg.get_double("equation", "rho_amplitude", 1e-3),
                                          cfg.get_double("equation", "rho_width", 2.0));
            return preset_allen_cahn(g, cfg.get_double("symbol", "m", 1.0),
                                     cfg.require_double("symbol", "gamma"),
                                     cfg.require_double("symbol", "s"),
                                     cfg.get_double("equation", "kappa", 1.0), rho, p,
                                     opts.uncertified);
        }
        if (preset == "power") {
            const Field rho = radial_bump(g, cfg.get_double("equation", "rho_amplitude", 1e-3),
                                          cfg.get_double("equation", "rho_width", 2.0));
            return preset_power(g, cfg.get_double("symbol", "m", 1.0),
                                cfg.require_double("symbol", "gamma"),
                                cfg.require_double("symbol", "s"),
                                cfg.get_double("equation", "beta_pow", 2.0), rho, p,
                                opts.uncertified);
        }
        if (preset == "benjamin-ono")
            return preset_benjamin_ono(g, cfg.require_double("symbol", "gamma"), opts.uncertified);
        if (preset == "peierls-nabarro") {
            const Field d = radial_bump(g, cfg.get_double("equation", "d_amplitude", 2e-4),
                                        cfg.get_double("equation", "d_width", 2.0));
            return preset_peierls_nabarro(g, cfg.require_double("symbol", "gamma"),
                                          cfg.get_double("equation", "kappa", 1.0), d,
                                          cfg.get_double("equation", "delta_growth", 0.5),
                                          opts.uncertified);
        }
        if (preset == "allen-cahn-a0")
            return preset_allen_cahn_a0(g, cfg.require_double("symbol", "gamma"), opts.uncertified);
        if (preset == "fnls") {
            const std::string split = cfg.get_string("equation", "split", "absorb");
            if (split != "absorb" && split != "keep")
                throw config_error("config: fnls split must be 'absorb' or 'keep'");
            return preset_fnls(g, cfg.get_double("symbol", "m", 0.0),
                               cfg.require_double("equation", "s_nls"),
                               cfg.require_double("equation", "mu_nls"),
                               cfg.get_double("equation", "p_pow", 4.0),
                               split == "absorb" ? FnlsSplit::absorb : FnlsSplit::keep,
                               opts.uncertified);
        }
        throw config_error("config: unknown preset '" + preset + "'");
    }();

    const SolveResult res = solve_radial(prob, sopts);
    detail::emit_solve_outputs(cfg, opts, res, preset, prob.certificate);
    return detail::solve_exit_code(res);
}

// Single entry point used by the binary: maps exceptions onto exit 1.
inline int run_command(const std::string& command, const std::string& config_path,
                       const CliOptions& opts) {
    try {
        if (command == "presets") return cmd_presets();
        const RunConfig cfg = RunConfig::parse_file(config_path);
        if (command == "check-symbol") return cmd_check_symbol(cfg, opts);
        if (command == "verify-multiplier") return cmd_verify_multiplier(cfg, opts);
        if (command == "solve") return cmd_solve(cfg, opts);
        if (command == "kernel") return cmd_kernel(cfg, opts);
        if (command == "norms") return cmd_norms(cfg, opts);
        std::cerr << "unknown command: " << command << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
}

} // namespace fcalc
