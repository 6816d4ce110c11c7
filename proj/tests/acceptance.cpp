// Acceptance suite: every release criterion at its pinned tolerance,
// one PASS/FAIL line per criterion. Exits nonzero if any line fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "fcalc/cli.hpp"
#include "test_util.hpp"

using namespace fcalc;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::vector<Criterion> results;

void record(const std::string& name, bool pass, const std::string& detail) {
    results.push_back({name, pass, detail});
    std::printf("[%s] %-28s %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct MatrixCase {
    Symbol sym;
    double s;
    int n;
};

std::vector<MatrixCase> solve_matrix() {
    std::vector<MatrixCase> cases;
    for (int n : {1, 2})
        for (double s : {2.0, 9.0, 17.0})
            for (int which : {0, 1})
                cases.push_back({which == 0 ? laplace_symbol() : fractional_symbol(0.5, 1.0), s, n});
    return cases;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// 1. exact norm identity of the linear solve across the full matrix
void criterion_norm_identity() {
    const auto t0 = std::chrono::steady_clock::now();
    rng_t rng = make_rng(101);
    double worst = 0.0;
    for (const auto& c : solve_matrix()) {
        const Grid g = fcalc_test::grid_for_order(c.sym, c.s, c.n, c.n == 1 ? 64 : 16, 1e3);
        const Calculus calc(c.sym, c.s, g);
        for (double p : {1.5, 2.0, 3.0}) {
            for (int rep = 0; rep < 50; ++rep) {
                const Field f = random_band_limited(g, rng);
                const double gnorm = lp_norm(f, p);
                if (gnorm == 0.0) continue;
                const double defect = std::fabs(h_norm(calc, apply_Ts(calc, f), p) - gnorm) / gnorm;
                worst = std::max(worst, defect);
            }
        }
    }
    const double dt = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf, "max relative defect %.3e (< 1e-12), %.2f s (< 10 s)", worst, dt);
    record("norm identity", worst < 1e-12 && dt < 10.0, buf);
}

// 2. A and T_s invert each other on the same matrix
void criterion_inverse_pair() {
    rng_t rng = make_rng(102);
    double worst = 0.0;
    for (const auto& c : solve_matrix()) {
        const Grid g = fcalc_test::grid_for_order(c.sym, c.s, c.n, c.n == 1 ? 64 : 16, 1e3);
        const Calculus calc(c.sym, c.s, g);
        for (int rep = 0; rep < 50; ++rep) {
            const Field f = random_band_limited(g, rng);
            const double scale = max_abs(f);
            if (scale == 0.0) continue;
            worst = std::max(worst, max_abs_diff(apply_A(calc, apply_Ts(calc, f)), f) / scale);
            worst = std::max(worst, max_abs_diff(apply_Ts(calc, apply_A(calc, f)), f) / scale);
        }
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "max relative round-trip error %.3e (< 1e-11)", worst);
    record("inverse pair", worst < 1e-11, buf);
}

// 3. kernel closed form and refinement stability of its L2 norm
void criterion_kernel_closed_form() {
    const auto t0 = std::chrono::steady_clock::now();
    const Grid g = make_grid(1, 512, 20.0);
    const Field K = kernel_K(Calculus(laplace_symbol(), 2.0, g));
    double max_err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.node(i)[0];
        if (std::fabs(x) <= 5.0)
            max_err = std::max(max_err, std::fabs(K[i] - 0.5 * std::exp(-std::fabs(x))));
    }
    const Field K0 = kernel_K(Calculus(laplace_symbol(), 2.0, make_grid(1, 256, 10.0)));
    const double drift = std::fabs(lp_norm(K, 2.0) / lp_norm(K0, 2.0) - 1.0);
    const double dt = seconds_since(t0);
    char buf[160];
    std::snprintf(buf, sizeof buf, "max |K - e^{-|x|}/2| = %.3e (< 1e-6), L2 drift %.4f (< 0.02), %.2f s (< 5 s)",
                  max_err, drift, dt);
    record("kernel closed form", max_err < 1e-6 && drift < 0.02 && dt < 5.0, buf);
}

// 4. two-route identity: spectral application against direct convolution
void criterion_two_route() {
    const Grid g = make_grid(1, 512, 20.0);
    const Calculus calc(laplace_symbol(), 2.0, g);
    const Field gauss = gaussian_field(g, 1.0, 1.0);
    const Field a = apply_Ts(calc, gauss);
    const Field b = convolve_with_kernel(calc, gauss);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += a[i] * a[i];
    }
    const double disc = std::sqrt(num / den);
    char buf[120];
    std::snprintf(buf, sizeof buf, "relative L2 discrepancy %.3e (< 1e-8)", disc);
    record("two-route identity", disc < 1e-8, buf);
}

// 5. multiplier certification for both class symbols; the counterexample
//    diverges with a fitted constant growing > 4x across the last rungs
void criterion_mikhlin() {
    rng_t rng = make_rng(105);
    bool pass = true;
    std::string note;
    const MatrixCase cases[] = {
        {laplace_symbol(), 2.0, 1},
        {laplace_symbol(), 4.0, 2},
        {fractional_symbol(0.5, 1.0), 9.0, 1},
        {fractional_symbol(0.5, 1.0), 17.0, 2},
    };
    for (const auto& c : cases) {
        for (double mu : {c.s, c.s + 1.0, 2.0 * c.s}) {
            const MultiplierReport rep = mikhlin_certify(MultiplierSpec::make_m_mu(c.sym, mu), c.n, rng);
            if (!rep.pass || !std::isfinite(rep.C)) {
                pass = false;
                note += c.sym.label + " mu=" + format_g17(mu) + " failed; ";
            }
        }
    }
    const ClassReport osc = check_class(oscillatory_symbol(), 4.0, 1);
    const double blowup = 1.0 / osc.g3.at(0).stability;
    const bool osc_ok = !osc.verdict && !osc.g3.at(0).pass && blowup > 4.0;
    if (!osc_ok) pass = false;
    char buf[160];
    std::snprintf(buf, sizeof buf, "12/12 multiplier certificates, counterexample G3 ratio %.1f (> 4) %s",
                  blowup, note.c_str());
    record("mikhlin certification", pass, buf);
}

// 6. derivative expansion against nested finite differences
void criterion_partials() {
    rng_t rng = make_rng(106);
    bool pass = true;
    const int a0[] = {0};
    const int a1[] = {1};
    const int a01[] = {0, 1};
    int cases = 0;
    for (const Symbol& sym : {laplace_symbol(), fractional_symbol(0.5, 1.0), exp_symbol(1.0)}) {
        for (double mu : {2.0, 9.0}) {
            const MultiplierSpec spec = MultiplierSpec::make_m_mu(sym, mu);
            pass = pass && fcalc_test::partials_match_fd(spec, a0, 1, 100, rng);
            pass = pass && fcalc_test::partials_match_fd(spec, a0, 2, 100, rng);
            pass = pass && fcalc_test::partials_match_fd(spec, a1, 2, 100, rng);
            pass = pass && fcalc_test::partials_match_fd(spec, a01, 2, 100, rng);
            cases += 4;
        }
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "%d cases x 100 random points, relative 1e-6", cases);
    record("derivative expansion", pass, buf);
}

// 7. embedding audits: bounded ratio tables, stable under trial doubling
void criterion_embeddings() {
    rng_t rng = make_rng(107);
    bool pass = true;
    double worst_drift = 0.0;
    struct Cfg {
        Symbol sym;
        double s;
        int n;
        int N;
    };
    const Cfg cfgs[] = {
        {laplace_symbol(), 2.0, 1, 64},
        {fractional_symbol(0.5, 1.0), 9.0, 1, 64},
        {laplace_symbol(), 4.0, 2, 16},
    };
    for (const auto& c : cfgs) {
        const Grid g = fcalc_test::grid_for_order(c.sym, c.s, c.n, c.N, 1e4);
        const Calculus calc(c.sym, c.s, g);
        const double r = 1.5; // > n/p for p = 2, n <= 2
        const EmbeddingAudit audit = embedding_audit(calc, 2.0, r, 1.0, 200, rng);
        for (const auto& row : audit.rows) {
            if (!(std::isfinite(row.max_ratio) && row.max_ratio > 0.0 && row.drift < 0.10))
                pass = false;
            worst_drift = std::max(worst_drift, row.drift);
        }
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "12 ratio tables bounded, worst doubling drift %.3f (< 0.10)",
                  worst_drift);
    record("embedding audits", pass, buf);
}

// 8. contraction regime at delta = 0.1
void criterion_contraction() {
    const Grid g = make_grid(1, 64, 4.0);
    Problem prob(Calculus(laplace_symbol(), 2.0, g), 2.0);
    prob.V = [](const std::array<double, 3>& x, double y) {
        return std::exp(-x[0] * x[0]) * std::cos(y);
    };
    prob.dV_dy = [](const std::array<double, 3>& x, double y) {
        return -std::exp(-x[0] * x[0]) * std::sin(y);
    };
    prob.delta = 0.1;
    prob.lipschitz_h = gaussian_field(g, 1.0, 0.5);
    prob.h_growth = Field(g);
    prob.g_growth = Field(g);

    const SolveResult r = solve_contraction(prob);
    const double bound =
        prob.delta * r.constants.at("C_emb") * r.constants.at("h_inf") + 1e-6;
    bool pass = r.converged && r.certified && r.iterations <= 60 &&
                r.constants.at("contraction_rate") <= bound;

    rng_t rng = make_rng(108);
    SolverOptions opts;
    opts.initial = random_band_limited(g, rng);
    const SolveResult r2 = solve_contraction(prob, opts);
    const double gap = max_abs_diff(r.u, r2.u);
    pass = pass && r2.converged && gap < 1e-8;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%d iters (<= 60), rate %.4f <= %.4f, two-start gap %.2e (< 1e-8)",
                  r.iterations, r.constants.at("contraction_rate"), bound, gap);
    record("contraction solver", pass, buf);
}

// 9. radial solver on the cubic preset, constants file audited end to end
void criterion_radial_solver() {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path dir = fs::temp_directory_path() / "fcalc_acceptance" / "radial";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const RunConfig cfg = RunConfig::parse_string(
        "[grid]\nn = 1\nN = 256\nL = 12.0\n"
        "[symbol]\nkind = fractional\ngamma = 0.5\nm = 1\ns = 9\n"
        "[equation]\npreset = allen-cahn\np = 2\nkappa = 1\nrho_amplitude = 0.08\nrho_width = 2\n"
        "[solver]\ntrials = 150\n");
    CliOptions opts;
    opts.out_dir = dir.string();
    opts.seed = 4242;
    const int code = cmd_solve(cfg, opts);

    const auto kv = parse_key_value_file((dir / "constants.txt").string());
    const double eps = std::stod(kv.at("eps"));
    const double rho_eps = std::stod(kv.at("rho_eps"));
    const double n_emb = std::stod(kv.at("N_emb"));
    const double C = std::stod(kv.at("growth_C"));
    const double p = std::stod(kv.at("p"));
    const double alpha = std::stod(kv.at("alpha"));
    const double res = std::stod(kv.at("residual"));
    const double defect = std::stod(kv.at("radial_defect"));
    const double ball = std::stod(kv.at("ball_norm"));
    const double h_norm_p = std::stod(kv.at("h_lp_norm"));

    // exact recomputation of the admissible-forcing radius
    const double D = std::pow(2.0, p) * std::pow(C, p) * n_emb;
    const double rho_recomputed = eps / D - std::pow(eps, alpha);
    const double recomp_err = std::fabs(rho_recomputed - rho_eps);

    const double dt = seconds_since(t0);
    const bool pass = code == exit_ok && res < 1e-8 && defect < 1e-10 &&
                      ball <= eps * (1.0 + 1e-12) && h_norm_p < rho_eps &&
                      recomp_err <= 1e-15 && dt < 60.0;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "exit %d, residual %.2e (< 1e-8), defect %.1e (< 1e-10), ball %.3f <= eps %.3f, "
                  "rho_eps recomputation |err| %.1e, %.1f s (< 60 s)",
                  code, res, defect, ball, eps, recomp_err, dt);
    record("radial solver", pass, buf);
}

// 10. ellipticity-only theory: Benjamin-Ono and Peierls-Nabarro
void criterion_l2_theory() {
    const Grid g = make_grid(1, 128, 10.0);
    const Problem bo = preset_benjamin_ono(g, 0.3);
    const SolveResult rb = solve_radial(bo);
    const bool bo_ok = rb.converged && rb.constants.at("residual") < 1e-8 && max_abs(rb.u) == 0.0;

    const Field d = radial_bump(g, 2e-4, 2.0);
    const Problem pn = preset_peierls_nabarro(g, 0.5, 1.0, d);
    SolverOptions opts;
    opts.initial = radial_bump(g, 0.05, 3.0);
    const SolveResult rp = solve_radial(pn, opts);
    const bool pn_ok = rp.converged && rp.constants.at("residual") < 1e-8 && rp.iterations >= 2;

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "BO: residual %.1e, zero forcing returns u = 0 exactly; PN: residual %.1e in %d iters",
                  rb.constants.at("residual"), rp.constants.at("residual"), rp.iterations);
    record("ellipticity-only theory", bo_ok && pn_ok, buf);
}

// 11. radial forcing yields radial linear solutions
void criterion_radial_linear() {
    rng_t rng = make_rng(111);
    double worst = 0.0;
    int done = 0;
    while (done < 20) {
        const int N = done % 2 == 0 ? 64 : 128;
        const double L = done % 3 == 0 ? 6.0 : 10.0;
        const Grid g = make_grid(1, N, L);
        const Symbol sym = done % 2 == 0 ? laplace_symbol() : fractional_symbol(0.5, 1.0);
        const Calculus calc(sym, sym.beta == 2.0 ? 2.0 : 9.0, g);
        const Field gf = random_radial_field(g, rng);
        if (max_abs(gf) == 0.0) continue;
        const SolveResult r = solve_linear(calc, gf, 2.0);
        worst = std::max(worst, radial_defect(r.u) / (1.0 + max_abs(r.u)));
        ++done;
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "20 random radial inputs, max defect %.2e (< 1e-10)", worst);
    record("radial linear solves", worst < 1e-10, buf);
}

// 12. byte-identical outputs for identical config and seed
void criterion_determinism() {
    const fs::path base = fs::temp_directory_path() / "fcalc_acceptance" / "determinism";
    fs::remove_all(base);
    const RunConfig cfg = RunConfig::parse_string(
        "[grid]\nn = 1\nN = 128\nL = 12.0\n"
        "[symbol]\nkind = fractional\ngamma = 0.5\nm = 1\ns = 9\n"
        "[equation]\npreset = allen-cahn\nrho_amplitude = 1e-3\nrho_width = 2\n"
        "[solver]\ntrials = 120\n");
    CliOptions a, b;
    a.out_dir = (base / "a").string();
    b.out_dir = (base / "b").string();
    a.seed = b.seed = 20240809;
    const int ca = cmd_solve(cfg, a);
    const int cb = cmd_solve(cfg, b);
    bool pass = ca == cb;
    for (const char* name : {"solution.csv", "history.csv", "constants.txt"})
        pass = pass && slurp(fs::path(a.out_dir) / name) == slurp(fs::path(b.out_dir) / name);
    record("determinism", pass, "solution.csv, history.csv, constants.txt byte-identical");
}

} // namespace

int main() {
    criterion_norm_identity();
    criterion_inverse_pair();
    criterion_kernel_closed_form();
    criterion_two_route();
    criterion_mikhlin();
    criterion_partials();
    criterion_embeddings();
    criterion_contraction();
    criterion_radial_solver();
    criterion_l2_theory();
    criterion_radial_linear();
    criterion_determinism();

    int failed = 0;
    for (const auto& c : results)
        if (!c.pass) ++failed;
    std::printf("%zu/%zu acceptance criteria passed\n", results.size() - failed, results.size());
    return failed == 0 ? 0 : 1;
}
