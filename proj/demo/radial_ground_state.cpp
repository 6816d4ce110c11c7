// Solves the perturbed cubic equation on the massive fractional symbol
// with the radial fixed-point scheme and prints the certificate data.

#include <cstdio>

#include "fcalc/fcalc.hpp"

int main() {
    using namespace fcalc;
    const Grid g = make_grid(1, 256, 12.0);
    const Field rho = radial_bump(g, 0.08, 2.0);
    const Problem prob = preset_allen_cahn(g, /*m=*/1.0, /*gamma=*/0.5, /*s=*/9.0, /*kappa=*/1.0, rho);

    SolverOptions opts;
    opts.trials = 150;
    const SolveResult r = solve_radial(prob, opts);

    std::printf("converged: %s (certified: %s) in %d iterations\n", r.converged ? "yes" : "no",
                r.certified ? "yes" : "no", r.iterations);
    for (const char* key : {"eps", "eps_max", "rho_eps", "N_emb", "growth_C", "residual"})
        std::printf("  %-10s = %.6e\n", key, r.constants.at(key));

    std::printf("\ncenter profile u(x):\n");
    for (double x : {0.0, 0.5, 1.0, 1.5, 2.0, 3.0})
        std::printf("  u(%4.1f) = %+.6e\n", x, r.u[g.node_index_of({x, 0.0, 0.0})]);
    return 0;
}
