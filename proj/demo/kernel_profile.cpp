// Prints the convolution kernel of T_s for the classical Bessel case
// next to its closed form (e^{-|x|}/2) on a few sample points.

#include <cstdio>

#include "fcalc/fcalc.hpp"

int main() {
    using namespace fcalc;
    const Grid g = make_grid(1, 512, 20.0);
    const Calculus calc(laplace_symbol(), 2.0, g);
    const Field K = kernel_K(calc);

    std::printf("%8s  %14s  %14s  %10s\n", "x", "kernel", "e^{-|x|}/2", "error");
    for (double x : {0.0, 0.5, 1.0, 2.0, 3.0, 5.0}) {
        const std::size_t idx = g.node_index_of({x, 0.0, 0.0});
        const double xs = g.node(idx)[0]; // nearest grid node
        const double want = 0.5 * std::exp(-std::fabs(xs));
        std::printf("%8.3f  %14.10f  %14.10f  %10.2e\n", xs, K[idx], want, std::fabs(K[idx] - want));
    }
    std::printf("\nL2 norm of the kernel: %.12f\n", lp_norm(K, 2.0));
    return 0;
}
