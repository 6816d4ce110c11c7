#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fcalc/grid.hpp"
#include "fcalc/random.hpp"

using namespace fcalc;

namespace {
constexpr double kPi = std::numbers::pi;

double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}
} // namespace

TEST_CASE("make_grid fixes nodes and the frequency lattice") {
    const Grid g = make_grid(1, 8, kPi);
    REQUIRE(g.size() == 8);
    REQUIRE(g.spacing() == Catch::Approx(kPi / 4.0));
    for (int j = 0; j < 8; ++j)
        REQUIRE(g.node_coord(j) == Catch::Approx(-kPi + j * kPi / 4.0));
    // frequency indices run over [-N/2, N/2): {0,1,2,3,-4,-3,-2,-1} in storage order
    std::vector<int> ks;
    for (int j = 0; j < 8; ++j) ks.push_back(g.freq_index(j));
    REQUIRE(ks == std::vector<int>{0, 1, 2, 3, -4, -3, -2, -1});
    REQUIRE(g.freq_coord(1) == Catch::Approx(1.0)); // pi/L = 1 here

    const Grid g2 = make_grid(2, 4, 1.0);
    REQUIRE(g2.size() == 16);
    REQUIRE(g2.freq_step() == Catch::Approx(kPi));
    std::vector<double> fr;
    for (int j = 0; j < 4; ++j) fr.push_back(g2.freq_coord(j));
    REQUIRE(fr == std::vector<double>{0.0, kPi, -2.0 * kPi, -kPi});
}

TEST_CASE("make_grid rejects invalid parameters") {
    REQUIRE_THROWS_AS(make_grid(1, 7, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(make_grid(1, 2, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(make_grid(1, 8, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(make_grid(1, 8, -2.0), std::invalid_argument);
    REQUIRE_THROWS_AS(make_grid(4, 8, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(make_grid(0, 8, 1.0), std::invalid_argument);
}

TEST_CASE("constant fields transform to the zero mode only") {
    const Grid g = make_grid(1, 16, kPi);
    Field f(g, 1.0);
    const SpectralField F = forward_transform(f);
    for (std::size_t i = 0; i < F.coeffs.size(); ++i) {
        if (g.freq_index(static_cast<int>(i)) == 0)
            REQUIRE(F.coeffs[i].real() == Catch::Approx(2.0 * kPi)); // integral of 1 over the box
        else
            REQUIRE(std::abs(F.coeffs[i]) < 1e-12);
    }
}

TEST_CASE("a lattice cosine occupies exactly two modes") {
    const Grid g = make_grid(1, 32, kPi);
    const double xi1 = g.freq_coord(3);
    Field f(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::cos(xi1 * g.node(i)[0]);
    const SpectralField F = forward_transform(f);
    int nonzero = 0;
    for (std::size_t i = 0; i < F.coeffs.size(); ++i) {
        if (std::abs(F.coeffs[i]) > 1e-10) {
            ++nonzero;
            REQUIRE(std::fabs(std::fabs(g.freq_coord(static_cast<int>(i))) - xi1) < 1e-12);
        }
    }
    REQUIRE(nonzero == 2);
}

TEST_CASE("transform round-trip and Parseval across the grid matrix") {
    rng_t rng = make_rng(42);
    for (int n : {1, 2}) {
        for (int N : {8, 16, 32, 64}) {
            const Grid g = make_grid(n, N, 2.5);
            Field f(g);
            std::normal_distribution<double> normal;
            for (auto& v : f.values) v = normal(rng);

            const SpectralField F = forward_transform(f);
            const Field back = inverse_transform(F);
            REQUIRE(max_abs_diff(back, f) < 1e-12 * max_abs(f));

            // Parseval with the fixed convention: ||f||_2^2 = (2pi)^-n sum |F|^2 (pi/L)^n
            const double lhs = std::pow(lp_norm(f, 2.0), 2);
            double rhs = 0.0;
            for (const auto& c : F.coeffs) rhs += std::norm(c);
            rhs *= std::pow(g.freq_step() / (2.0 * kPi), n);
            REQUIRE(rel_err(rhs, lhs) < 1e-10);

            // Hermitian symmetry of real-field transforms
            for (std::size_t i = 0; i < F.coeffs.size(); ++i) {
                auto ix = g.unflatten(i);
                std::array<int, 3> jx{0, 0, 0};
                bool nyquist = false;
                for (int d = 0; d < n; ++d) {
                    if (ix[d] == N / 2) nyquist = true;
                    jx[d] = ix[d] == 0 ? 0 : N - ix[d];
                }
                if (nyquist) continue;
                const cplx a = F.coeffs[i];
                const cplx b = std::conj(F.coeffs[g.flatten(jx)]);
                REQUIRE(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
            }
        }
    }
}

TEST_CASE("even non-power-of-two sizes transform through the direct path") {
    rng_t rng = make_rng(99);
    const Grid g = make_grid(1, 12, 2.0);
    Field f(g);
    std::normal_distribution<double> normal;
    for (auto& v : f.values) v = normal(rng);
    const SpectralField F = forward_transform(f);
    REQUIRE(max_abs_diff(inverse_transform(F), f) < 1e-12 * max_abs(f));
    double rhs = 0.0;
    for (const auto& c : F.coeffs) rhs += std::norm(c);
    rhs *= g.freq_step() / (2.0 * kPi);
    REQUIRE(rel_err(rhs, std::pow(lp_norm(f, 2.0), 2)) < 1e-10);
}

TEST_CASE("lp_norm quadrature values") {
    const Grid g = make_grid(1, 16, kPi);
    Field one(g, 1.0);
    REQUIRE(lp_norm(one, 2.0) == Catch::Approx(std::sqrt(2.0 * kPi)).epsilon(1e-12));
    Field zero(g);
    for (double p : {1.5, 2.0, 3.0}) REQUIRE(lp_norm(zero, p) == 0.0);
    REQUIRE(lp_norm(zero, std::numeric_limits<double>::infinity()) == 0.0);

    // Gaussian L^2 norm against the closed-form integral
    const Grid gg = make_grid(1, 256, 10.0);
    Field gauss(gg);
    for (std::size_t i = 0; i < gauss.size(); ++i) {
        const double x = gg.node(i)[0];
        gauss[i] = std::exp(-x * x / 2.0);
    }
    REQUIRE(std::fabs(lp_norm(gauss, 2.0) - std::pow(kPi, 0.25)) < 1e-8);
}

TEST_CASE("lp_norm rejects p <= 1") {
    const Grid g = make_grid(1, 8, 1.0);
    Field f(g, 1.0);
    REQUIRE_THROWS_AS(lp_norm(f, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(lp_norm(f, 0.5), std::invalid_argument);
    REQUIRE_THROWS_AS(lp_norm(f, -2.0), std::invalid_argument);
}

TEST_CASE("lp_norm properties: homogeneity, triangle, domination") {
    rng_t rng = make_rng(7);
    const Grid g = make_grid(2, 16, 3.0);
    std::normal_distribution<double> normal;
    for (double p : {1.5, 2.0, 3.0, std::numeric_limits<double>::infinity()}) {
        for (int rep = 0; rep < 10; ++rep) {
            Field f(g), h(g);
            for (std::size_t i = 0; i < f.size(); ++i) {
                f[i] = normal(rng);
                h[i] = normal(rng);
            }
            const double lam = -2.7;
            REQUIRE(rel_err(lp_norm(lam * f, p), std::fabs(lam) * lp_norm(f, p)) < 1e-12);
            REQUIRE(lp_norm(f + h, p) <= lp_norm(f, p) + lp_norm(h, p) + 1e-12);
            // |f| <= |g| nodewise implies norm domination
            Field dom(g);
            for (std::size_t i = 0; i < f.size(); ++i)
                dom[i] = f[i] * (1.0 + std::fabs(h[i]));
            REQUIRE(lp_norm(f, p) <= lp_norm(dom, p) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("radial projection in 1d: exactness, odd kill, linearity") {
    const Grid g = make_grid(1, 64, 6.0);
    Field radial(g), odd(g), mix(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.node(i)[0];
        radial[i] = std::exp(-x * x);
        odd[i] = x * std::exp(-x * x);
        mix[i] = radial[i] + odd[i];
    }
    REQUIRE(max_abs_diff(radial_project(radial), radial) < 1e-12);
    REQUIRE(max_abs(radial_project(odd)) < 1e-12);

    // f(x) = x averages to zero on every paired bin; the boundary node -L
    // has no +L partner on [-L, L) and keeps its own value (singleton bin)
    Field xf(g);
    for (std::size_t i = 0; i < g.size(); ++i) xf[i] = g.node(i)[0];
    const Field pxf = radial_project(xf);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (std::fabs(g.node(i)[0]) < g.half_width - 0.5 * g.spacing())
            REQUIRE(std::fabs(pxf[i]) < 1e-12);

    // binned averaging is linear, so the odd part drops out of the mix
    REQUIRE(max_abs_diff(radial_project(mix), radial_project(radial)) < 1e-12);
}

TEST_CASE("radial projection: idempotence, contraction, symmetry invariance") {
    rng_t rng = make_rng(11);
    for (int n : {1, 2}) {
        const Grid g = make_grid(n, 16, 2.0);
        const Field f = random_band_limited(g, rng);
        const Field pf = radial_project(f);
        REQUIRE(max_abs_diff(radial_project(pf), pf) == 0.0); // idempotent, exact
        REQUIRE(lp_norm(pf, 2.0) <= lp_norm(f, 2.0) * (1.0 + 1e-14));

        // output is invariant under sign flips and axis permutations
        for (std::size_t i = 0; i < g.size(); ++i) {
            const auto ix = g.unflatten(i);
            std::array<int, 3> fx{0, 0, 0};
            for (int d = 0; d < n; ++d) fx[d] = ix[d] == 0 ? 0 : g.npts - ix[d];
            REQUIRE(pf[g.flatten(fx)] == Catch::Approx(pf[i]).margin(1e-14));
            if (n == 2) {
                const std::array<int, 3> sx{ix[1], ix[0], 0};
                REQUIRE(pf[g.flatten(sx)] == Catch::Approx(pf[i]).margin(1e-14));
            }
        }
    }
}

TEST_CASE("field csv round-trips bit-exactly") {
    rng_t rng = make_rng(3);
    const Grid g = make_grid(2, 8, 1.5);
    const Field f = random_band_limited(g, rng);
    std::stringstream ss;
    write_field_csv(f, ss);
    const Field back = read_field_csv(ss);
    REQUIRE(back.grid == f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) REQUIRE(back[i] == f[i]);
}

TEST_CASE("inverse transform rejects mismatched coefficient arrays") {
    SpectralField F(make_grid(1, 8, 1.0));
    F.grid = make_grid(1, 16, 1.0); // coefficient array no longer matches
    REQUIRE_THROWS_AS(inverse_transform(F), std::invalid_argument);
}

TEST_CASE("field csv rejects malformed input") {
    std::stringstream empty;
    REQUIRE_THROWS(read_field_csv(empty));
    std::stringstream bad("# n=1 N=8 L=1\n0,0\n"); // too few rows
    REQUIRE_THROWS(read_field_csv(bad));
}
