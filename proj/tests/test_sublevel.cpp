#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "freqlab/rng.hpp"
#include "freqlab/sublevel.hpp"

using namespace freqlab;

TEST_SUITE("sublevel") {

TEST_CASE("1D quadratic oracle: endpoint formulas") {
    CHECK(quadratic_sublevel_1d(0.0, 1.0) == doctest::Approx(2.0));
    CHECK(quadratic_sublevel_1d(5.0, 1.0) ==
          doctest::Approx(2.0 * (std::sqrt(6.0) - 2.0)).epsilon(1e-12));
    CHECK(quadratic_sublevel_1d(-3.0, 1.0) == doctest::Approx(0.0));
    // box clipping
    CHECK(quadratic_sublevel_1d(0.0, 100.0, 2.0) == doctest::Approx(4.0));

    // brute-force Riemann cross-check
    Rng r = make_stream(21, 1);
    for (int t = 0; t < 60; ++t) {
        const double alpha = r.uniform(-10.0, 40.0);
        const double M = r.uniform(0.2, 10.0);
        const int n = 2000000;
        const double N = 10.0;
        long hits = 0;
        for (int i = 0; i < n; ++i) {
            const double p = -N + 2.0 * N * (i + 0.5) / n;
            if (std::fabs(p * p - alpha) < M) ++hits;
        }
        const double riemann = 2.0 * N * static_cast<double>(hits) / n;
        CHECK(std::fabs(quadratic_sublevel_1d(alpha, M, N) - riemann) <= 1e-4 * (riemann + 1.0));
    }
}

TEST_CASE("2D quadratic oracle matches dense-grid quadrature") {
    Rng r = make_stream(22, 1);
    for (int sign : {+1, -1}) {
        for (int t = 0; t < 12; ++t) {
            const double alpha = r.uniform(-20.0, 40.0);
            const double M = r.uniform(0.5, 8.0);
            const double N = 8.0;
            const int n = 3000;
            long hits = 0;
            for (int i = 0; i < n; ++i) {
                const double p = -N + 2.0 * N * (i + 0.5) / n;
                for (int j = 0; j < n; ++j) {
                    const double q = -N + 2.0 * N * (j + 0.5) / n;
                    if (std::fabs(p * p + sign * q * q - alpha) < M) ++hits;
                }
            }
            const double grid = (2.0 * N) * (2.0 * N) * static_cast<double>(hits) / n / n;
            const double oracle = quadratic_sublevel_2d(sign, alpha, M, N);
            CHECK(std::fabs(oracle - grid) <= 0.01 * (grid + 0.5));
        }
    }
}

TEST_CASE("engine reproduces the 1D toy values") {
    SublevelSpec sp = spec_quad1d(10.0);
    IntegralResult a = sublevel_integral(sp, 0.0, {}, 1.0, 7);
    CHECK(std::fabs(a.value - 2.0) <= 3.0 * a.stderr_est + 1e-3);
    IntegralResult b = sublevel_integral(sp, 5.0, {}, 1.0, 7);
    CHECK(std::fabs(b.value - 0.898979485566356) <= 3.0 * b.stderr_est + 1e-3);
    // empty sublevel set is a zero, not an error
    IntegralResult c = sublevel_integral(sp, -10.0 * 100.0, {}, 50.0, 7);
    CHECK(c.value == 0.0);
}

TEST_CASE("engine agrees with the quadratic oracles across random windows") {
    Rng r = make_stream(23, 1);
    int checked = 0;
    for (int t = 0; t < 400; ++t) {
        const double N = (t % 2) ? 4.0 : 8.0;
        const double alpha = r.uniform(-N * N, 2.0 * N * N);
        const double M = r.uniform(0.5, 16.0);
        const int fam = t % 3;
        SublevelSpec sp = (fam == 0) ? spec_quad1d(N) : spec_quad2d(fam == 1 ? 1 : -1, N);
        sp.samples = 40000;
        IntegralResult got = sublevel_integral(sp, alpha, {}, M, 1000 + t);
        const double want = (fam == 0) ? quadratic_sublevel_1d(alpha, M, N)
                                       : quadratic_sublevel_2d(fam == 1 ? 1 : -1, alpha, M, N);
        const double vol = std::pow(2.0 * N, integration_dims(sp));
        const double slack = 4.0 * got.stderr_est + 6.0 * vol / sp.samples;
        CHECK(std::fabs(got.value - want) <= slack);
        ++checked;
    }
    CHECK(checked == 400);
}

TEST_CASE("grid estimator cross-checks the sampler") {
    SublevelSpec mc = spec_quad2d(-1, 6.0);
    SublevelSpec grid = mc;
    grid.estimator = Estimator::grid;
    grid.grid_points = 601;
    for (double alpha : {0.0, 7.5}) {
        IntegralResult a = sublevel_integral(mc, alpha, {}, 3.0, 5);
        IntegralResult b = sublevel_integral(grid, alpha, {}, 3.0, 5);
        CHECK(std::fabs(a.value - b.value) <= 3.0 * a.stderr_est + 0.05);
    }
}

TEST_CASE("sublevel value is monotone in M at a fixed witness and seed") {
    SublevelSpec sp = spec_mkdv_region(0.3, 8.0);
    sp.samples = 20000;
    const std::vector<double> fixed{5.0};
    double prev = -1.0;
    for (double M : dyadic_levels(1, 10)) {
        const double v = sublevel_integral(sp, 2.0, fixed, M, 99).value;
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("sup scan finds the quadratic window and carries witnesses") {
    SublevelSpec sp = spec_quad1d(16.0);
    sp.samples = 40000;
    sp.restarts = 12;
    ScanResult sc = sup_scan(sp, 4.0, 31);
    // the best window sits at alpha = M with measure 2*sqrt(2M)
    const double best = 2.0 * std::sqrt(8.0);
    CHECK(sc.value >= 0.9 * best);
    CHECK(sc.value <= 1.05 * best + 3.0 * sc.stderr_est);
    CHECK(sc.witness.size() == 1);
    CHECK(!sc.witness_at_edge);
}

TEST_CASE("beta fit validates its preconditions") {
    SublevelSpec sp = spec_quad1d(8.0);
    CHECK_THROWS_AS(fit_beta(sp, {2.0, 4.0, 8.0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(fit_beta(sp, {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}, 1), std::invalid_argument);
    SublevelSpec bad = sp;
    bad.family = PhaseFamily::equation;
    bad.eq = make_equation("mkdv", 1);
    bad.fixed_set = {9};
    CHECK_THROWS_AS(validate_spec(bad), std::invalid_argument);
}

TEST_CASE("beta fit on the 1D quadratic model lands near 1/2") {
    SublevelSpec sp = spec_quad1d(16.0);
    sp.samples = 30000;
    sp.restarts = 8;
    BetaFit fit = fit_beta(sp, dyadic_levels(1, 8), 17);
    CHECK(fit.beta >= 0.40);
    CHECK(fit.beta <= 0.60);
    CHECK(fit.r2 >= 0.95);
    CHECK(fit.monotone);
    for (size_t i = 1; i < fit.levels.size(); ++i)
        CHECK(fit.levels[i].value > fit.levels[i - 1].value);
}

TEST_CASE("temporal convolution bound: closed form at zero separation") {
    const double b = 0.51;
    TauBound tb = tau_convolution_bound(0.0, 0.0, b);
    const double want = std::sqrt(M_PI) * std::tgamma(2.0 * b - 0.5) / std::tgamma(2.0 * b);
    CHECK(tb.integral == doctest::Approx(want).epsilon(1e-8));
    CHECK(tb.bound_ratio == doctest::Approx(want).epsilon(1e-8));
    CHECK_THROWS_AS(tau_convolution_bound(0.0, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("temporal convolution bound is uniform over separations") {
    const double b = 0.51;
    double rmax = 0.0, rmin = 1e300;
    for (double sep : {0.0, 1.0, 10.0, 100.0, 1000.0, 10000.0}) {
        const double ratio = tau_convolution_bound(sep / 2, -sep / 2, b).bound_ratio;
        rmax = std::max(rmax, ratio);
        rmin = std::min(rmin, ratio);
    }
    CHECK(rmax / rmin < 50.0);
    // a larger temporal exponent sits below the b=0.51 envelope
    for (double sep : {0.0, 10.0, 1000.0}) {
        CHECK(tau_convolution_bound(sep / 2, -sep / 2, 0.75).bound_ratio <= rmax);
    }
}

TEST_CASE("discrete multilinear check agrees with a direct summation") {
    Equation mkdv = make_equation("mkdv", 1);
    const int G = 2;
    const uint64_t seed = 4242;
    MultilinearCheck got = discrete_multilinear_check(mkdv, 0.25, 0.3, 2 * G, 1, seed);
    const int n = 2 * G + 1;
    auto amp = [&](int j, int i) {
        Rng r = make_stream(seed, 0xd17au, 0u, static_cast<uint64_t>(j), static_cast<uint64_t>(i));
        const double re = r.normal(), im = r.normal();
        return std::sqrt(re * re + im * im);
    };
    double lhs = 0.0, rhs = 1.0;
    for (int j = 0; j <= 3; ++j) {
        double nrm = 0;
        for (int i = 0; i < n; ++i) nrm += amp(j, i) * amp(j, i);
        rhs *= std::sqrt(nrm);
    }
    for (int a = -G; a <= G; ++a)
        for (int b = -G; b <= G; ++b)
            for (int c = -G; c <= G; ++c) {
                const int out = a + b + c;
                if (std::abs(out) > G) continue;
                // generic tuples only: no zero modes, no canceling pairs
                if (a == 0 || b == 0 || c == 0) continue;
                if (a + b == 0 || a + c == 0 || b + c == 0) continue;
                const long phi_z = static_cast<long>(out) * out * out -
                                   (static_cast<long>(a) * a * a + static_cast<long>(b) * b * b +
                                    static_cast<long>(c) * c * c);
                if (phi_z == 0) continue;
                FrequencyTuple t;
                t.xi = Vec::of(static_cast<double>(out));
                t.inputs = {Vec::of(static_cast<double>(a)), Vec::of(static_cast<double>(b)),
                            Vec::of(static_cast<double>(c))};
                lhs += multilinear_weight(mkdv, 0.25, 0.3, t) * amp(0, out + G) * amp(1, a + G) *
                       amp(2, b + G) * amp(3, c + G);
            }
    REQUIRE(got.ratios.size() == 1);
    CHECK(got.ratios[0] == doctest::Approx(lhs / rhs).epsilon(1e-10));

    CHECK_THROWS_AS(discrete_multilinear_check(make_equation("nls-quintic", 2), 0.5, 0.2, 16, 1, 1),
                    std::invalid_argument);
}

TEST_CASE("discrete multilinear ratio is stable under lattice refinement") {
    // cubic 1D phase factors completely, so the lattice has no nontrivial
    // resonances and the ratio settles quickly
    Equation mkdv = make_equation("mkdv", 1);
    std::vector<double> flat;
    for (int grid : {16, 32, 64}) {
        MultilinearCheck mc = discrete_multilinear_check(mkdv, 0.5, 0.2, grid, 8, 7, 0.501);
        flat.push_back(mc.max_ratio);
        CHECK(std::isfinite(mc.max_ratio));
        CHECK(mc.max_ratio > 0.0);
    }
    CHECK(flat[2] / flat[1] <= 1.15);

    // the quartic phase sits near its critical weight at s=0, eps=0.4: the
    // growth factor per doubling must decay toward saturation
    Equation kdv4 = make_equation("kdv4", 1);
    std::vector<double> maxr;
    for (int grid : {16, 32, 64}) {
        MultilinearCheck mc = discrete_multilinear_check(kdv4, 0.0, 0.4, grid, 8, 7, 0.501);
        maxr.push_back(mc.max_ratio);
    }
    const double g1 = maxr[1] / maxr[0];
    const double g2 = maxr[2] / maxr[1];
    CHECK(g2 < g1);
    CHECK(g2 <= 1.5);
}

TEST_CASE("identical seeds reproduce identical values bit for bit") {
    SublevelSpec sp = spec_mkdv_region(0.3, 8.0);
    sp.samples = 20000;
    sp.restarts = 6;
    ScanResult a = sup_scan(sp, 16.0, 1234);
    ScanResult b = sup_scan(sp, 16.0, 1234);
    CHECK(a.value == b.value);
    CHECK(a.witness == b.witness);
}

} // TEST_SUITE
