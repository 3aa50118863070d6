#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "freqlab/phase.hpp"
#include "freqlab/rng.hpp"

using namespace freqlab;

namespace {

Vec random_vec(Rng& r, int d, double lo = -3.0, double hi = 3.0) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = r.uniform(lo, hi);
    return v;
}

FrequencyTuple random_tuple(Rng& r, const Equation& eq) {
    std::vector<Vec> free_inputs;
    for (int j = 0; j < eq.nonlin.k - 1; ++j) free_inputs.push_back(random_vec(r, eq.dim));
    return resolve_dependent(eq.nonlin, random_vec(r, eq.dim), free_inputs, eq.nonlin.k);
}

const std::vector<std::pair<std::string, int>> kAllEquations = {
    {"kdv4", 1}, {"mkdv", 1}, {"mzk", 2}, {"mzk", 3},
    {"mzk-sym2d", 2}, {"nls-cubic", 1}, {"nls-cubic", 2}, {"nls-quintic", 2}};

} // namespace

TEST_SUITE("phase") {

TEST_CASE("dispersion symbols are homogeneous of their degree") {
    Rng r = make_stream(11, 1);
    for (const auto& [id, dim] : kAllEquations) {
        Equation eq = make_equation(id, dim);
        for (int t = 0; t < 200; ++t) {
            Vec x = random_vec(r, dim);
            const double lam = r.uniform(0.1, 10.0);
            Vec xs = lam * x;
            const double lhs = eq.dispersion.symbol(xs);
            const double rhs = std::pow(lam, eq.dispersion.degree) * eq.dispersion.symbol(x);
            CHECK(std::fabs(lhs - rhs) <= 1e-8 * (std::fabs(rhs) + 1e-30));
        }
    }
}

TEST_CASE("closed-form gradients match central differences") {
    Rng r = make_stream(12, 1);
    for (const auto& [id, dim] : kAllEquations) {
        Equation eq = make_equation(id, dim);
        for (int t = 0; t < 100; ++t) {
            Vec x = random_vec(r, dim);
            if (x.norm() < 0.3) continue;
            const Vec g = eq.dispersion.gradient(x);
            const Vec g_fd = eq.dispersion.gradient_fd(x);
            for (int a = 0; a < dim; ++a)
                CHECK(std::fabs(g[a] - g_fd[a]) <= 1e-6 * (std::fabs(g[a]) + 1.0));
        }
    }
}

TEST_CASE("resolve_dependent pins the stated examples") {
    // conjugate pattern +,-,+ forces xi2 = xi1 + xi3 - xi
    Equation nls = make_equation("nls-cubic", 1);
    FrequencyTuple t = resolve_dependent(nls.nonlin, Vec::of(1.0), {Vec::of(2.0), Vec::of(0.0)}, 2);
    CHECK(t.inputs[1][0] == doctest::Approx(1.0).epsilon(1e-14));

    Equation kdv4 = make_equation("kdv4", 1);
    FrequencyTuple z =
        resolve_dependent(kdv4.nonlin, Vec::of(0.0), {Vec::of(0.0), Vec::of(0.0), Vec::of(0.0)}, 4);
    CHECK(z.inputs[3][0] == doctest::Approx(0.0));

    Equation mzk = make_equation("mzk", 2);
    FrequencyTuple m =
        resolve_dependent(mzk.nonlin, Vec::of(3.0, 0.0), {Vec::of(1.0, 0.0), Vec::of(1.0, 0.0)}, 3);
    CHECK(m.inputs[2][0] == doctest::Approx(1.0));
    CHECK(m.inputs[2][1] == doctest::Approx(0.0));

    CHECK_THROWS_AS(resolve_dependent(nls.nonlin, Vec::of(1.0), {Vec::of(2.0), Vec::of(0.0)}, 5),
                    std::invalid_argument);
}

TEST_CASE("constraint residual vanishes for resolved tuples") {
    Rng r = make_stream(13, 1);
    for (const auto& [id, dim] : kAllEquations) {
        Equation eq = make_equation(id, dim);
        for (int t = 0; t < 10000 / static_cast<int>(kAllEquations.size()) + 1000; ++t) {
            FrequencyTuple tup = random_tuple(r, eq);
            CHECK(gamma_residual(eq.nonlin, tup).max_abs() <= 1e-10);
        }
    }
}

TEST_CASE("total phase evaluates the signed symbol sum") {
    Equation mkdv = make_equation("mkdv", 1);
    FrequencyTuple t;
    t.xi = Vec::of(3.0);
    t.inputs = {Vec::of(1.0), Vec::of(1.0), Vec::of(1.0)};
    CHECK(total_phase(mkdv.dispersion, mkdv.nonlin, t) == doctest::Approx(24.0));

    Equation nls = make_equation("nls-cubic", 1);
    FrequencyTuple s;
    s.xi = Vec::of(1.0);
    s.inputs = {Vec::of(2.0), Vec::of(1.0), Vec::of(0.0)};
    CHECK(total_phase(nls.dispersion, nls.nonlin, s) == doctest::Approx(-2.0));

    FrequencyTuple zero;
    zero.xi = Vec::of(0.0);
    zero.inputs = {Vec::of(0.0), Vec::of(0.0), Vec::of(0.0)};
    CHECK(total_phase(nls.dispersion, nls.nonlin, zero) == doctest::Approx(0.0));
}

TEST_CASE("total phase is homogeneous of the dispersion degree") {
    Rng r = make_stream(14, 1);
    for (const auto& [id, dim] : kAllEquations) {
        Equation eq = make_equation(id, dim);
        for (int t = 0; t < 200; ++t) {
            FrequencyTuple tup = random_tuple(r, eq);
            const double lam = r.uniform(0.1, 10.0);
            FrequencyTuple scaled = tup;
            scaled.xi *= lam;
            for (auto& in : scaled.inputs) in *= lam;
            const double lhs = total_phase(eq.dispersion, eq.nonlin, scaled);
            const double rhs =
                std::pow(lam, eq.dispersion.degree) * total_phase(eq.dispersion, eq.nonlin, tup);
            CHECK(std::fabs(lhs - rhs) <= 1e-8 * (std::fabs(rhs) + 1e-12));
        }
    }
}

TEST_CASE("cubic phase factorizations hold on the constraint set") {
    Rng r = make_stream(15, 1);
    Equation mkdv = make_equation("mkdv", 1);
    Equation nls = make_equation("nls-cubic", 1);
    for (int t = 0; t < 2000; ++t) {
        FrequencyTuple a = random_tuple(r, mkdv);
        const double phi = total_phase(mkdv.dispersion, mkdv.nonlin, a);
        const double fac = 3.0 * (a.xi[0] - a.inputs[0][0]) * (a.xi[0] - a.inputs[1][0]) *
                           (a.inputs[0][0] + a.inputs[1][0]);
        CHECK(std::fabs(phi - fac) <= 1e-9 * (std::fabs(phi) + 1.0));

        FrequencyTuple b = random_tuple(r, nls);
        const double phin = total_phase(nls.dispersion, nls.nonlin, b);
        const double facn = 2.0 * (b.xi[0] - b.inputs[0][0]) * (b.xi[0] - b.inputs[2][0]);
        CHECK(std::fabs(phin - facn) <= 1e-9 * (std::fabs(phin) + 1.0));
    }
}

TEST_CASE("rescaled phase: direct values and scale freedom") {
    Equation mkdv = make_equation("mkdv", 1);
    const double third = 1.0 / 3.0;
    CHECK(rescaled_phase(mkdv.dispersion, mkdv.nonlin,
                         {Vec::of(third), Vec::of(third), Vec::of(third)}) ==
          doctest::Approx(8.0 / 9.0));
    CHECK(rescaled_phase(mkdv.dispersion, mkdv.nonlin,
                         {Vec::of(1.0), Vec::of(1.0), Vec::of(-1.0)}) ==
          doctest::Approx(0.0).epsilon(1e-12));

    // P computed from a tuple is scale-free
    Rng r = make_stream(16, 1);
    for (const auto& [id, dim] : kAllEquations) {
        Equation eq = make_equation(id, dim);
        for (int t = 0; t < 100; ++t) {
            FrequencyTuple tup = random_tuple(r, eq);
            if (tup.xi.norm() < 0.5) continue;
            const double p1 = rescaled_phase(eq.dispersion, eq.nonlin, rescale_tuple(eq.nonlin, tup, 0));
            FrequencyTuple big = tup;
            big.xi *= 10.0;
            for (auto& in : big.inputs) in *= 10.0;
            const double p2 = rescaled_phase(eq.dispersion, eq.nonlin, rescale_tuple(eq.nonlin, big, 0));
            CHECK(std::fabs(p1 - p2) <= 1e-8 * (std::fabs(p1) + 1e-12));
        }
    }

    FrequencyTuple tiny;
    tiny.xi = Vec::of(1e-13);
    tiny.inputs = {Vec::of(1e-13), Vec::of(0.0), Vec::of(0.0)};
    CHECK_THROWS_AS(rescale_tuple(mkdv.nonlin, tiny, 0), std::domain_error);
}

TEST_CASE("chart gradient and Hessian: stationary point of the cubic chart") {
    Equation mkdv = make_equation("mkdv", 1);
    PhaseChart chart = make_chart(mkdv, {1, 2}, 3, {{0, Vec::of(1.0)}});
    const double q[2] = {1.0, 1.0};
    double g[2], H[4];
    chart.gradient(q, g);
    CHECK(std::fabs(g[0]) <= 1e-12);
    CHECK(std::fabs(g[1]) <= 1e-12);
    chart.hessian(q, H);
    const double det = H[0] * H[3] - H[1] * H[2];
    CHECK(det < 0.0); // hyperbolic point
    CHECK(chart.value(q) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("chart derivatives agree with finite differences") {
    Rng r = make_stream(17, 1);
    struct ChartCase {
        std::string id;
        int dim;
        std::vector<int> free_idx;
        int dep;
    };
    const std::vector<ChartCase> cases = {
        {"mkdv", 1, {1, 2}, 3},     {"kdv4", 1, {1, 2}, 3},      {"mzk", 3, {1}, 3},
        {"mzk", 2, {1, 2}, 3},      {"nls-cubic", 2, {1}, 3},    {"nls-quintic", 1, {1, 3}, 5},
        {"mzk", 3, {0}, 2},         {"nls-cubic", 2, {0}, 2},
    };
    for (const auto& c : cases) {
        Equation eq = make_equation(c.id, c.dim);
        std::vector<std::pair<int, Vec>> fixed;
        for (int i = 0; i <= eq.nonlin.k; ++i) {
            if (i == c.dep) continue;
            if (std::find(c.free_idx.begin(), c.free_idx.end(), i) != c.free_idx.end()) continue;
            fixed.push_back({i, random_vec(r, c.dim, -1.2, 1.2)});
        }
        PhaseChart chart = make_chart(eq, c.free_idx, c.dep, fixed);
        const int m = chart.dim();
        std::vector<double> q(m), g(m), g_fd(m), H(m * m), H_fd(m * m);
        for (int trial = 0; trial < 25; ++trial) {
            for (int i = 0; i < m; ++i) q[i] = r.uniform(-1.2, 1.2);
            chart.gradient(q.data(), g.data());
            chart.gradient_fd(q.data(), g_fd.data());
            for (int i = 0; i < m; ++i)
                CHECK(std::fabs(g[i] - g_fd[i]) <= 1e-4 * (std::fabs(g[i]) + 1.0));
            chart.hessian(q.data(), H.data());
            chart.hessian_fd(q.data(), H_fd.data());
            for (int i = 0; i < m * m; ++i)
                CHECK(std::fabs(H[i] - H_fd[i]) <= 1e-4 * (std::fabs(H[i]) + 1.0));
        }
    }
}

TEST_CASE("2D symmetrizing map: coefficients and induced phase identity") {
    Vec z = zk2d_symmetrize(Vec::of(0.0, 0.0));
    CHECK(z[0] == doctest::Approx(0.0));
    CHECK(z[1] == doctest::Approx(0.0));

    Vec e = zk2d_symmetrize(Vec::of(1.0, 0.0));
    const double mu = std::pow(4.0, -1.0 / 3.0);
    CHECK(e[0] == doctest::Approx(mu).epsilon(1e-12));
    CHECK(e[1] == doctest::Approx(mu).epsilon(1e-12));

    Equation zk = make_equation("mzk", 2);
    Equation sym = make_equation("mzk-sym2d", 2);
    Rng r = make_stream(18, 1);
    for (int t = 0; t < 500; ++t) {
        Vec xi = random_vec(r, 2, -5.0, 5.0);
        // map + inverse round trip
        Vec back = zk2d_desymmetrize(zk2d_symmetrize(xi));
        CHECK(std::fabs(back[0] - xi[0]) <= 1e-10);
        CHECK(std::fabs(back[1] - xi[1]) <= 1e-10);
        // induced frequency maps carry one symbol to the other
        CHECK(std::fabs(zk.dispersion.symbol(zk_freq_from_sym(xi)) - sym.dispersion.symbol(xi)) <=
              1e-10 * (std::fabs(sym.dispersion.symbol(xi)) + 1.0));
        CHECK(std::fabs(sym.dispersion.symbol(sym_freq_from_zk(xi)) - zk.dispersion.symbol(xi)) <=
              1e-10 * (std::fabs(zk.dispersion.symbol(xi)) + 1.0));
    }
}

TEST_CASE("total phases agree across the symmetrizing frequency map") {
    Equation zk = make_equation("mzk", 2);
    Equation sym = make_equation("mzk-sym2d", 2);
    Rng r = make_stream(19, 1);
    for (int t = 0; t < 500; ++t) {
        FrequencyTuple tup = random_tuple(r, sym);
        FrequencyTuple mapped;
        mapped.xi = zk_freq_from_sym(tup.xi);
        for (const auto& in : tup.inputs) mapped.inputs.push_back(zk_freq_from_sym(in));
        // the map is linear, so it preserves the convolution constraint
        CHECK(gamma_residual(zk.nonlin, mapped).max_abs() <= 1e-9);
        const double a = total_phase(sym.dispersion, sym.nonlin, tup);
        const double b = total_phase(zk.dispersion, zk.nonlin, mapped);
        CHECK(std::fabs(a - b) <= 1e-10 * (std::fabs(a) + 1.0));
    }
}

} // TEST_SUITE
