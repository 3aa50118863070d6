#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "freqlab/resonance.hpp"
#include "freqlab/rng.hpp"

using namespace freqlab;

namespace {

Vec rand_vec(Rng& r, int d, double lo = -1.5, double hi = 1.5) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = r.uniform(lo, hi);
    return v;
}

} // namespace

TEST_SUITE("resonance") {

TEST_CASE("cubic chart atlas contains the hyperbolic corner point") {
    Equation mkdv = make_equation("mkdv", 1);
    PhaseChart chart = make_chart(mkdv, {1, 2}, 3, {{0, Vec::of(1.0)}});
    AtlasResult atlas = find_critical_points(chart);
    REQUIRE(!atlas.points.empty());

    const CriticalPoint* corner = nullptr;
    for (const auto& p : atlas.points) {
        CHECK(p.grad_norm <= 1e-8);
        // independent finite-difference re-verification of stationarity
        double g[2];
        chart.gradient_fd(p.location.data(), g);
        CHECK(std::sqrt(g[0] * g[0] + g[1] * g[1]) <= 1e-4);
        if (std::fabs(p.location[0] - 1.0) < 1e-6 && std::fabs(p.location[1] - 1.0) < 1e-6)
            corner = &p;
    }
    REQUIRE(corner != nullptr);
    CHECK(classify(*corner) == MorseClass::nondegenerate);
    CHECK(corner->n_pos == 1);
    CHECK(corner->n_neg == 1);
    CHECK(corner->n_zero == 0);
    CHECK(std::fabs(corner->value) <= 1e-10);
}

TEST_CASE("newton converges in a few steps when seeded at a root") {
    Equation mkdv = make_equation("mkdv", 1);
    PhaseChart chart = make_chart(mkdv, {1, 2}, 3, {{0, Vec::of(1.0)}});
    CriticalPointSearch opts;
    opts.seeds_per_axis = 1;
    opts.seed_lo = 1.0;
    opts.seed_hi = 1.0;
    AtlasResult atlas = find_critical_points(chart, opts);
    REQUIRE(atlas.points.size() == 1);
    CHECK(atlas.points[0].newton_iters <= 5);
}

TEST_CASE("quartic chart with the smallest frequency pinned has the +-1 atlas") {
    Equation kdv4 = make_equation("kdv4", 1);
    PhaseChart chart = make_chart(kdv4, {1, 2}, 3, {{0, Vec::of(1.0)}, {4, Vec::of(0.0)}});
    AtlasResult atlas = find_critical_points(chart);
    int pm_one = 0;
    bool saw_hyperbolic_ones = false;
    for (const auto& p : atlas.points) {
        bool all_pm = true;
        for (double v : p.location)
            if (std::fabs(std::fabs(v) - 1.0) > 1e-7) all_pm = false;
        if (all_pm) {
            ++pm_one;
            if (std::fabs(p.location[0] - 1.0) < 1e-7 && std::fabs(p.location[1] - 1.0) < 1e-7) {
                // at (1,1) the dependent slot sits at -1 and the point is hyperbolic
                saw_hyperbolic_ones = true;
                CHECK(p.eigenvalues.front() < 0.0);
                CHECK(p.eigenvalues.back() > 0.0);
            }
        }
    }
    CHECK(pm_one >= 3);
    CHECK(saw_hyperbolic_ones);
}

TEST_CASE("3D rank dichotomy across the pairing variety") {
    Equation mzk = make_equation("mzk", 3);
    Rng r = make_stream(41, 1);
    for (int t = 0; t < 200; ++t) {
        Vec p = rand_vec(r, 3), q = rand_vec(r, 3);
        PhaseChart on = make_chart(mzk, {1}, 3, {{0, p}, {2, p}});
        CriticalPoint con = hessian_report(on, {q[0], q[1], q[2]});
        CHECK(con.numerical_rank <= 1);
        CHECK(classify(con) == MorseClass::degenerate);

        Vec p2 = rand_vec(r, 3);
        if ((p2 - p).norm() < 0.05) continue;
        PhaseChart off = make_chart(mzk, {1}, 3, {{0, p}, {2, p2}});
        CriticalPoint coff = hessian_report(off, {q[0], q[1], q[2]});
        CHECK(coff.numerical_rank >= 2);
    }
}

TEST_CASE("rearranging inputs restores rank two in both rescaling charts") {
    Equation mzk = make_equation("mzk", 3);
    Rng r = make_stream(42, 1);
    auto p_rank = [&](const Vec& out, const Vec& p1, const Vec& p2) {
        PhaseChart c = make_chart(mzk, {1}, 3, {{0, out}, {2, p2}});
        return hessian_report(c, {p1[0], p1[1], p1[2]}).numerical_rank;
    };
    auto q_rank = [&](const Vec& out, const Vec& q1, const Vec& q3) {
        PhaseChart c = make_chart(mzk, {0}, 2, {{1, q1}, {3, q3}});
        return hessian_report(c, {out[0], out[1], out[2]}).numerical_rank;
    };
    for (int t = 0; t < 100; ++t) {
        // build a configuration on the pairing variety: p1 = -p3, p2 = p0
        Vec p1 = rand_vec(r, 3);
        Vec p0 = rand_vec(r, 3);
        Vec p2 = p0;
        Vec p3 = -1.0 * p1;
        if ((p0 - p1).norm() < 0.1) continue;
        CHECK(p_rank(p0, p1, p2) <= 1);
        // the proof's selection: exchange the first two inputs
        std::swap(p1, p2);
        CHECK(p_rank(p0, p1, p2) >= 2);
        CHECK(q_rank(p0, p1, p3) >= 2);
    }
}

TEST_CASE("hessian eigenvalues vary continuously along fixed-block paths") {
    Equation mzk = make_equation("mzk", 3);
    Rng r = make_stream(43, 1);
    const Vec p0 = rand_vec(r, 3);
    const Vec q = rand_vec(r, 3);
    Vec a = rand_vec(r, 3), dir = rand_vec(r, 3, -0.5, 0.5);
    std::vector<double> prev;
    const int steps = 100;
    for (int i = 0; i <= steps; ++i) {
        Vec p2 = a;
        p2 += (static_cast<double>(i) / steps) * dir;
        if ((p2 - p0).norm() < 0.1) continue; // stay off the rank-drop variety
        PhaseChart c = make_chart(mzk, {1}, 3, {{0, p0}, {2, p2}});
        CriticalPoint cp = hessian_report(c, {q[0], q[1], q[2]});
        if (!prev.empty()) {
            for (size_t j = 0; j < prev.size(); ++j)
                CHECK(std::fabs(cp.eigenvalues[j] - prev[j]) <= 0.5);
        }
        prev = cp.eigenvalues;
    }
}

TEST_CASE("local sublevel exponent: one-dimensional quadratic chart") {
    // fixing the outer slots of the conjugated cubic makes P a nondegenerate
    // 1D quadratic around p1 = (p0 + p2) / 2
    Equation nls = make_equation("nls-cubic", 1);
    PhaseChart chart = make_chart(nls, {1}, 3, {{0, Vec::of(1.0)}, {2, Vec::of(0.3)}});
    MorseWindowOptions opts;
    opts.samples = 2000000;
    MorseWindow w = morse_window_check(chart, {0.65}, 0.1, opts);
    CHECK(w.model_exponent == doctest::Approx(0.5));
    CHECK(std::fabs(w.exponent - 0.5) <= 0.1);
    CHECK(w.r2 >= 0.9);
}

TEST_CASE("local sublevel exponent: hyperbolic corner of the cubic chart") {
    Equation mkdv = make_equation("mkdv", 1);
    PhaseChart chart = make_chart(mkdv, {1, 2}, 3, {{0, Vec::of(1.0)}});
    MorseWindowOptions opts;
    opts.samples = 20000000;
    MorseWindow w = morse_window_check(chart, {1.0, 1.0}, 0.05, opts);
    CHECK(w.model_exponent == doctest::Approx(1.0));
    CHECK(std::fabs(w.exponent - 1.0) <= 0.1);
}

TEST_CASE("local sublevel exponent: elliptic pairing point of the 2D conjugated cubic") {
    Equation nls = make_equation("nls-cubic", 2);
    PhaseChart chart =
        make_chart(nls, {1}, 3, {{0, Vec::of(1.0, 0.2)}, {2, Vec::of(-0.4, 0.5)}});
    // critical where p1 = p3 = (p0 + p2) / 2
    const std::vector<double> z{0.3, 0.35};
    double g[2];
    chart.gradient(z.data(), g);
    REQUIRE(std::sqrt(g[0] * g[0] + g[1] * g[1]) <= 1e-12);
    MorseWindowOptions opts;
    opts.samples = 4000000;
    MorseWindow w = morse_window_check(chart, z, 0.1, opts);
    CHECK(w.model_exponent == doctest::Approx(1.0));
    CHECK(std::fabs(w.exponent - 1.0) <= 0.1);
}

} // TEST_SUITE
