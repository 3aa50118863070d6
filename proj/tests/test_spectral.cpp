#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "freqlab/rng.hpp"
#include "freqlab/smoothing.hpp"
#include "freqlab/sublevel.hpp"
#include "freqlab/spectral.hpp"

using namespace freqlab;

namespace {

SpectralState single_mode(const Equation& eq, const Grid& g, const int* m, cplx amp) {
    SpectralState s = SpectralState::zero(g);
    s.coeffs[static_cast<size_t>(encode_modes(g, m))] = amp;
    if (eq.real_field) {
        int neg[3] = {0, 0, 0};
        for (int ax = 0; ax < g.dim; ++ax) neg[ax] = -m[ax];
        s.coeffs[static_cast<size_t>(encode_modes(g, neg))] = std::conj(amp);
    }
    return s;
}

double max_coeff_diff(const SpectralState& a, const SpectralState& b) {
    double worst = 0;
    for (size_t i = 0; i < a.coeffs.size(); ++i)
        worst = std::max(worst, std::abs(a.coeffs[i] - b.coeffs[i]));
    return worst;
}

} // namespace

TEST_SUITE("spectral") {

TEST_CASE("dealias band keeps degree-k products alias-free") {
    CHECK(dealias_band(16, 3) == 3);
    CHECK(dealias_band(16, 4) == 3);
    CHECK(dealias_band(16, 5) == 2);
    CHECK(dealias_band(64, 4) == 12);
    CHECK(dealias_band(256, 3) == 63); // strict: k*K must stay below n-K
    CHECK(dealias_band(1024, 4) == 204);
    for (auto [n, k] : std::vector<std::pair<int, int>>{{16, 3}, {16, 4}, {16, 5}, {64, 4},
                                                        {256, 3}, {1024, 4}}) {
        const int K = dealias_band(n, k);
        CHECK(k * K + K < n);
    }
}

TEST_CASE("linear symbols follow the textbook dispersion relations") {
    // u_t = i L(xi) u per mode; the expected L comes from the operator symbol
    const Vec xi1 = Vec::of(1.7);
    const Vec xi2 = Vec::of(0.8, -1.2);
    // third derivative: -(i xi)^3 = +i xi^3
    CHECK(make_equation("kdv4", 1).linear_symbol(xi1) ==
          doctest::Approx(xi1[0] * xi1[0] * xi1[0]));
    CHECK(make_equation("mkdv", 1).linear_symbol(xi1) ==
          doctest::Approx(xi1[0] * xi1[0] * xi1[0]));
    // -d_x Delta: -(i x1)(-|xi|^2) = +i x1 |xi|^2
    CHECK(make_equation("mzk", 2).linear_symbol(xi2) ==
          doctest::Approx(xi2[0] * xi2.norm_sq()));
    CHECK(make_equation("mzk-sym2d", 2).linear_symbol(xi2) ==
          doctest::Approx(xi2[0] * xi2[0] * xi2[0] + xi2[1] * xi2[1] * xi2[1]));
    // i u_t + Delta u = 0: u_t = i (-|xi|^2) u
    CHECK(make_equation("nls-cubic", 2).linear_symbol(xi2) == doctest::Approx(-xi2.norm_sq()));
}

TEST_CASE("exact propagator: phases, modulus, group property") {
    Equation eq = make_equation("mzk-sym2d", 2);
    Grid g{2, 32, 1.0};

    SpectralState zero = SpectralState::zero(g);
    CHECK(max_coeff_diff(linear_propagate(eq, zero, 0.3), zero) == 0.0);

    int m[2] = {3, -5};
    SpectralState s = single_mode(eq, g, m, cplx(0.4, 0.1));
    const double dt = 0.37;
    SpectralState fwd = linear_propagate(eq, s, dt);
    const double L = eq.linear_symbol(frequency_of(g, m));
    const cplx expect = cplx(0.4, 0.1) * std::polar(1.0, dt * L);
    CHECK(std::abs(fwd.coeffs[static_cast<size_t>(encode_modes(g, m))] - expect) <= 1e-14);

    // modulus preserved, round trip restores the state
    Rng r = make_stream(51, 1);
    SpectralState rnd = SpectralState::zero(g);
    for (auto& c : rnd.coeffs) c = cplx(r.normal(), r.normal());
    SpectralState step1 = linear_propagate(eq, rnd, dt);
    for (size_t i = 0; i < rnd.coeffs.size(); ++i)
        CHECK(std::fabs(std::abs(step1.coeffs[i]) - std::abs(rnd.coeffs[i])) <= 1e-14);
    SpectralState back = linear_propagate(eq, step1, -dt);
    CHECK(max_coeff_diff(back, rnd) <= 1e-13);
}

TEST_CASE("nonlinear term of a single mode matches the hand convolution") {
    Equation eq = make_equation("kdv4", 1);
    Grid g{1, 64, 1.0};
    int m[1] = {2};
    const double c = 0.5;
    SpectralState s = single_mode(eq, g, m, cplx(c, 0.0));
    SpectralState nl = nonlinear_term(eq, s);
    // u = c e^{2ix} + c e^{-2ix}: u^4 has binomial weights; d_x brings i xi
    auto at = [&](int mode) {
        int mm[1] = {mode};
        return nl.coeffs[static_cast<size_t>(encode_modes(g, mm))];
    };
    const double c4 = c * c * c * c;
    CHECK(std::abs(at(8) - cplx(0.0, 8.0) * c4) <= 1e-12);
    CHECK(std::abs(at(4) - cplx(0.0, 4.0) * (4.0 * c4)) <= 1e-12);
    CHECK(std::abs(at(0)) <= 1e-12);
    CHECK(std::abs(at(-4) - cplx(0.0, -4.0) * (4.0 * c4)) <= 1e-12);
    SpectralState zeroed = nonlinear_term(eq, SpectralState::zero(g));
    for (const auto& v : zeroed.coeffs) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("transform path equals the brute-force convolution") {
    for (auto [id, dim] : std::vector<std::pair<std::string, int>>{
             {"mkdv", 1}, {"nls-cubic", 1}, {"mzk-sym2d", 2}}) {
        Equation eq = make_equation(id, dim);
        Grid g{dim, 16, 1.0};
        Rng r = make_stream(52, static_cast<uint64_t>(dim), std::hash<std::string>{}(id));
        SpectralState s = SpectralState::zero(g);
        for (auto& c : s.coeffs) c = cplx(r.normal(), r.normal());
        SpectralState fft_n = nonlinear_term(eq, s);
        SpectralState brute = nonlinear_term_bruteforce(eq, s);
        double scale = 0;
        for (const auto& v : brute.coeffs) scale = std::max(scale, std::abs(v));
        CHECK(max_coeff_diff(fft_n, brute) <= 1e-10 * scale);
    }
}

TEST_CASE("integrating factor is exact on the linear part") {
    Equation eq = make_equation("kdv4", 1);
    Grid g{1, 128, 1.0};
    RoughDataSpec rd{0.5, 53, 0.2, DataProfile::power_law_loglog};
    SpectralState u0 = make_rough_data(rd, g, eq);
    SolveOptions so;
    so.linear_only = true;
    so.steps = 200;
    SpectralState num = solve(eq, u0, 0.4, so);
    SpectralState ref = linear_propagate(eq, u0, 0.4);
    CHECK(max_coeff_diff(num, ref) <= 1e-12);
}

TEST_CASE("mass is conserved over unit time") {
    Equation eq = make_equation("kdv4", 1);
    Grid g{1, 256, 1.0};
    RoughDataSpec rd{2.0, 54, 0.25, DataProfile::power_law_loglog};
    SpectralState u0 = make_rough_data(rd, g, eq);
    SolveOptions so;
    so.steps = 2048;
    SpectralState u = solve(eq, u0, 1.0, so);
    CHECK(std::fabs(mass(u) - mass(u0)) / mass(u0) <= 1e-8);

    Equation nls = make_equation("nls-cubic", 1);
    SpectralState v0 = make_rough_data(rd, g, nls);
    SpectralState v = solve(nls, v0, 1.0, so);
    CHECK(std::fabs(mass(v) - mass(v0)) / mass(v0) <= 1e-8);
}

TEST_CASE("energy drift shrinks at fourth order under step halving") {
    Equation eq = make_equation("mkdv", 1);
    Grid g{1, 64, 1.0};
    RoughDataSpec rd{2.0, 55, 0.5, DataProfile::power_law_loglog};
    SpectralState u0 = make_rough_data(rd, g, eq);
    const double e0 = energy(eq, u0);
    // the drift oscillates locally, so measure the decay across three octaves
    std::vector<double> drift;
    for (int steps : {64, 512}) {
        SolveOptions so;
        so.steps = steps;
        SpectralState u = solve(eq, u0, 0.5, so);
        drift.push_back(std::fabs(energy(eq, u) - e0));
    }
    CHECK(drift[0] > drift[1]);
    const double slope = std::log2(drift[0] / drift[1]) / 3.0;
    CHECK(slope >= 3.0);
    CHECK(slope <= 6.0);
}

TEST_CASE("real equations keep the physical field real") {
    Equation eq = make_equation("mzk-sym2d", 2);
    Grid g{2, 32, 1.0};
    RoughDataSpec rd{1.0, 56, 0.2, DataProfile::power_law_loglog};
    SpectralState u0 = make_rough_data(rd, g, eq);
    CHECK(hermitian_defect(u0) <= 1e-12);
    SolveOptions so;
    so.steps = 128;
    SpectralState u = solve(eq, u0, 0.5, so);
    CHECK(hermitian_defect(u) <= 1e-10);
    CHECK(max_imag_physical(u) <= 1e-10);
}

TEST_CASE("moderate-time evolution is reversible") {
    Equation eq = make_equation("kdv4", 1);
    Grid g{1, 128, 1.0};
    RoughDataSpec rd{1.5, 57, 0.2, DataProfile::power_law_loglog};
    SpectralState u0 = make_rough_data(rd, g, eq);
    SolveOptions so;
    so.steps = 512;
    SpectralState fwd = solve(eq, u0, 0.25, so);
    SpectralState back = solve(eq, fwd, -0.25, so);
    CHECK(max_coeff_diff(back, u0) <= 1e-6);
}

TEST_CASE("sobolev norm: single modes and monotonicity") {
    Equation eq = make_equation("nls-cubic", 2);
    Grid g{2, 32, 2.0};
    CHECK(sobolev_norm(SpectralState::zero(g), 1.3) == 0.0);

    int m[2] = {4, -2};
    SpectralState s = single_mode(eq, g, m, cplx(1.0, 0.0));
    const double want = std::pow(1.0 + frequency_of(g, m).norm_sq(), 0.65) * std::sqrt(g.volume());
    CHECK(sobolev_norm(s, 1.3) == doctest::Approx(want).epsilon(1e-12));
    CHECK(sobolev_norm(s, 0.0) == doctest::Approx(std::sqrt(mass(s))).epsilon(1e-12));

    Rng r = make_stream(58, 1);
    SpectralState rnd = SpectralState::zero(g);
    for (auto& c : rnd.coeffs) c = cplx(r.normal(), r.normal());
    double prev = sobolev_norm(rnd, -1.0);
    for (double sig : {-0.5, 0.0, 0.5, 1.0, 2.0}) {
        const double cur = sobolev_norm(rnd, sig);
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("checkpoints round-trip bit for bit") {
    Equation eq = make_equation("mzk", 2);
    Grid g{2, 16, 1.5};
    RoughDataSpec rd{0.7, 59, 0.3, DataProfile::power_law};
    SpectralState s = make_rough_data(rd, g, eq);
    s.time = 0.625;
    const std::string path = "checkpoint-roundtrip.bin";
    write_checkpoint(s, path);
    SpectralState back = read_checkpoint(path);
    CHECK(back.grid.dim == 2);
    CHECK(back.grid.n == 16);
    CHECK(back.grid.L == 1.5);
    CHECK(back.time == 0.625);
    CHECK(max_coeff_diff(back, s) == 0.0);
    std::filesystem::remove(path);
}

TEST_CASE("blow-up guard aborts runaway growth") {
    Equation eq = make_equation("nls-cubic", 1);
    eq.defocusing = -1.0; // focusing branch behind the flag
    Grid g{1, 64, 1.0};
    RoughDataSpec rd{1.0, 60, 40.0, DataProfile::power_law};
    SpectralState u0 = make_rough_data(rd, g, eq);
    SolveOptions so;
    so.steps = 4000;
    so.blowup_factor = 10.0;
    CHECK_THROWS_AS(solve(eq, u0, 2.0, so), NumericalError);
}

} // TEST_SUITE
