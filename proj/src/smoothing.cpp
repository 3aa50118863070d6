#include "freqlab/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "freqlab/rng.hpp"
#include "freqlab/sublevel.hpp"

namespace freqlab {

SpectralState make_rough_data(const RoughDataSpec& spec, const Grid& grid, const Equation& eq) {
    SpectralState s = SpectralState::zero(grid);
    const int band = dealias_band(grid.n, eq.nonlin.k);
    const int d = grid.dim;
    int m[3] = {0, 0, 0};
    for (long i = 0; i < grid.total(); ++i) {
        decode_modes(grid, i, m);
        bool zero = true, in_band = true;
        for (int ax = 0; ax < d; ++ax) {
            if (m[ax] != 0) zero = false;
            if (std::abs(m[ax]) > band) in_band = false;
        }
        if (zero || !in_band) continue; // zero mean, band-limited
        const Vec xi = frequency_of(grid, m);
        double amp = spec.amplitude * std::pow(jap(xi), -spec.s - 0.5 * d);
        if (spec.profile == DataProfile::power_law_loglog)
            amp /= std::log(M_E + xi.norm());
        // Phases are keyed by the integer mode, so refinements agree on the
        // shared modes. Real fields draw the phase of the lexicographically
        // positive representative and mirror it, keeping the modulus exact.
        int rep[3] = {m[0], m[1], m[2]};
        bool flip = false;
        for (int ax = 0; ax < d; ++ax) {
            if (rep[ax] == 0) continue;
            flip = rep[ax] < 0;
            break;
        }
        if (eq.real_field && flip)
            for (int ax = 0; ax < d; ++ax) rep[ax] = -rep[ax];
        Rng r = make_stream(spec.seed, 0x9a5eu, static_cast<uint64_t>(static_cast<int64_t>(rep[0])),
                            static_cast<uint64_t>(static_cast<int64_t>(rep[1])),
                            static_cast<uint64_t>(static_cast<int64_t>(rep[2])));
        double theta = 6.283185307179586 * r.u01();
        if (eq.real_field && flip) theta = -theta;
        s.coeffs[static_cast<size_t>(i)] = std::polar(amp, theta);
    }
    return s;
}

SpectralState duhamel_residual(const Equation& eq, const SpectralState& u0, double t,
                               const ResidualOptions& opts) {
    SolveOptions so;
    so.steps = opts.steps;
    so.renormalized = opts.renormalized;
    SpectralState u = solve(eq, u0, t, so);
    SpectralState lin = linear_propagate(eq, u0, t);
    SpectralState z = u;
    for (size_t i = 0; i < z.coeffs.size(); ++i) z.coeffs[i] -= lin.coeffs[i];
    return z;
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::stable: return "stable";
        case Verdict::growing: return "growing";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

Verdict row_verdict(const std::vector<double>& norms, double window) {
    const size_t n = norms.size();
    if (n < 2) return Verdict::inconclusive;
    for (double v : norms)
        if (!(v >= 0) || !std::isfinite(v)) return Verdict::inconclusive;
    // ratios of the top two refinements
    std::vector<double> ratios;
    for (size_t i = n - 1; i >= 1 && ratios.size() < 2; --i) {
        if (norms[i - 1] <= 0) return Verdict::inconclusive;
        ratios.push_back(norms[i] / norms[i - 1]);
    }
    bool stable = true;
    for (double r : ratios)
        if (r > window || r < 1.0 / window) stable = false;
    if (stable) return Verdict::stable;
    if (ratios.front() > window) return Verdict::growing; // most refined ratio
    return Verdict::inconclusive;
}

void enforce_monotone_verdicts(SmoothingReport& rep) {
    rep.monotonicity_flagged.assign(rep.eps_grid.size(), false);
    for (size_t hi = 0; hi < rep.eps_grid.size(); ++hi) {
        if (rep.verdicts[hi] != Verdict::stable) continue;
        for (size_t lo = 0; lo < hi; ++lo) {
            if (rep.verdicts[lo] != Verdict::stable) {
                rep.verdicts[lo] = Verdict::inconclusive;
                rep.monotonicity_flagged[lo] = true;
            }
        }
    }
}

SmoothingReport smoothing_scan(const Equation& eq, double s, const std::vector<double>& eps_grid,
                               const std::vector<int>& resolutions, const SmoothingOptions& opts) {
    if (eps_grid.empty()) throw std::invalid_argument("eps grid must be nonempty");
    for (double e : eps_grid)
        if (e < 0 || e > 1.2) throw std::invalid_argument("eps grid must lie in [0, 1.2]");
    if (resolutions.size() < 3) throw std::invalid_argument("need at least 3 resolutions");
    if (opts.trials < 3) throw std::invalid_argument("need at least 3 trials");

    SmoothingReport rep;
    rep.equation = eq.id;
    rep.s = s;
    rep.t = opts.t;
    rep.eps_grid = eps_grid;
    rep.resolutions = resolutions;

    // one residual per (resolution, trial); the eps grid only reweights norms
    struct Cell {
        std::vector<double> norms; // per eps
        bool aborted = false;
    };
    auto run_cell = [&](int n, int trial) {
        Cell cell;
        Grid g{eq.dim, n, 1.0};
        RoughDataSpec rd;
        rd.s = s;
        rd.amplitude = opts.amplitude;
        rd.profile = opts.profile;
        rd.seed = hash_mix(opts.seed, 0xda7au, static_cast<uint64_t>(trial));
        SpectralState u0 = make_rough_data(rd, g, eq);
        ResidualOptions ro;
        ro.steps = opts.steps;
        ro.renormalized = opts.renormalized;
        try {
            SpectralState z = duhamel_residual(eq, u0, opts.t, ro);
            for (double e : eps_grid) cell.norms.push_back(sobolev_norm(z, s + e));
        } catch (const NumericalError&) {
            cell.aborted = true;
        }
        return cell;
    };

    const size_t nr = resolutions.size();
    std::vector<std::vector<Cell>> cells(nr); // [res][trial]
    if (opts.threads > 1) {
        std::vector<std::future<Cell>> futs;
        for (size_t ri = 0; ri < nr; ++ri)
            for (int t = 0; t < opts.trials; ++t)
                futs.push_back(std::async(std::launch::async, run_cell, resolutions[ri], t));
        size_t f = 0;
        for (size_t ri = 0; ri < nr; ++ri) {
            for (int t = 0; t < opts.trials; ++t) cells[ri].push_back(futs[f++].get());
        }
    } else {
        for (size_t ri = 0; ri < nr; ++ri)
            for (int t = 0; t < opts.trials; ++t) cells[ri].push_back(run_cell(resolutions[ri], t));
    }

    rep.residual_norms.assign(eps_grid.size(), std::vector<double>(nr, 0.0));
    std::vector<std::vector<bool>> row_ok(eps_grid.size(), std::vector<bool>(nr, true));
    for (size_t ri = 0; ri < nr; ++ri) {
        std::vector<double> vals;
        for (size_t ei = 0; ei < eps_grid.size(); ++ei) {
            vals.clear();
            for (const auto& c : cells[ri]) {
                if (c.aborted) continue;
                vals.push_back(c.norms[ei]);
            }
            if (vals.empty()) {
                row_ok[ei][ri] = false;
                continue;
            }
            std::sort(vals.begin(), vals.end());
            rep.residual_norms[ei][ri] = vals[vals.size() / 2];
        }
        for (const auto& c : cells[ri])
            if (c.aborted) ++rep.cells_aborted;
    }

    for (size_t ei = 0; ei < eps_grid.size(); ++ei) {
        bool ok = true;
        for (size_t ri = 0; ri < nr; ++ri) ok = ok && row_ok[ei][ri];
        rep.verdicts.push_back(ok ? row_verdict(rep.residual_norms[ei], opts.stability_window)
                                  : Verdict::inconclusive);
    }
    enforce_monotone_verdicts(rep);
    return rep;
}

} // namespace freqlab
