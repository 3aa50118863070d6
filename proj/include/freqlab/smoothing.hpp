#ifndef FREQLAB_SMOOTHING_HPP
#define FREQLAB_SMOOTHING_HPP

#include <string>
#include <vector>

#include "freqlab/spectral.hpp"

namespace freqlab {

enum class DataProfile { power_law, power_law_loglog };

struct RoughDataSpec {
    double s = 0.0;
    uint64_t seed = 1;
    double amplitude = 0.1;
    DataProfile profile = DataProfile::power_law_loglog;
};

// Random data with |u0^(xi)| = amplitude <xi>^{-s-d/2} (times an optional
// logarithmic decay correction) and phases drawn per integer mode, so the
// same seed yields a coherent refinement across resolutions. Zero mean,
// Hermitian for real equations, supported on the dealias band.
SpectralState make_rough_data(const RoughDataSpec& spec, const Grid& grid, const Equation& eq);

struct ResidualOptions {
    int steps = 0; // 0 = suggested_steps
    bool renormalized = false;
};

// z(t) = u(t) - G(t) u0
SpectralState duhamel_residual(const Equation& eq, const SpectralState& u0, double t,
                               const ResidualOptions& opts = {});

enum class Verdict { stable, growing, inconclusive };
std::string verdict_name(Verdict v);

struct SmoothingOptions {
    double t = 0.5;
    int trials = 5;
    double amplitude = 0.1;
    DataProfile profile = DataProfile::power_law_loglog;
    int steps = 0;            // per-solve steps; 0 = suggested
    bool renormalized = true; // remove lattice-coherent resonances
    uint64_t seed = 1;
    int threads = 1;
    double stability_window = 1.2;
};

struct SmoothingReport {
    std::string equation;
    double s = 0.0;
    double t = 0.0;
    std::vector<double> eps_grid;
    std::vector<int> resolutions;
    // median residual Sobolev norms, indexed [eps][resolution]
    std::vector<std::vector<double>> residual_norms;
    std::vector<Verdict> verdicts;
    std::vector<bool> monotonicity_flagged; // per eps, set by the consistency pass
    int cells_aborted = 0;
};

SmoothingReport smoothing_scan(const Equation& eq, double s, const std::vector<double>& eps_grid,
                               const std::vector<int>& resolutions, const SmoothingOptions& opts);

// verdict computed from a row of norms across increasing resolutions
Verdict row_verdict(const std::vector<double>& norms, double window);
// enforce "smaller eps never worse": stable above a non-stable cell flags it
void enforce_monotone_verdicts(SmoothingReport& rep);

} // namespace freqlab

#endif
