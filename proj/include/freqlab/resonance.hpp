#ifndef FREQLAB_RESONANCE_HPP
#define FREQLAB_RESONANCE_HPP

#include <vector>

#include "freqlab/phase.hpp"

namespace freqlab {

struct CriticalPoint {
    std::vector<double> location;     // chart coordinates
    double value = 0.0;               // P at the point
    double grad_norm = 0.0;
    std::vector<double> eigenvalues;  // Hessian spectrum, ascending
    int numerical_rank = 0;
    int n_pos = 0, n_neg = 0, n_zero = 0;
    int newton_iters = 0;
};

enum class MorseClass { nondegenerate, semi_nondegenerate, degenerate };

// Rank thresholding of the Hessian spectrum: eigenvalues below
// rank_tol * max|lambda| count as zero modes.
MorseClass classify(const CriticalPoint& p, double rank_tol = 1e-6);

// Hessian spectrum / rank / signature at an arbitrary chart point (no
// stationarity requirement). Used by the rank-dichotomy experiments.
CriticalPoint hessian_report(const PhaseChart& chart, const std::vector<double>& q,
                             double rank_tol = 1e-6);

struct CriticalPointSearch {
    int seeds_per_axis = 9;
    double seed_lo = -1.5, seed_hi = 1.5;
    double grad_tol = 1e-10;   // Newton convergence target
    double accept_tol = 1e-8;  // reported points must satisfy this
    double dedup_dist = 1e-4;
    int max_iters = 50;
    double rank_tol = 1e-6;
};

struct AtlasResult {
    std::vector<CriticalPoint> points;
    int seeds_total = 0;
    int seeds_diverged = 0;
};

// Newton iteration on grad P from a seed lattice, deduplicated.
AtlasResult find_critical_points(const PhaseChart& chart, const CriticalPointSearch& opts = {});

struct MorseWindow {
    double exponent = 0.0;
    double r2 = 0.0;
    double radius_used = 0.0;
    double model_exponent = 0.0;
    int levels_used = 0;
};

struct MorseWindowOptions {
    long samples = 8000000;
    int max_retries = 3;
    double fit_r2 = 0.9;
    uint64_t seed = 1;
};

// Fits the local sublevel scaling measure{ |P - P(z)| < m } ~ m^e around a
// critical point; e should match 1 for charts with two nondegenerate
// directions and 1/2 for one-dimensional charts.
MorseWindow morse_window_check(const PhaseChart& chart, const std::vector<double>& point,
                               double radius, const MorseWindowOptions& opts = {});

} // namespace freqlab

#endif
