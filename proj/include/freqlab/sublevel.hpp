#ifndef FREQLAB_SUBLEVEL_HPP
#define FREQLAB_SUBLEVEL_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "freqlab/phase.hpp"

namespace freqlab {

// Raised when an integrator or solver cannot produce a trustworthy result.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Weights: product of <xi_i>^a |xi_i|^b factors, optionally times the
// estimate multiplier M = |m(Xi)| <xi>^{s'} / prod_j <xi_j>^s or its square.

struct WeightFactor {
    int index = 0; // 0..k, 0 is the output frequency
    double jap_pow = 0.0;
    double abs_pow = 0.0;
};

enum class EstimateWeightMode { none, m1, m2 };

struct WeightExpr {
    std::vector<WeightFactor> factors;
    EstimateWeightMode mode = EstimateWeightMode::none;

    double eval(const NonlinearitySpec* nl, const Vec* slots) const;
};

// ---------------------------------------------------------------------------
// Regions: conjunction of named clauses on the assembled frequency tuple.
// These encode the case splits of the concrete estimates.

struct RegionClause {
    enum class Kind {
        comparable_abs, // | |xi_i| - |xi_j| | <= c * max(|xi_i|, |xi_j|)
        ratio_le,       // |xi_i| <= c |xi_j|
        ratio_ge,       // |xi_i| >= c |xi_j|
        sepprod_ge,     // prod_axis |xi_0[a] - xi_j[a]| >= c |xi_0|
        sepprod_le,     // prod_axis |xi_0[a] - xi_j[a]| <= c |xi_0|
        abs_ge,         // |xi_i| >= c
        abs_le,         // |xi_i| <= c
    };
    Kind kind = Kind::abs_ge;
    int i = 0, j = 0;
    double c = 0.0;
};

struct RegionExpr {
    std::vector<RegionClause> clauses;
    bool contains(const Vec* slots) const;
};

// ---------------------------------------------------------------------------
// Frequency-restricted estimate specification.

enum class PhaseFamily { equation, quad1d, quad2d_plus, quad2d_minus };
enum class Estimator { mc, grid };

struct SublevelSpec {
    PhaseFamily family = PhaseFamily::quad1d;
    std::optional<Equation> eq; // required for PhaseFamily::equation
    std::vector<int> fixed_set; // A, subset of 0..k, supped over
    int dependent = -1;         // input eliminated by the constraint; -1 = auto
    WeightExpr weight;
    RegionExpr region;
    double box = 10.0; // truncation radius of the integrated variables

    Estimator estimator = Estimator::mc;
    int samples = 100000;    // mc sample budget per evaluation
    int grid_points = 129;   // per axis, grid estimator
    double alpha_scale = 2.0; // alpha scan range: +- alpha_scale * box^degree
    int restarts = 32;
    int ascent_rounds = 3;
};

// Throws std::invalid_argument when the spec is malformed.
void validate_spec(const SublevelSpec& spec);

int integration_dims(const SublevelSpec& spec);
int scan_dims(const SublevelSpec& spec); // alpha + fixed-frequency coordinates
double alpha_range(const SublevelSpec& spec);

struct IntegralResult {
    double value = 0.0;
    double stderr_est = 0.0;
    bool low_confidence = false;
};

// Integral of weight * 1_region * 1_{|Phi - alpha| < M} over the integrated
// variables in [-box, box]^m. fixed_coords: coordinates of the A-set
// frequencies, flattened in fixed_set order (empty for the model families).
IntegralResult sublevel_integral(const SublevelSpec& spec, double alpha,
                                 const std::vector<double>& fixed_coords, double M, uint64_t seed);

struct ScanResult {
    double value = 0.0;
    double stderr_est = 0.0;
    bool low_confidence = false;
    std::vector<double> witness; // [alpha, fixed coords...]
    double spread = 0.0;         // max - min over restart optima
    int restarts = 0;
    bool witness_at_edge = false;
};

ScanResult sup_scan(const SublevelSpec& spec, double M, uint64_t seed,
                    const std::vector<std::vector<double>>& hints = {});

struct BetaLevel {
    double M = 0.0;
    double value = 0.0;
    double stderr_est = 0.0;
    std::vector<double> witness;
    bool low_confidence = false;
    bool witness_at_edge = false;
};

struct BetaFit {
    double beta = 0.0;
    double r2 = 0.0;
    double intercept = 0.0; // log2 value at log2 M = 0
    std::vector<BetaLevel> levels;
    bool low_confidence = false;
    bool monotone = true;
};

// Least squares of log2(sup value) against log2 M over the dyadic levels.
// Requires >= 6 levels, all > 1.
BetaFit fit_beta(const SublevelSpec& spec, const std::vector<double>& M_levels, uint64_t seed,
                 const std::vector<std::vector<double>>& hints = {});

std::vector<double> dyadic_levels(int lo_exp, int hi_exp);

// ---------------------------------------------------------------------------
// Closed-form / semi-analytic oracles for the quadratic model phases.

// measure of { |p| < box : |p^2 - alpha| < M }
double quadratic_sublevel_1d(double alpha, double M,
                             double box = std::numeric_limits<double>::infinity());
// measure of { |p|,|q| < N : |p^2 + sign q^2 - alpha| < M }, sign = +-1
double quadratic_sublevel_2d(int sign, double alpha, double M, double N);

// ---------------------------------------------------------------------------
// Convolution bound of the temporal weights: integral of
// <tau-a1>^{-2b} <tau-a2>^{-2b} dtau against the claimed <a1-a2>^{-2b} decay.

struct TauBound {
    double integral = 0.0;
    double bound_ratio = 0.0; // integral * <a1-a2>^{2b}
};

TauBound tau_convolution_bound(double a1, double a2, double b);

// ---------------------------------------------------------------------------
// Discrete dualized multilinear form on a small frequency lattice: ratio of
// the weighted convolution sum against the product of l2 norms for random
// test sequences. The kernel carries the full temporal decay <Phi>^{2(b-1)+},
// so b should sit close to 1/2 for near-critical weights.

struct MultilinearCheck {
    double max_ratio = 0.0;
    std::vector<double> ratios; // per trial
};

MultilinearCheck discrete_multilinear_check(const Equation& eq, double s, double eps, int grid_size,
                                            int trials, uint64_t seed, double b = 0.51);

// Single-tuple convenience used by tests: the dual-form weight at one tuple.
double multilinear_weight(const Equation& eq, double s, double eps, const FrequencyTuple& t,
                          double b = 0.51);

// ---------------------------------------------------------------------------
// Named estimate specifications for the concrete experiments.

SublevelSpec spec_quad1d(double box);
SublevelSpec spec_quad2d(int sign, double N);
// comparable-frequency region of the 1D cubic model with weight <x>^{2(1-2s)}
SublevelSpec spec_mkdv_region(double s, double N, double comparability = 0.25);
// comparable-frequency Schur piece for the symmetrized 2D model
SublevelSpec spec_symzk_comparable(double s, double eps, double N);
// separated-frequency Schur piece (smallest frequency much smaller)
SublevelSpec spec_symzk_separated(double s, double eps, double N);
// stationary-pairing piece for the 2D cubic Schrodinger model
SublevelSpec spec_nls2d_pairing(double s, double eps, double N);
// comparable-frequency piece for the 1D quartic model
SublevelSpec spec_kdv4_comparable(double s, double eps, double N);

} // namespace freqlab

#endif
