#ifndef FREQLAB_EQUATION_HPP
#define FREQLAB_EQUATION_HPP

#include <complex>
#include <string>
#include <vector>

#include "freqlab/dispersion.hpp"

namespace freqlab {

enum class MultiplierKind { unit, gradient_jap, derivative_x };

// Arity, conjugation pattern and multiplier of a k-linear nonlinearity,
// plus the Sobolev indices (s, s' = s + epsilon) used in estimate weights.
struct NonlinearitySpec {
    int k = 3;
    std::vector<bool> conjugated; // size k; true => term enters with a conjugate
    MultiplierKind multiplier_kind = MultiplierKind::unit;
    double multiplier_power = 0.0;
    double s = 0.0;
    double epsilon = 0.0;

    // sign of xi_j in the convolution constraint, j in 1..k
    int sign(int j) const { return conjugated[static_cast<size_t>(j - 1)] ? -1 : +1; }
    bool real_equation() const {
        for (bool c : conjugated)
            if (c) return false;
        return true;
    }
    double s_prime() const { return s + epsilon; }
};

// |m(Xi)| evaluated on the output frequency (the estimates only use the
// size of the derivative multiplier).
inline double multiplier_size(const NonlinearitySpec& nl, const Vec& xi) {
    switch (nl.multiplier_kind) {
        case MultiplierKind::unit: return 1.0;
        case MultiplierKind::gradient_jap: return std::pow(jap(xi), nl.multiplier_power);
        case MultiplierKind::derivative_x: return std::pow(std::fabs(xi[0]), nl.multiplier_power);
    }
    return 1.0;
}

// One dispersive model: analysis symbol, nonlinearity spec, and the exact
// solver-side realization (linear symbol sign, physical-space power,
// Fourier multiplier of the nonlinear term).
struct Equation {
    std::string id;
    int dim = 1;
    Dispersion dispersion;
    NonlinearitySpec nonlin;

    // solver realization: u_t = i L(xi) u + N(u), L = linear_sign * symbol
    double linear_sign = 1.0;
    bool real_field = true;
    int nls_halfpower = 0;   // n for |u|^{2n} u; 0 for real equations
    double defocusing = 1.0; // +1 defocusing, -1 focusing (NLS only)
    double front_factor = 1.0; // scalar in front of the nonlinearity (mu for zk-sym2d)
    double s_floor = 0.0;      // regularity floor of the target theorem (documentation)

    double linear_symbol(const Vec& xi) const { return linear_sign * dispersion.symbol(xi); }

    // factor multiplying the transform of the physical-space product
    std::complex<double> nonlinear_multiplier(const Vec& xi) const {
        const std::complex<double> I(0.0, 1.0);
        switch (dispersion.kind) {
            case DispersionKind::kdv:
                return I * xi[0] * front_factor;
            case DispersionKind::zk:
                return I * xi[0] * front_factor;
            case DispersionKind::zk_sym2d:
                return I * (xi[0] + xi[1]) * front_factor;
            case DispersionKind::schrodinger:
                return -I * defocusing * front_factor;
            case DispersionKind::custom:
                return front_factor;
        }
        return front_factor;
    }
};

// Registry ids: "nls-cubic", "nls-quintic", "mzk", "mzk-sym2d", "kdv4",
// plus "mkdv" (the 1D cubic comparison model used by the region estimates).
Equation make_equation(const std::string& id, int dim);
std::vector<std::string> equation_ids();

// coefficients of the 2D symmetrizing map
inline constexpr double kZkSymMu = 0.62996052494743658238; // 4^{-1/3}
inline constexpr double kZkSymLambda = 1.09112363597172140356; // sqrt(3) * 4^{-1/3}

} // namespace freqlab

#endif
