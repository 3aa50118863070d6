#ifndef FREQLAB_SPECTRAL_HPP
#define FREQLAB_SPECTRAL_HPP

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "freqlab/equation.hpp"

namespace freqlab {

using cplx = std::complex<double>;

// Periodic box, physical period 2*pi*L per axis, n modes per axis.
struct Grid {
    int dim = 1;
    int n = 64;
    double L = 1.0;

    long total() const {
        long t = 1;
        for (int i = 0; i < dim; ++i) t *= n;
        return t;
    }
    double volume() const { return std::pow(2.0 * M_PI * L, dim); }
    // integer mode of the i-th axis index
    int mode_of(int idx) const { return idx < (n + 1) / 2 ? idx : idx - n; }
    int index_of(int mode) const { return mode >= 0 ? mode : mode + n; }
};

bool operator==(const Grid& a, const Grid& b);

struct SpectralState {
    Grid grid;
    std::vector<cplx> coeffs; // Fourier coefficients of u = sum c_m e^{i m x / L}
    double time = 0.0;

    static SpectralState zero(const Grid& g) {
        SpectralState s;
        s.grid = g;
        s.coeffs.assign(static_cast<size_t>(g.total()), cplx(0, 0));
        return s;
    }
};

// flat index <-> integer mode vector
void decode_modes(const Grid& g, long idx, int* m);
long encode_modes(const Grid& g, const int* m);
Vec frequency_of(const Grid& g, const int* m);

// Largest retained mode so a degree-k product is alias-free on the same
// grid (strictly below n / (k+1)).
int dealias_band(int n, int k);
void apply_band_mask(SpectralState& s, int band);

// exact linear flow: multiplies each mode by exp(i dt L(xi))
SpectralState linear_propagate(const Equation& eq, const SpectralState& s, double dt);

// Fourier coefficients of the nonlinear term as it appears in
// u_t = i L u + N(u); transform round-trip with dealiasing.
// renormalized = true removes the lattice-exact coherent resonances
// (pair-sum corrections) that have no counterpart on the full space.
SpectralState nonlinear_term(const Equation& eq, const SpectralState& s, bool renormalized = false);

// brute-force discrete convolution over the retained band (test oracle)
SpectralState nonlinear_term_bruteforce(const Equation& eq, const SpectralState& s);

struct SolveOptions {
    int steps = 0;             // 0 = pick from suggested_steps
    bool renormalized = false;
    bool linear_only = false;
    double blowup_factor = 1e6;
    std::function<void(const SpectralState&)> on_step;
};

int suggested_steps(const Equation& eq, const Grid& g, double T);

// one integrating-factor RK4 step
SpectralState step_ifrk4(const Equation& eq, const SpectralState& s, double dt,
                         bool renormalized = false, bool linear_only = false);

SpectralState solve(const Equation& eq, const SpectralState& u0, double T,
                    const SolveOptions& opts = {});

// <xi>^sigma weighted l2 norm including the box volume factor
double sobolev_norm(const SpectralState& s, double sigma);
double mass(const SpectralState& s); // integral of |u|^2 (== u^2 for real fields)
double energy(const Equation& eq, const SpectralState& s);

double hermitian_defect(const SpectralState& s);
void make_hermitian(SpectralState& s);
double max_imag_physical(const SpectralState& s);

// flat binary checkpoint: int64 dim, int64 n, f64 L, f64 time, then
// interleaved re/im little-endian doubles in storage order
void write_checkpoint(const SpectralState& s, const std::string& path);
SpectralState read_checkpoint(const std::string& path);

// physical-space samples (inverse transform)
std::vector<cplx> to_physical(const SpectralState& s);
SpectralState from_physical(const Grid& g, const std::vector<cplx>& phys, double time = 0.0);

} // namespace freqlab

#endif
