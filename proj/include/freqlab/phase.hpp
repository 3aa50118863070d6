#ifndef FREQLAB_PHASE_HPP
#define FREQLAB_PHASE_HPP

#include <optional>
#include <stdexcept>
#include <vector>

#include "freqlab/equation.hpp"

namespace freqlab {

// A point on the convolution hyperplane: output frequency xi together with
// the k input frequencies, xi = sum_j sign_j xi_j.
struct FrequencyTuple {
    Vec xi;
    std::vector<Vec> inputs;
};

// Signed-sum defect of the convolution constraint.
Vec gamma_residual(const NonlinearitySpec& nl, const FrequencyTuple& t);

// Solve the constraint for one input frequency. dependent_index in 1..k.
FrequencyTuple resolve_dependent(const NonlinearitySpec& nl, const Vec& xi,
                                 const std::vector<Vec>& free_inputs, int dependent_index);

// Total phase phi(xi) - sum_j sign_j phi(xi_j).
double total_phase(const Dispersion& disp, const NonlinearitySpec& nl, const FrequencyTuple& t);

// Rescaled phase P(p) = phi(p0) - sum_j sign_j phi(p_j) with p0 implied by
// the constraint. Input is the list of k rescaled input frequencies.
double rescaled_phase(const Dispersion& disp, const NonlinearitySpec& nl, const std::vector<Vec>& p);

// Divide a tuple by the Euclidean norm of the frequency at scale_ref
// (0 = output). Throws on a degenerate scale (norm below 1e-12).
std::vector<Vec> rescale_tuple(const NonlinearitySpec& nl, const FrequencyTuple& t, int scale_ref,
                               double* scale_out = nullptr);

// ---------------------------------------------------------------------------
// Charts: the rescaled phase as a function of a selected block of free
// frequencies, with one input eliminated through the constraint and the rest
// pinned. Used by the critical-point search, the Hessian classification and
// the sublevel experiments.

struct PhaseChart {
    Dispersion disp;
    NonlinearitySpec nl;
    std::vector<int> free_indices; // subset of 0..k, each contributing d coords
    int dependent = 0;             // input index eliminated via the constraint;
                                   // 0 means the output is the derived slot
    std::vector<Vec> fixed_values; // indexed 0..k, used where fixed
    std::vector<char> role;        // 0 fixed, 1 free, 2 dependent; index 0..k

    int dim() const { return static_cast<int>(free_indices.size()) * disp.dim; }
    int tuple_size() const { return nl.k + 1; }

    // Fill slots[0..k] from chart coordinates q (size dim()).
    void assemble(const double* q, Vec* slots) const;

    double value(const double* q) const;
    // g: dim() entries; H: dim() x dim() row-major
    void gradient(const double* q, double* g) const;
    void hessian(const double* q, double* H) const;
    void gradient_fd(const double* q, double* g, double step = 1e-5) const;
    void hessian_fd(const double* q, double* H, double step = 1e-5) const;
};

// Build a chart. fixed: values for every index not free and not dependent.
PhaseChart make_chart(const Equation& eq, std::vector<int> free_indices, int dependent,
                      const std::vector<std::pair<int, Vec>>& fixed);

// ---------------------------------------------------------------------------
// 2D ZK symmetrization, x' = mu x + lambda y, y' = mu x - lambda y.

// The coordinate map itself (and inverse).
Vec zk2d_symmetrize(const Vec& xy);
Vec zk2d_desymmetrize(const Vec& xy);

// Frequency maps induced on symbols: zk_freq_from_sym carries a frequency of
// the symmetrized form to a ZK frequency with
// phi_zk(zk_freq_from_sym(eta)) = eta_x^3 + eta_y^3, and sym_freq_from_zk is
// its inverse, phi_sym(sym_freq_from_zk(xi)) = phi_zk(xi).
Vec zk_freq_from_sym(const Vec& eta);
Vec sym_freq_from_zk(const Vec& xi);

} // namespace freqlab

#endif
