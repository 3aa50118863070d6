#include "freqlab/phase.hpp"

#include <cstring>

namespace freqlab {

Vec gamma_residual(const NonlinearitySpec& nl, const FrequencyTuple& t) {
    Vec r = t.xi;
    for (int j = 1; j <= nl.k; ++j) r -= nl.sign(j) * t.inputs[static_cast<size_t>(j - 1)];
    return r;
}

FrequencyTuple resolve_dependent(const NonlinearitySpec& nl, const Vec& xi,
                                 const std::vector<Vec>& free_inputs, int dependent_index) {
    if (dependent_index < 1 || dependent_index > nl.k)
        throw std::invalid_argument("dependent_index must be in 1..k");
    if (static_cast<int>(free_inputs.size()) != nl.k - 1)
        throw std::invalid_argument("expected k-1 free inputs");
    FrequencyTuple t;
    t.xi = xi;
    t.inputs.resize(static_cast<size_t>(nl.k), Vec(xi.d));
    Vec acc = xi;
    int slot = 0;
    for (int j = 1; j <= nl.k; ++j) {
        if (j == dependent_index) continue;
        const Vec& f = free_inputs[static_cast<size_t>(slot++)];
        t.inputs[static_cast<size_t>(j - 1)] = f;
        acc -= nl.sign(j) * f;
    }
    t.inputs[static_cast<size_t>(dependent_index - 1)] = nl.sign(dependent_index) * acc;
    return t;
}

double total_phase(const Dispersion& disp, const NonlinearitySpec& nl, const FrequencyTuple& t) {
    double phi = disp.symbol(t.xi);
    for (int j = 1; j <= nl.k; ++j)
        phi -= nl.sign(j) * disp.symbol(t.inputs[static_cast<size_t>(j - 1)]);
    return phi;
}

double rescaled_phase(const Dispersion& disp, const NonlinearitySpec& nl, const std::vector<Vec>& p) {
    if (static_cast<int>(p.size()) != nl.k) throw std::invalid_argument("expected k rescaled inputs");
    Vec p0(p[0].d);
    for (int j = 1; j <= nl.k; ++j) p0 += nl.sign(j) * p[static_cast<size_t>(j - 1)];
    double val = disp.symbol(p0);
    for (int j = 1; j <= nl.k; ++j) val -= nl.sign(j) * disp.symbol(p[static_cast<size_t>(j - 1)]);
    return val;
}

std::vector<Vec> rescale_tuple(const NonlinearitySpec& nl, const FrequencyTuple& t, int scale_ref,
                               double* scale_out) {
    double scale = (scale_ref == 0) ? t.xi.norm() : t.inputs[static_cast<size_t>(scale_ref - 1)].norm();
    if (scale < 1e-12) throw std::domain_error("degenerate scale: reference frequency below 1e-12");
    std::vector<Vec> p;
    p.reserve(static_cast<size_t>(nl.k));
    for (int j = 1; j <= nl.k; ++j) p.push_back((1.0 / scale) * t.inputs[static_cast<size_t>(j - 1)]);
    if (scale_out) *scale_out = scale;
    return p;
}

// ---------------------------------------------------------------------------

void PhaseChart::assemble(const double* q, Vec* slots) const {
    const int d = disp.dim;
    const int k = nl.k;
    for (int i = 0; i <= k; ++i) slots[i] = fixed_values[static_cast<size_t>(i)];
    int c = 0;
    for (int idx : free_indices) {
        Vec v(d);
        for (int a = 0; a < d; ++a) v[a] = q[c++];
        slots[idx] = v;
    }
    if (dependent == 0) {
        Vec p0(d);
        for (int j = 1; j <= k; ++j) p0 += nl.sign(j) * slots[j];
        slots[0] = p0;
    } else {
        Vec acc = slots[0];
        for (int j = 1; j <= k; ++j) {
            if (j == dependent) continue;
            acc -= nl.sign(j) * slots[j];
        }
        slots[dependent] = nl.sign(dependent) * acc;
    }
}

double PhaseChart::value(const double* q) const {
    Vec slots[8];
    assemble(q, slots);
    double val = disp.symbol(slots[0]);
    for (int j = 1; j <= nl.k; ++j) val -= nl.sign(j) * disp.symbol(slots[j]);
    return val;
}

void PhaseChart::gradient(const double* q, double* g) const {
    if (!disp.has_closed_derivatives()) {
        gradient_fd(q, g);
        return;
    }
    Vec slots[8];
    assemble(q, slots);
    const int d = disp.dim;
    const Vec grad_dep = disp.gradient(slots[dependent]);
    int c = 0;
    for (int idx : free_indices) {
        Vec gi = disp.gradient(slots[idx]);
        if (idx == 0) {
            // dP/dp0 = grad phi(p0) - grad phi(p_dep)
            for (int a = 0; a < d; ++a) g[c++] = gi[a] - grad_dep[a];
        } else {
            // dP/dp_i = sign_i (grad phi(p_dep) - grad phi(p_i))
            const double si = nl.sign(idx);
            for (int a = 0; a < d; ++a) g[c++] = si * (grad_dep[a] - gi[a]);
        }
    }
}

void PhaseChart::hessian(const double* q, double* H) const {
    if (!disp.has_closed_derivatives()) {
        hessian_fd(q, H);
        return;
    }
    Vec slots[8];
    assemble(q, slots);
    const int d = disp.dim;
    const int m = dim();
    const double sD = (dependent == 0) ? 0.0 : nl.sign(dependent);

    double Hdep[9], Hown[9], H0[9];
    disp.hessian(slots[dependent], Hdep);
    if (dependent == 0) disp.hessian(slots[0], H0);

    const int nb = static_cast<int>(free_indices.size());
    for (int bi = 0; bi < nb; ++bi) {
        const int i = free_indices[static_cast<size_t>(bi)];
        const double si = (i == 0) ? 1.0 : nl.sign(i);
        for (int bj = 0; bj < nb; ++bj) {
            const int j = free_indices[static_cast<size_t>(bj)];
            const double sj = (j == 0) ? 1.0 : nl.sign(j);
            double blk[9];
            if (dependent == 0) {
                // output derived: H_ij = s_i s_j D2phi(p0) - delta_ij s_i D2phi(p_i)
                for (int a = 0; a < d * d; ++a) blk[a] = si * sj * H0[a];
            } else if (i == 0 && j == 0) {
                disp.hessian(slots[0], Hown);
                for (int a = 0; a < d * d; ++a) blk[a] = Hown[a] - sD * Hdep[a];
            } else if (i == 0 || j == 0) {
                const double sf = (i == 0) ? sj : si;
                for (int a = 0; a < d * d; ++a) blk[a] = sf * sD * Hdep[a];
            } else {
                for (int a = 0; a < d * d; ++a) blk[a] = -si * sj * sD * Hdep[a];
            }
            if (i == j && i != 0) {
                disp.hessian(slots[i], Hown);
                for (int a = 0; a < d * d; ++a) blk[a] -= si * Hown[a];
            }
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    H[(bi * d + a) * m + (bj * d + b)] = blk[a * d + b];
        }
    }
}

void PhaseChart::gradient_fd(const double* q, double* g, double step) const {
    const int m = dim();
    std::vector<double> x(q, q + m);
    for (int i = 0; i < m; ++i) {
        const double q0 = x[static_cast<size_t>(i)];
        x[static_cast<size_t>(i)] = q0 + step;
        const double fp = value(x.data());
        x[static_cast<size_t>(i)] = q0 - step;
        const double fm = value(x.data());
        x[static_cast<size_t>(i)] = q0;
        g[i] = (fp - fm) / (2.0 * step);
    }
}

void PhaseChart::hessian_fd(const double* q, double* H, double step) const {
    const int m = dim();
    std::vector<double> x(q, q + m);
    auto at = [&](int i, double di, int j, double dj) {
        x[static_cast<size_t>(i)] += di;
        x[static_cast<size_t>(j)] += dj;
        const double v = value(x.data());
        x[static_cast<size_t>(i)] = q[i];
        x[static_cast<size_t>(j)] = q[j];
        return v;
    };
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (i == j) {
                const double f0 = value(x.data());
                H[i * m + j] = (at(i, step, j, 0) - 2.0 * f0 + at(i, -step, j, 0)) / (step * step);
            } else {
                H[i * m + j] = (at(i, step, j, step) - at(i, step, j, -step) -
                                at(i, -step, j, step) + at(i, -step, j, -step)) /
                               (4.0 * step * step);
            }
        }
    }
}

PhaseChart make_chart(const Equation& eq, std::vector<int> free_indices, int dependent,
                      const std::vector<std::pair<int, Vec>>& fixed) {
    PhaseChart ch;
    ch.disp = eq.dispersion;
    ch.nl = eq.nonlin;
    ch.free_indices = std::move(free_indices);
    ch.dependent = dependent;
    const int k = eq.nonlin.k;
    ch.fixed_values.assign(static_cast<size_t>(k + 1), Vec(eq.dim));
    ch.role.assign(static_cast<size_t>(k + 1), 0);
    for (int idx : ch.free_indices) {
        if (idx < 0 || idx > k) throw std::invalid_argument("free index out of range");
        ch.role[static_cast<size_t>(idx)] = 1;
    }
    if (dependent < 0 || dependent > k) throw std::invalid_argument("dependent index out of range");
    if (ch.role[static_cast<size_t>(dependent)] == 1)
        throw std::invalid_argument("dependent index cannot be free");
    ch.role[static_cast<size_t>(dependent)] = 2;
    for (auto& [idx, v] : fixed) {
        if (idx < 0 || idx > k) throw std::invalid_argument("fixed index out of range");
        if (ch.role[static_cast<size_t>(idx)] != 0)
            throw std::invalid_argument("fixed index clashes with free/dependent");
        ch.fixed_values[static_cast<size_t>(idx)] = v;
    }
    return ch;
}

// ---------------------------------------------------------------------------

Vec zk2d_symmetrize(const Vec& xy) {
    return Vec::of(kZkSymMu * xy[0] + kZkSymLambda * xy[1], kZkSymMu * xy[0] - kZkSymLambda * xy[1]);
}

Vec zk2d_desymmetrize(const Vec& xy) {
    return Vec::of((xy[0] + xy[1]) / (2.0 * kZkSymMu), (xy[0] - xy[1]) / (2.0 * kZkSymLambda));
}

Vec zk_freq_from_sym(const Vec& eta) {
    return Vec::of(kZkSymMu * (eta[0] + eta[1]), kZkSymLambda * (eta[0] - eta[1]));
}

Vec sym_freq_from_zk(const Vec& xi) {
    const double a = xi[0] / (2.0 * kZkSymMu);
    const double b = xi[1] / (2.0 * kZkSymLambda);
    return Vec::of(a + b, a - b);
}

} // namespace freqlab
