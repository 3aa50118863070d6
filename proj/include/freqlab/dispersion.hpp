#ifndef FREQLAB_DISPERSION_HPP
#define FREQLAB_DISPERSION_HPP

#include <functional>
#include <stdexcept>
#include <string>

#include "freqlab/vec.hpp"

namespace freqlab {

enum class DispersionKind {
    schrodinger, // |xi|^2
    zk,          // xi_1 * |xi|^2, d >= 2
    zk_sym2d,    // x^3 + y^3, d = 2
    kdv,         // xi^3, d = 1
    custom,
};

// Homogeneous dispersion symbol with analytic first and second derivatives
// for the named kinds; user-supplied symbols fall back to central finite
// differences with step 1e-5.
struct Dispersion {
    std::string name;
    int dim = 1;
    int degree = 3;
    DispersionKind kind = DispersionKind::kdv;
    std::function<double(const Vec&)> custom_symbol;

    double symbol(const Vec& x) const {
        switch (kind) {
            case DispersionKind::schrodinger:
                return x.norm_sq();
            case DispersionKind::zk:
                return x[0] * x.norm_sq();
            case DispersionKind::zk_sym2d:
                return x[0] * x[0] * x[0] + x[1] * x[1] * x[1];
            case DispersionKind::kdv:
                return x[0] * x[0] * x[0];
            case DispersionKind::custom:
                return custom_symbol(x);
        }
        return 0;
    }

    Vec gradient(const Vec& x) const {
        Vec g(x.d);
        switch (kind) {
            case DispersionKind::schrodinger:
                for (int i = 0; i < x.d; ++i) g[i] = 2.0 * x[i];
                return g;
            case DispersionKind::zk:
                g[0] = x.norm_sq() + 2.0 * x[0] * x[0];
                for (int i = 1; i < x.d; ++i) g[i] = 2.0 * x[0] * x[i];
                return g;
            case DispersionKind::zk_sym2d:
                g[0] = 3.0 * x[0] * x[0];
                g[1] = 3.0 * x[1] * x[1];
                return g;
            case DispersionKind::kdv:
                g[0] = 3.0 * x[0] * x[0];
                return g;
            case DispersionKind::custom:
                return gradient_fd(x);
        }
        return g;
    }

    // H must hold at least d*d doubles, row-major.
    void hessian(const Vec& x, double* H) const {
        const int d = x.d;
        for (int i = 0; i < d * d; ++i) H[i] = 0.0;
        switch (kind) {
            case DispersionKind::schrodinger:
                for (int i = 0; i < d; ++i) H[i * d + i] = 2.0;
                return;
            case DispersionKind::zk:
                H[0] = 6.0 * x[0];
                for (int j = 1; j < d; ++j) {
                    H[j] = 2.0 * x[j];
                    H[j * d] = 2.0 * x[j];
                    H[j * d + j] = 2.0 * x[0];
                }
                return;
            case DispersionKind::zk_sym2d:
                H[0] = 6.0 * x[0];
                H[3] = 6.0 * x[1];
                return;
            case DispersionKind::kdv:
                H[0] = 6.0 * x[0];
                return;
            case DispersionKind::custom:
                hessian_fd(x, H);
                return;
        }
    }

    bool has_closed_derivatives() const { return kind != DispersionKind::custom; }

    Vec gradient_fd(const Vec& x, double h = 1e-5) const;
    void hessian_fd(const Vec& x, double* H, double h = 1e-5) const;
};

Dispersion make_dispersion(DispersionKind kind, int dim);

} // namespace freqlab

#endif
