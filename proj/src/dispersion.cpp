#include "freqlab/dispersion.hpp"

namespace freqlab {

Vec Dispersion::gradient_fd(const Vec& x, double h) const {
    Vec g(x.d);
    Vec a = x, b = x;
    for (int i = 0; i < x.d; ++i) {
        a[i] = x[i] + h;
        b[i] = x[i] - h;
        g[i] = (symbol(a) - symbol(b)) / (2.0 * h);
        a[i] = x[i];
        b[i] = x[i];
    }
    return g;
}

void Dispersion::hessian_fd(const Vec& x, double* H, double h) const {
    const int d = x.d;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            Vec pp = x, pm = x, mp = x, mm = x;
            pp[i] += h; pp[j] += h;
            pm[i] += h; pm[j] -= h;
            mp[i] -= h; mp[j] += h;
            mm[i] -= h; mm[j] -= h;
            H[i * d + j] = (symbol(pp) - symbol(pm) - symbol(mp) + symbol(mm)) / (4.0 * h * h);
        }
    }
}

Dispersion make_dispersion(DispersionKind kind, int dim) {
    Dispersion d;
    d.kind = kind;
    d.dim = dim;
    switch (kind) {
        case DispersionKind::schrodinger:
            d.name = "schrodinger";
            d.degree = 2;
            break;
        case DispersionKind::zk:
            d.name = "zk";
            d.degree = 3;
            if (dim < 2) throw std::invalid_argument("zk dispersion needs dim >= 2");
            break;
        case DispersionKind::zk_sym2d:
            d.name = "zk-sym2d";
            d.degree = 3;
            if (dim != 2) throw std::invalid_argument("zk-sym2d dispersion needs dim == 2");
            break;
        case DispersionKind::kdv:
            d.name = "kdv";
            d.degree = 3;
            if (dim != 1) throw std::invalid_argument("kdv dispersion needs dim == 1");
            break;
        case DispersionKind::custom:
            d.name = "custom";
            break;
    }
    return d;
}

} // namespace freqlab
