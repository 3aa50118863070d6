#include "freqlab/equation.hpp"

#include <stdexcept>

namespace freqlab {

std::vector<std::string> equation_ids() {
    return {"kdv4", "mkdv", "mzk", "mzk-sym2d", "nls-cubic", "nls-quintic"};
}

Equation make_equation(const std::string& id, int dim) {
    Equation eq;
    eq.id = id;
    eq.dim = dim;

    auto real_nonlin = [](int k) {
        NonlinearitySpec nl;
        nl.k = k;
        nl.conjugated.assign(static_cast<size_t>(k), false);
        nl.multiplier_kind = MultiplierKind::gradient_jap;
        nl.multiplier_power = 1.0;
        return nl;
    };
    auto nls_nonlin = [](int k) {
        // u ubar u ... alternating, conjugates on the even slots
        NonlinearitySpec nl;
        nl.k = k;
        nl.conjugated.resize(static_cast<size_t>(k));
        for (int j = 1; j <= k; ++j) nl.conjugated[static_cast<size_t>(j - 1)] = (j % 2 == 0);
        nl.multiplier_kind = MultiplierKind::unit;
        return nl;
    };

    if (id == "kdv4") {
        if (dim != 1) throw std::invalid_argument("kdv4 is one-dimensional");
        eq.dispersion = make_dispersion(DispersionKind::kdv, 1);
        eq.nonlin = real_nonlin(4);
        eq.s_floor = -1.0 / 6.0;
    } else if (id == "mkdv") {
        if (dim != 1) throw std::invalid_argument("mkdv is one-dimensional");
        eq.dispersion = make_dispersion(DispersionKind::kdv, 1);
        eq.nonlin = real_nonlin(3);
        eq.s_floor = 0.25;
    } else if (id == "mzk") {
        if (dim < 2 || dim > 3) throw std::invalid_argument("mzk supports dim 2 or 3");
        eq.dispersion = make_dispersion(DispersionKind::zk, dim);
        eq.nonlin = real_nonlin(3);
        eq.s_floor = (dim == 2) ? 0.25 : dim / 2.0 - 1.0;
    } else if (id == "mzk-sym2d") {
        if (dim != 2) throw std::invalid_argument("mzk-sym2d is two-dimensional");
        eq.dispersion = make_dispersion(DispersionKind::zk_sym2d, 2);
        eq.nonlin = real_nonlin(3);
        eq.front_factor = kZkSymMu;
        eq.s_floor = 0.25;
    } else if (id == "nls-cubic") {
        if (dim < 1 || dim > 3) throw std::invalid_argument("nls-cubic supports dim 1..3");
        eq.dispersion = make_dispersion(DispersionKind::schrodinger, dim);
        eq.nonlin = nls_nonlin(3);
        eq.linear_sign = -1.0;
        eq.real_field = false;
        eq.nls_halfpower = 1;
        eq.s_floor = dim / 2.0 - 1.0;
    } else if (id == "nls-quintic") {
        if (dim < 1 || dim > 3) throw std::invalid_argument("nls-quintic supports dim 1..3");
        eq.dispersion = make_dispersion(DispersionKind::schrodinger, dim);
        eq.nonlin = nls_nonlin(5);
        eq.linear_sign = -1.0;
        eq.real_field = false;
        eq.nls_halfpower = 2;
        eq.s_floor = (dim - 1) / 2.0;
    } else {
        throw std::invalid_argument("unknown equation id: " + id);
    }
    return eq;
}

} // namespace freqlab
