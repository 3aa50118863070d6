#include "freqlab/sublevel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "freqlab/rng.hpp"

namespace freqlab {

double WeightExpr::eval(const NonlinearitySpec* nl, const Vec* slots) const {
    double w = 1.0;
    for (const auto& f : factors) {
        const Vec& x = slots[f.index];
        if (f.jap_pow != 0.0) w *= std::pow(jap(x), f.jap_pow);
        if (f.abs_pow != 0.0) w *= std::pow(x.norm(), f.abs_pow);
    }
    if (mode != EstimateWeightMode::none && nl) {
        double m = multiplier_size(*nl, slots[0]) * std::pow(jap(slots[0]), nl->s_prime());
        for (int j = 1; j <= nl->k; ++j) m /= std::pow(jap(slots[j]), nl->s);
        w *= (mode == EstimateWeightMode::m1) ? m : m * m;
    }
    return w;
}

bool RegionExpr::contains(const Vec* slots) const {
    for (const auto& cl : clauses) {
        const Vec& a = slots[cl.i];
        const Vec& b = slots[cl.j];
        switch (cl.kind) {
            case RegionClause::Kind::comparable_abs: {
                const double na = a.norm(), nb = b.norm();
                if (std::fabs(na - nb) > cl.c * std::max(na, nb)) return false;
                break;
            }
            case RegionClause::Kind::ratio_le:
                if (a.norm() > cl.c * b.norm()) return false;
                break;
            case RegionClause::Kind::ratio_ge:
                if (a.norm() < cl.c * b.norm()) return false;
                break;
            case RegionClause::Kind::sepprod_ge:
            case RegionClause::Kind::sepprod_le: {
                double p = 1.0;
                for (int ax = 0; ax < slots[0].d; ++ax) p *= std::fabs(slots[0][ax] - b[ax]);
                const double rhs = cl.c * slots[0].norm();
                if (cl.kind == RegionClause::Kind::sepprod_ge ? (p < rhs) : (p > rhs)) return false;
                break;
            }
            case RegionClause::Kind::abs_ge:
                if (a.norm() < cl.c) return false;
                break;
            case RegionClause::Kind::abs_le:
                if (a.norm() > cl.c) return false;
                break;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------

namespace {

struct Compiled {
    const SublevelSpec* spec = nullptr;
    // equation family
    int k = 0, d = 1;
    int dependent = 0; // 0 => output derived
    std::vector<int> int_slots;
    std::vector<int> fix_slots;
    Vec slots_template[8];

    int dims = 0;

    explicit Compiled(const SublevelSpec& s) : spec(&s) {
        if (s.family == PhaseFamily::equation) {
            const Equation& eq = *s.eq;
            k = eq.nonlin.k;
            d = eq.dim;
            std::vector<bool> fixed(static_cast<size_t>(k + 1), false);
            for (int idx : s.fixed_set) fixed[static_cast<size_t>(idx)] = true;
            dependent = s.dependent;
            if (dependent < 0) {
                dependent = 0;
                if (fixed[0]) {
                    for (int j = k; j >= 1; --j)
                        if (!fixed[static_cast<size_t>(j)]) { dependent = j; break; }
                }
            }
            for (int i = 0; i <= k; ++i)
                if (!fixed[static_cast<size_t>(i)] && i != dependent) int_slots.push_back(i);
            // fix_slots order matches spec.fixed_set order (witness layout)
            fix_slots = s.fixed_set;
            for (int i = 0; i <= k; ++i) slots_template[i] = Vec(d);
            dims = static_cast<int>(int_slots.size()) * d;
        } else {
            dims = (spec->family == PhaseFamily::quad1d) ? 1 : 2;
        }
    }

    void set_fixed(const std::vector<double>& coords, Vec* slots) const {
        for (int i = 0; i <= k; ++i) slots[i] = slots_template[i];
        size_t c = 0;
        for (int idx : fix_slots) {
            Vec v(d);
            for (int a = 0; a < d; ++a) v[a] = coords[c++];
            slots[idx] = v;
        }
    }

    // weight * 1_region * 1_{|Phi - alpha| < M}; slots is scratch of size k+1
    double eval(const double* x, double alpha, double M, Vec* slots) const {
        double phi = 0.0;
        switch (spec->family) {
            case PhaseFamily::quad1d:
                phi = x[0] * x[0];
                break;
            case PhaseFamily::quad2d_plus:
                phi = x[0] * x[0] + x[1] * x[1];
                break;
            case PhaseFamily::quad2d_minus:
                phi = x[0] * x[0] - x[1] * x[1];
                break;
            case PhaseFamily::equation: {
                const Equation& eq = *spec->eq;
                const NonlinearitySpec& nl = eq.nonlin;
                int c = 0;
                for (int idx : int_slots) {
                    Vec v(d);
                    for (int a = 0; a < d; ++a) v[a] = x[c++];
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
                if (!spec->region.contains(slots)) return 0.0;
                phi = eq.dispersion.symbol(slots[0]);
                for (int j = 1; j <= k; ++j) phi -= nl.sign(j) * eq.dispersion.symbol(slots[j]);
                if (std::fabs(phi - alpha) >= M) return 0.0;
                return spec->weight.eval(&nl, slots);
            }
        }
        return (std::fabs(phi - alpha) < M) ? 1.0 : 0.0;
    }
};

// Stratified sampler: the first axis is sampled systematically (one jittered
// point per stratum, visited in an interleaved order so index stripes remain
// exchangeable), the other axes are independent uniform draws. All randomness
// is derived from the stream seed, nothing is shared between workers.
struct StratifiedSampler {
    int dims;
    int samples;
    uint64_t seed;

    StratifiedSampler(int m, int n, uint64_t s) : dims(m), samples(n), seed(s) {}

    // fills x in [-N, N]^dims for sample i
    void point(int i, double N, double* x) const {
        const uint64_t idx = static_cast<uint64_t>(i);
        for (int c = 0; c < dims; ++c) {
            const double u01 =
                static_cast<double>(hash_mix(seed, 0x71u, static_cast<uint64_t>(c), idx) >> 11) *
                0x1.0p-53;
            double u = u01;
            if (c == 0) {
                // one jittered point per stratum; the i%16 batch stripes form
                // interleaved combs, so batch means stay exchangeable
                u = (static_cast<double>(idx) + u01) / static_cast<double>(samples);
            }
            x[c] = -N + 2.0 * N * u;
        }
    }
};

IntegralResult integrate_impl(const Compiled& comp, const std::vector<double>& fixed_coords,
                              double alpha, double M, uint64_t seed, int samples) {
    const SublevelSpec& spec = *comp.spec;
    const int m = comp.dims;
    const double N = spec.box;
    Vec slots[8];
    if (spec.family == PhaseFamily::equation) comp.set_fixed(fixed_coords, slots);

    IntegralResult res;
    if (spec.estimator == Estimator::grid) {
        if (m > 3) throw std::invalid_argument("grid estimator supports at most 3 dimensions");
        auto grid_value = [&](int n_g) {
            const double h = 2.0 * N / n_g;
            double sum = 0.0;
            double x[3];
            const long total = static_cast<long>(std::pow(static_cast<double>(n_g), m));
            for (long t = 0; t < total; ++t) {
                long r = t;
                for (int c = 0; c < m; ++c) {
                    x[c] = -N + (static_cast<double>(r % n_g) + 0.5) * h;
                    r /= n_g;
                }
                sum += comp.eval(x, alpha, M, slots);
            }
            return sum * std::pow(h, m);
        };
        const double v = grid_value(spec.grid_points);
        const double v2 = grid_value(spec.grid_points / 2 + 1);
        res.value = v;
        res.stderr_est = std::fabs(v - v2);
        res.low_confidence = res.value > 0 && res.stderr_est > 0.2 * res.value;
        return res;
    }

    const int B = 16;
    double bsum[16] = {0};
    StratifiedSampler sampler(m, samples, hash_mix(seed, 0x5a11u));
    double x[6];
    for (int i = 0; i < samples; ++i) {
        sampler.point(i, N, x);
        bsum[i % B] += comp.eval(x, alpha, M, slots);
    }
    const double vol = std::pow(2.0 * N, m);
    double mean = 0.0;
    for (double b : bsum) mean += b;
    mean /= samples;
    double var = 0.0;
    for (int b = 0; b < B; ++b) {
        const int nb = samples / B + (b < samples % B ? 1 : 0);
        const double mb = bsum[b] / nb;
        var += (mb - mean) * (mb - mean);
    }
    var /= B * (B - 1);
    res.value = vol * mean;
    res.stderr_est = vol * std::sqrt(var);
    res.low_confidence = res.value > 0 && res.stderr_est > 0.2 * res.value;
    return res;
}

} // namespace

void validate_spec(const SublevelSpec& spec) {
    if (spec.family == PhaseFamily::equation) {
        if (!spec.eq) throw std::invalid_argument("equation family needs an equation");
        const int k = spec.eq->nonlin.k;
        if (spec.fixed_set.empty()) throw std::invalid_argument("fixed set must be nonempty");
        if (static_cast<int>(spec.fixed_set.size()) >= k + 1)
            throw std::invalid_argument("fixed set must be a proper subset");
        for (int idx : spec.fixed_set)
            if (idx < 0 || idx > k) throw std::invalid_argument("fixed index out of range");
        if (spec.dependent > k) throw std::invalid_argument("dependent index out of range");
        if (spec.dependent >= 0) {
            for (int idx : spec.fixed_set)
                if (idx == spec.dependent)
                    throw std::invalid_argument("dependent index cannot be fixed");
        }
    }
    if (spec.box <= 0) throw std::invalid_argument("box must be positive");
    if (spec.samples < 100) throw std::invalid_argument("sample budget too small");
}

int integration_dims(const SublevelSpec& spec) { return Compiled(spec).dims; }

int scan_dims(const SublevelSpec& spec) {
    if (spec.family != PhaseFamily::equation) return 1;
    return 1 + static_cast<int>(spec.fixed_set.size()) * spec.eq->dim;
}

double alpha_range(const SublevelSpec& spec) {
    const int degree = (spec.family == PhaseFamily::equation) ? spec.eq->dispersion.degree : 2;
    return spec.alpha_scale * std::pow(spec.box, degree);
}

IntegralResult sublevel_integral(const SublevelSpec& spec, double alpha,
                                 const std::vector<double>& fixed_coords, double M, uint64_t seed) {
    validate_spec(spec);
    if (M <= 0) throw std::invalid_argument("M must be positive");
    Compiled comp(spec);
    const size_t need = (spec.family == PhaseFamily::equation)
                            ? comp.fix_slots.size() * static_cast<size_t>(comp.d)
                            : 0;
    if (fixed_coords.size() != need)
        throw std::invalid_argument("fixed coordinate vector has the wrong length");
    return integrate_impl(comp, fixed_coords, alpha, M, seed, spec.samples);
}

ScanResult sup_scan(const SublevelSpec& spec, double M, uint64_t seed,
                    const std::vector<std::vector<double>>& hints) {
    validate_spec(spec);
    Compiled comp(spec);
    const int nw = scan_dims(spec);
    const double arange = alpha_range(spec);
    const double N = spec.box;
    const int scan_samples = std::max(20000, spec.samples / 5);

    const uint64_t eval_seed = hash_mix(seed, 0xea1u);
    auto objective = [&](const std::vector<double>& w, int samples) {
        std::vector<double> coords(w.begin() + 1, w.end());
        return integrate_impl(comp, coords, w[0], M, eval_seed, samples);
    };

    std::vector<std::vector<double>> starts = hints;
    for (auto& h : starts) h.resize(static_cast<size_t>(nw), 0.0);
    Rng init = make_stream(seed, 0x57a7u);
    for (int r = 0; r < spec.restarts; ++r) {
        std::vector<double> w(static_cast<size_t>(nw));
        w[0] = init.uniform(-arange, arange);
        for (int c = 1; c < nw; ++c) w[static_cast<size_t>(c)] = init.uniform(-N, N);
        starts.push_back(std::move(w));
    }

    ScanResult best;
    best.restarts = static_cast<int>(starts.size());
    double worst_opt = std::numeric_limits<double>::infinity();
    double best_opt = -std::numeric_limits<double>::infinity();

    const double offsets[9] = {-1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0};
    for (const auto& start : starts) {
        std::vector<double> w = start;
        double cur = objective(w, scan_samples).value;
        double span_alpha = arange / 4.0, span_x = N / 2.0;
        for (int round = 0; round < spec.ascent_rounds; ++round) {
            for (int c = 0; c < nw; ++c) {
                const double span = (c == 0) ? span_alpha : span_x;
                const double w0 = w[static_cast<size_t>(c)];
                double best_v = cur, best_x = w0;
                for (double o : offsets) {
                    if (o == 0.0) continue;
                    w[static_cast<size_t>(c)] = w0 + o * span;
                    const double v = objective(w, scan_samples).value;
                    if (v > best_v) {
                        best_v = v;
                        best_x = w[static_cast<size_t>(c)];
                    }
                }
                w[static_cast<size_t>(c)] = best_x;
                cur = best_v;
            }
            span_alpha *= 0.4;
            span_x *= 0.4;
        }
        worst_opt = std::min(worst_opt, cur);
        if (cur > best_opt) {
            best_opt = cur;
            best.witness = w;
        }
    }

    const IntegralResult fin = objective(best.witness, spec.samples);
    best.value = fin.value;
    best.stderr_est = fin.stderr_est;
    best.low_confidence = fin.low_confidence;
    best.spread = best_opt - worst_opt;
    best.witness_at_edge = std::fabs(best.witness[0]) > 0.95 * arange;
    for (int c = 1; c < nw; ++c)
        if (std::fabs(best.witness[static_cast<size_t>(c)]) > 0.95 * N) best.witness_at_edge = true;
    return best;
}

std::vector<double> dyadic_levels(int lo_exp, int hi_exp) {
    std::vector<double> out;
    for (int e = lo_exp; e <= hi_exp; ++e) out.push_back(std::ldexp(1.0, e));
    return out;
}

BetaFit fit_beta(const SublevelSpec& spec, const std::vector<double>& M_levels, uint64_t seed,
                 const std::vector<std::vector<double>>& hints) {
    if (M_levels.size() < 6) throw std::invalid_argument("need at least 6 dyadic levels");
    for (double M : M_levels)
        if (M <= 1.0) throw std::invalid_argument("all dyadic levels must exceed 1");
    if (!std::is_sorted(M_levels.begin(), M_levels.end()))
        throw std::invalid_argument("levels must be increasing");

    BetaFit fit;
    std::vector<std::vector<double>> carry = hints;
    for (double M : M_levels) {
        ScanResult sc = sup_scan(spec, M, seed, carry);
        BetaLevel lvl;
        lvl.M = M;
        lvl.value = sc.value;
        lvl.stderr_est = sc.stderr_est;
        lvl.witness = sc.witness;
        lvl.low_confidence = sc.low_confidence;
        lvl.witness_at_edge = sc.witness_at_edge;
        fit.levels.push_back(lvl);
        fit.low_confidence = fit.low_confidence || sc.low_confidence;
        carry.clear();
        carry.push_back(sc.witness);
    }

    for (size_t i = 1; i < fit.levels.size(); ++i)
        if (!(fit.levels[i].value > fit.levels[i - 1].value)) fit.monotone = false;

    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    int n = 0;
    for (const auto& lvl : fit.levels) {
        if (lvl.value <= 0) {
            fit.low_confidence = true;
            continue;
        }
        const double x = std::log2(lvl.M), y = std::log2(lvl.value);
        sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
        ++n;
    }
    if (n < 4) throw NumericalError("too few nonzero levels for a slope fit");
    const double denom = n * sxx - sx * sx;
    fit.beta = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.beta * sx) / n;
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0;
    for (const auto& lvl : fit.levels) {
        if (lvl.value <= 0) continue;
        const double y = std::log2(lvl.value);
        const double yh = fit.intercept + fit.beta * std::log2(lvl.M);
        ss_res += (y - yh) * (y - yh);
    }
    fit.r2 = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 1.0;
    if (fit.r2 < 0.9) fit.low_confidence = true;
    return fit;
}

// ---------------------------------------------------------------------------

double quadratic_sublevel_1d(double alpha, double M, double box) {
    const double cap = box * box;
    double hi = std::min(alpha + M, cap);
    double lo = std::max(alpha - M, 0.0);
    if (hi <= 0 || hi <= lo) return 0.0;
    return 2.0 * (std::sqrt(hi) - std::sqrt(lo));
}

double quadratic_sublevel_2d(int sign, double alpha, double M, double N) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +-1");
    // slice through q: measure in p of { lo(q) < p^2 < hi(q), |p| < N }
    auto slice = [&](double q) {
        const double t = (sign == 1) ? alpha - q * q : alpha + q * q;
        const double cap = N * N;
        const double hi = std::min(t + M, cap);
        const double lo = std::max(t - M, 0.0);
        if (hi <= 0 || hi <= lo) return 0.0;
        return 2.0 * (std::sqrt(hi) - std::sqrt(lo));
    };
    // breakpoints: q^2 where t +- M crosses 0 or N^2
    std::vector<double> cuts{0.0, N};
    auto add_cut = [&](double q2) {
        if (q2 > 0 && q2 < N * N) cuts.push_back(std::sqrt(q2));
    };
    if (sign == 1) {
        add_cut(alpha - M);
        add_cut(alpha + M);
        add_cut(alpha - M - N * N);
        add_cut(alpha + M - N * N);
    } else {
        add_cut(M - alpha);
        add_cut(-M - alpha);
        add_cut(N * N + M - alpha);
        add_cut(N * N - M - alpha);
    }
    std::sort(cuts.begin(), cuts.end());
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    double total = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (b - a < 1e-14) continue;
        total += GK::integrate(slice, a, b, 12, 1e-12);
    }
    return 2.0 * total; // even in q
}

TauBound tau_convolution_bound(double a1, double a2, double b) {
    if (b <= 0.5) throw std::invalid_argument("temporal weight needs b > 1/2");
    auto f = [&](double tau) {
        const double u = tau - a1, v = tau - a2;
        return std::pow(1.0 + u * u, -b) * std::pow(1.0 + v * v, -b);
    };
    // Split at the two bumps; the interior piece is handled by adaptive
    // Gauss-Kronrod, the algebraic tails by tanh-sinh after mapping
    // [c, inf) -> (0, 1] with tau = c + 1/s - 1 (endpoint cusp at s = 0).
    const double lo = std::min(a1, a2), hi = std::max(a1, a2);
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    double err_mid = 0.0, total = 0.0;
    if (hi > lo) total += GK::integrate(f, lo, hi, 15, 1e-12, &err_mid);
    boost::math::quadrature::tanh_sinh<double> ts;
    double lv1 = 0, lv2 = 0;
    auto upper_tail = [&](double s) {
        if (s < 1e-100) return 0.0;
        const double tau = hi + 1.0 / s - 1.0;
        return f(tau) / (s * s);
    };
    auto lower_tail = [&](double s) {
        if (s < 1e-100) return 0.0;
        const double tau = lo - (1.0 / s - 1.0);
        return f(tau) / (s * s);
    };
    total += ts.integrate(upper_tail, 0.0, 1.0, 1e-12, &lv1);
    total += ts.integrate(lower_tail, 0.0, 1.0, 1e-12, &lv2);

    TauBound out;
    out.integral = total;
    if (!(out.integral > 0) || err_mid > 1e-6 * out.integral || lv1 > 1e-5 || lv2 > 1e-5)
        throw NumericalError("temporal convolution quadrature did not converge");
    const double sep = a1 - a2;
    out.bound_ratio = out.integral * std::pow(1.0 + sep * sep, b);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Lattice {
    int d, G, side; // modes -G..G per axis
    explicit Lattice(int dd, int g) : d(dd), G(g), side(2 * g + 1) {}
    int count() const { return d == 1 ? side : side * side; }
    Vec mode(int idx) const {
        if (d == 1) return Vec::of(static_cast<double>(idx - G));
        return Vec::of(static_cast<double>(idx / side - G), static_cast<double>(idx % side - G));
    }
    // returns -1 when out of the box
    int index(const Vec& m) const {
        if (d == 1) {
            const int a = static_cast<int>(std::lround(m[0]));
            return (std::abs(a) <= G) ? a + G : -1;
        }
        const int a = static_cast<int>(std::lround(m[0]));
        const int b = static_cast<int>(std::lround(m[1]));
        return (std::abs(a) <= G && std::abs(b) <= G) ? (a + G) * side + (b + G) : -1;
    }
};

} // namespace

double multilinear_weight(const Equation& eq, double s, double eps, const FrequencyTuple& t,
                          double b) {
    const double bp = b - 1.0 + 0.01;
    NonlinearitySpec nl = eq.nonlin;
    nl.s = s;
    nl.epsilon = eps;
    double w = multiplier_size(nl, t.xi) * std::pow(jap(t.xi), s + eps);
    for (int j = 1; j <= nl.k; ++j) w /= std::pow(jap(t.inputs[static_cast<size_t>(j - 1)]), s);
    const double phi = total_phase(eq.dispersion, nl, t);
    w *= std::pow(1.0 + phi * phi, bp);
    return w;
}

MultilinearCheck discrete_multilinear_check(const Equation& eq, double s, double eps, int grid_size,
                                            int trials, uint64_t seed, double b) {
    const int d = eq.dim;
    if (d > 2) throw std::invalid_argument("multilinear check supports dim 1 or 2");
    const int G = grid_size / 2;
    const Lattice lat(d, G);
    const int k = eq.nonlin.k;
    const double tuples = std::pow(static_cast<double>(lat.count()), k);
    if (tuples > 6.0e8)
        throw std::invalid_argument("lattice too large for the brute-force convolution");
    const double bp = b - 1.0 + 0.01;

    // per-mode static tables
    const int n = lat.count();
    std::vector<double> phi_tab(static_cast<size_t>(n));
    std::vector<double> japs_tab(static_cast<size_t>(n)); // <m>^{-s}
    std::vector<double> out_tab(static_cast<size_t>(n));  // |m(Xi)| <m>^{s+eps}
    for (int i = 0; i < n; ++i) {
        const Vec m = lat.mode(i);
        phi_tab[static_cast<size_t>(i)] = eq.dispersion.symbol(m);
        japs_tab[static_cast<size_t>(i)] = std::pow(jap(m), -s);
        NonlinearitySpec nl = eq.nonlin;
        out_tab[static_cast<size_t>(i)] = multiplier_size(nl, m) * std::pow(jap(m), s + eps);
    }

    MultilinearCheck out;
    for (int trial = 0; trial < trials; ++trial) {
        // random complex gaussian test sequences; only moduli enter the bound
        std::vector<double> vin(static_cast<size_t>(n) * static_cast<size_t>(k));
        std::vector<double> vout(static_cast<size_t>(n));
        double rhs = 1.0;
        for (int j = 0; j < k; ++j) {
            double nrm = 0.0;
            for (int i = 0; i < n; ++i) {
                Rng r = make_stream(seed, 0xd17au, static_cast<uint64_t>(trial),
                                    static_cast<uint64_t>(j + 1), static_cast<uint64_t>(i));
                const double re = r.normal(), im = r.normal();
                const double a = std::sqrt(re * re + im * im);
                vin[static_cast<size_t>(j * n + i)] = a;
                nrm += a * a;
            }
            rhs *= std::sqrt(nrm);
        }
        {
            double nrm = 0.0;
            for (int i = 0; i < n; ++i) {
                Rng r = make_stream(seed, 0xd17au, static_cast<uint64_t>(trial), 0u,
                                    static_cast<uint64_t>(i));
                const double re = r.normal(), im = r.normal();
                const double a = std::sqrt(re * re + im * im);
                vout[static_cast<size_t>(i)] = a;
                nrm += a * a;
            }
            rhs *= std::sqrt(nrm);
        }

        // Recursive sweep over all k input modes; carries the signed mode sum,
        // the signed symbol sum and the partial weight product. Tuples with a
        // zero mode, a canceling input pair, or an exactly resonant phase are
        // skipped: those lattice-exact sets have measure zero on the full
        // space and would otherwise dominate the discrete sum.
        double lhs = 0.0;
        std::array<int, 8> chosen{};
        auto sweep = [&](auto&& self, int level, const Vec& sum, double phisum,
                         double wprod) -> void {
            if (level == k) {
                const int oi = lat.index(sum);
                if (oi < 0) return;
                const double phi = phi_tab[static_cast<size_t>(oi)] - phisum;
                if (std::fabs(phi) < 0.5) return; // exact lattice resonance
                lhs += out_tab[static_cast<size_t>(oi)] * vout[static_cast<size_t>(oi)] *
                       std::pow(1.0 + phi * phi, bp) * wprod;
                return;
            }
            const int sgn = eq.nonlin.sign(level + 1);
            for (int i = 0; i < n; ++i) {
                const Vec m = lat.mode(i);
                if (m.norm_sq() == 0.0) continue;
                bool cancels = false;
                for (int prev = 0; prev < level; ++prev) {
                    const Vec pm = lat.mode(chosen[static_cast<size_t>(prev)]);
                    Vec pair = pm;
                    if (eq.nonlin.sign(prev + 1) == sgn) pair += m; else pair -= m;
                    if (pair.norm_sq() == 0.0) cancels = true;
                }
                if (cancels) continue;
                chosen[static_cast<size_t>(level)] = i;
                Vec ns = sum;
                if (sgn > 0) ns += m; else ns -= m;
                self(self, level + 1, ns, phisum + sgn * phi_tab[static_cast<size_t>(i)],
                     wprod * japs_tab[static_cast<size_t>(i)] *
                         vin[static_cast<size_t>(level * n + i)]);
            }
        };
        sweep(sweep, 0, Vec(d), 0.0, 1.0);

        out.ratios.push_back(rhs > 0 ? lhs / rhs : 0.0);
        out.max_ratio = std::max(out.max_ratio, out.ratios.back());
    }
    return out;
}

// ---------------------------------------------------------------------------

SublevelSpec spec_quad1d(double box) {
    SublevelSpec s;
    s.family = PhaseFamily::quad1d;
    s.box = box;
    return s;
}

SublevelSpec spec_quad2d(int sign, double N) {
    SublevelSpec s;
    s.family = (sign >= 0) ? PhaseFamily::quad2d_plus : PhaseFamily::quad2d_minus;
    s.box = N;
    return s;
}

SublevelSpec spec_mkdv_region(double s, double N, double comparability) {
    SublevelSpec sp;
    sp.family = PhaseFamily::equation;
    sp.eq = make_equation("mkdv", 1);
    sp.eq->nonlin.s = s;
    sp.fixed_set = {0};
    sp.dependent = 3;
    sp.weight.factors.push_back({0, 2.0 * (1.0 - 2.0 * s), 0.0});
    for (int j = 1; j <= 3; ++j)
        sp.region.clauses.push_back({RegionClause::Kind::comparable_abs, 0, j, comparability});
    sp.box = N;
    return sp;
}

SublevelSpec spec_symzk_comparable(double s, double eps, double N) {
    SublevelSpec sp;
    sp.family = PhaseFamily::equation;
    sp.eq = make_equation("mzk-sym2d", 2);
    sp.eq->nonlin.s = s;
    sp.eq->nonlin.epsilon = eps;
    sp.fixed_set = {0, 2};
    sp.dependent = 3;
    sp.weight.factors.push_back({0, s + eps + 1.0, 0.0});
    sp.weight.factors.push_back({1, -s, 0.0});
    sp.weight.factors.push_back({3, -2.0 * s, 0.0});
    for (int j = 1; j <= 3; ++j)
        sp.region.clauses.push_back({RegionClause::Kind::comparable_abs, 0, j, 0.25});
    sp.region.clauses.push_back({RegionClause::Kind::abs_ge, 0, 0, 1.0});
    sp.box = N;
    return sp;
}

SublevelSpec spec_symzk_separated(double s, double eps, double N) {
    SublevelSpec sp = spec_symzk_comparable(s, eps, N);
    sp.region.clauses.clear();
    sp.region.clauses.push_back({RegionClause::Kind::ratio_le, 3, 1, 0.1});
    sp.region.clauses.push_back({RegionClause::Kind::abs_ge, 0, 0, 1.0});
    return sp;
}

SublevelSpec spec_nls2d_pairing(double s, double eps, double N) {
    SublevelSpec sp;
    sp.family = PhaseFamily::equation;
    sp.eq = make_equation("nls-cubic", 2);
    sp.eq->nonlin.s = s;
    sp.eq->nonlin.epsilon = eps;
    sp.fixed_set = {0, 2};
    sp.dependent = 3;
    sp.weight.factors.push_back({0, s + eps, 0.0});
    sp.weight.factors.push_back({1, -s, 0.0});
    sp.weight.factors.push_back({3, -2.0 * s, 0.0});
    // stationary pairing: xi_1 close to xi_3, all frequencies large
    sp.region.clauses.push_back({RegionClause::Kind::abs_ge, 0, 0, 1.0});
    sp.box = N;
    return sp;
}

SublevelSpec spec_kdv4_comparable(double s, double eps, double N) {
    SublevelSpec sp;
    sp.family = PhaseFamily::equation;
    sp.eq = make_equation("kdv4", 1);
    sp.eq->nonlin.s = s;
    sp.eq->nonlin.epsilon = eps;
    sp.fixed_set = {0, 4};
    sp.dependent = 3;
    sp.weight.factors.push_back({0, s + eps + 0.5, 0.0});
    for (int j = 1; j <= 4; ++j) sp.weight.factors.push_back({j, -s, 0.0});
    for (int j = 1; j <= 3; ++j)
        sp.region.clauses.push_back({RegionClause::Kind::comparable_abs, 0, j, 0.25});
    sp.region.clauses.push_back({RegionClause::Kind::ratio_le, 4, 0, 0.1});
    sp.region.clauses.push_back({RegionClause::Kind::abs_ge, 0, 0, 1.0});
    sp.box = N;
    return sp;
}

} // namespace freqlab
