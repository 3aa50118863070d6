#include "freqlab/spectral.hpp"

#include <cstdio>
#include <cstring>
#include <map>
#include <mutex>

#include <fftw3.h>

#include "freqlab/sublevel.hpp"

namespace freqlab {

bool operator==(const Grid& a, const Grid& b) {
    return a.dim == b.dim && a.n == b.n && a.L == b.L;
}

void decode_modes(const Grid& g, long idx, int* m) {
    for (int ax = g.dim - 1; ax >= 0; --ax) {
        m[ax] = g.mode_of(static_cast<int>(idx % g.n));
        idx /= g.n;
    }
}

long encode_modes(const Grid& g, const int* m) {
    long idx = 0;
    for (int ax = 0; ax < g.dim; ++ax) idx = idx * g.n + g.index_of(m[ax]);
    return idx;
}

Vec frequency_of(const Grid& g, const int* m) {
    Vec x(g.dim);
    for (int ax = 0; ax < g.dim; ++ax) x[ax] = m[ax] / g.L;
    return x;
}

int dealias_band(int n, int k) {
    const double lim = static_cast<double>(n) / (k + 1);
    int band = static_cast<int>(std::ceil(lim)) - 1;
    return std::max(band, 1);
}

void apply_band_mask(SpectralState& s, int band) {
    const Grid& g = s.grid;
    int m[3] = {0, 0, 0};
    for (long i = 0; i < g.total(); ++i) {
        decode_modes(g, i, m);
        for (int ax = 0; ax < g.dim; ++ax) {
            if (std::abs(m[ax]) > band) {
                s.coeffs[static_cast<size_t>(i)] = 0;
                break;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// FFTW plan cache. Plans are created unaligned so they can execute on any
// caller-provided buffers; creation is serialized, execution is thread-safe.

namespace {

struct PlanCache {
    std::mutex mu;
    std::map<std::tuple<int, int, int>, fftw_plan> plans;

    fftw_plan get(const Grid& g, int sign) {
        std::lock_guard<std::mutex> lock(mu);
        auto key = std::make_tuple(g.dim, g.n, sign);
        auto it = plans.find(key);
        if (it != plans.end()) return it->second;
        std::vector<cplx> a(static_cast<size_t>(g.total())), b(a.size());
        auto* in = reinterpret_cast<fftw_complex*>(a.data());
        auto* out = reinterpret_cast<fftw_complex*>(b.data());
        fftw_plan p = nullptr;
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        switch (g.dim) {
            case 1: p = fftw_plan_dft_1d(g.n, in, out, sign, flags); break;
            case 2: p = fftw_plan_dft_2d(g.n, g.n, in, out, sign, flags); break;
            case 3: p = fftw_plan_dft_3d(g.n, g.n, g.n, in, out, sign, flags); break;
            default: throw std::invalid_argument("grid dim must be 1..3");
        }
        plans[key] = p;
        return p;
    }
};

PlanCache& plan_cache() {
    static PlanCache c;
    return c;
}

void fft_exec(const Grid& g, int sign, const std::vector<cplx>& in, std::vector<cplx>& out) {
    out.resize(in.size());
    fftw_plan p = plan_cache().get(g, sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

} // namespace

std::vector<cplx> to_physical(const SpectralState& s) {
    std::vector<cplx> phys;
    fft_exec(s.grid, FFTW_BACKWARD, s.coeffs, phys);
    return phys;
}

SpectralState from_physical(const Grid& g, const std::vector<cplx>& phys, double time) {
    SpectralState s;
    s.grid = g;
    s.time = time;
    fft_exec(g, FFTW_FORWARD, phys, s.coeffs);
    const double inv = 1.0 / static_cast<double>(g.total());
    for (auto& c : s.coeffs) c *= inv;
    return s;
}

// ---------------------------------------------------------------------------

SpectralState linear_propagate(const Equation& eq, const SpectralState& s, double dt) {
    SpectralState out = s;
    const Grid& g = s.grid;
    int m[3] = {0, 0, 0};
    for (long i = 0; i < g.total(); ++i) {
        decode_modes(g, i, m);
        const double L = eq.linear_symbol(frequency_of(g, m));
        out.coeffs[static_cast<size_t>(i)] *= std::polar(1.0, dt * L);
    }
    out.time = s.time + dt;
    return out;
}

namespace {

// masked copy plus the pair-sum used by the coherent-resonance removal
double band_l2_sq(const SpectralState& s, int band, SpectralState& masked) {
    masked = s;
    apply_band_mask(masked, band);
    double m2 = 0;
    for (const auto& c : masked.coeffs) m2 += std::norm(c);
    return m2;
}

} // namespace

SpectralState nonlinear_term(const Equation& eq, const SpectralState& s, bool renormalized) {
    const Grid& g = s.grid;
    const int k = eq.nonlin.k;
    const int band = dealias_band(g.n, k);

    SpectralState masked;
    const double m2 = band_l2_sq(s, band, masked);

    std::vector<cplx> w;
    fft_exec(g, FFTW_BACKWARD, masked.coeffs, w);

    std::vector<cplx> p(w.size());
    if (eq.nls_halfpower == 0) {
        // u^k, renormalized to u^k - k <u^{k-1}> u: the subtraction removes the
        // mean-field layer (one factor carrying the output mode, the others
        // summing to zero), which is measure-zero on the line but order-one on
        // the lattice. For k = 3 the mean <u^2> is the conserved pair sum.
        for (size_t i = 0; i < w.size(); ++i) {
            cplx acc = w[i];
            for (int j = 1; j < k; ++j) acc *= w[i];
            p[i] = acc;
        }
        if (renormalized) {
            cplx mean_pow(0, 0);
            for (size_t i = 0; i < w.size(); ++i) {
                cplx acc = w[i];
                for (int j = 2; j < k; ++j) acc *= w[i];
                mean_pow += acc;
            }
            mean_pow /= static_cast<double>(w.size());
            for (size_t i = 0; i < w.size(); ++i) p[i] -= static_cast<double>(k) * mean_pow * w[i];
        }
    } else if (eq.nls_halfpower == 1) {
        for (size_t i = 0; i < w.size(); ++i) {
            const cplx u = w[i];
            const double a2 = std::norm(u);
            p[i] = a2 * u;
            if (renormalized) p[i] -= 2.0 * m2 * u;
        }
    } else {
        for (size_t i = 0; i < w.size(); ++i) {
            const cplx u = w[i];
            const double a2 = std::norm(u);
            p[i] = a2 * a2 * u;
            if (renormalized) p[i] += (-6.0 * m2 * a2 + 6.0 * m2 * m2) * u;
        }
    }

    SpectralState out = from_physical(g, p, s.time);
    int m[3] = {0, 0, 0};
    for (long i = 0; i < g.total(); ++i) {
        decode_modes(g, i, m);
        out.coeffs[static_cast<size_t>(i)] *= eq.nonlinear_multiplier(frequency_of(g, m));
    }
    apply_band_mask(out, band);
    return out;
}

SpectralState nonlinear_term_bruteforce(const Equation& eq, const SpectralState& s) {
    const Grid& g = s.grid;
    const int k = eq.nonlin.k;
    const int band = dealias_band(g.n, k);
    SpectralState masked;
    band_l2_sq(s, band, masked);

    SpectralState out = SpectralState::zero(g);
    out.time = s.time;

    // all band modes
    std::vector<std::array<int, 3>> modes;
    {
        std::array<int, 3> m{0, 0, 0};
        std::function<void(int)> rec = [&](int ax) {
            if (ax == g.dim) {
                modes.push_back(m);
                return;
            }
            for (int v = -band; v <= band; ++v) {
                m[static_cast<size_t>(ax)] = v;
                rec(ax + 1);
            }
        };
        rec(0);
    }

    std::vector<size_t> pick(static_cast<size_t>(k), 0);
    const size_t nb = modes.size();
    while (true) {
        // accumulate this tuple
        int sum[3] = {0, 0, 0};
        cplx prod(1, 0);
        for (int j = 0; j < k; ++j) {
            const auto& mm = modes[pick[static_cast<size_t>(j)]];
            const int sgn = eq.nonlin.sign(j + 1);
            for (int ax = 0; ax < g.dim; ++ax) sum[ax] += sgn * mm[static_cast<size_t>(ax)];
            const cplx c = masked.coeffs[static_cast<size_t>(encode_modes(g, mm.data()))];
            prod *= eq.nonlin.conjugated[static_cast<size_t>(j)] ? std::conj(c) : c;
        }
        bool in = true;
        for (int ax = 0; ax < g.dim; ++ax)
            if (std::abs(sum[ax]) > band) in = false;
        if (in) out.coeffs[static_cast<size_t>(encode_modes(g, sum))] += prod;

        int j = 0;
        for (; j < k; ++j) {
            if (++pick[static_cast<size_t>(j)] < nb) break;
            pick[static_cast<size_t>(j)] = 0;
        }
        if (j == k) break;
    }

    int m[3] = {0, 0, 0};
    for (long i = 0; i < g.total(); ++i) {
        decode_modes(g, i, m);
        out.coeffs[static_cast<size_t>(i)] *= eq.nonlinear_multiplier(frequency_of(g, m));
    }
    return out;
}

// ---------------------------------------------------------------------------

int suggested_steps(const Equation& eq, const Grid& g, double T) {
    const int band = dealias_band(g.n, eq.nonlin.k);
    const double rate = 4.0 * band / g.L;
    return std::max(64, static_cast<int>(std::ceil(std::fabs(T) * rate)));
}

SpectralState step_ifrk4(const Equation& eq, const SpectralState& s, double dt, bool renormalized,
                         bool linear_only) {
    if (linear_only) return linear_propagate(eq, s, dt);
    const Grid& g = s.grid;
    const long n = g.total();

    std::vector<cplx> E(static_cast<size_t>(n)), E2(static_cast<size_t>(n));
    int m[3] = {0, 0, 0};
    for (long i = 0; i < n; ++i) {
        decode_modes(g, i, m);
        const double L = eq.linear_symbol(frequency_of(g, m));
        E[static_cast<size_t>(i)] = std::polar(1.0, 0.5 * dt * L);
        E2[static_cast<size_t>(i)] = std::polar(1.0, dt * L);
    }

    auto N = [&](const SpectralState& st) { return nonlinear_term(eq, st, renormalized); };
    auto combine = [&](const SpectralState& base, const std::vector<cplx>& mult,
                       const SpectralState& add, double w) {
        SpectralState r = base;
        for (long i = 0; i < n; ++i) {
            const size_t u = static_cast<size_t>(i);
            r.coeffs[u] = (base.coeffs[u] + w * add.coeffs[u]) * mult[u];
        }
        return r;
    };

    const SpectralState a = N(s);
    const SpectralState sb = combine(s, E, a, 0.5 * dt); // E (u + dt/2 a)
    const SpectralState b = N(sb);

    SpectralState sc = s;
    for (long i = 0; i < n; ++i) {
        const size_t u = static_cast<size_t>(i);
        sc.coeffs[u] = E[u] * s.coeffs[u] + 0.5 * dt * b.coeffs[u];
    }
    const SpectralState c = N(sc);

    SpectralState sd = s;
    for (long i = 0; i < n; ++i) {
        const size_t u = static_cast<size_t>(i);
        sd.coeffs[u] = E2[u] * s.coeffs[u] + dt * E[u] * c.coeffs[u];
    }
    const SpectralState d = N(sd);

    SpectralState out = s;
    for (long i = 0; i < n; ++i) {
        const size_t u = static_cast<size_t>(i);
        out.coeffs[u] = E2[u] * s.coeffs[u] +
                        (dt / 6.0) * (E2[u] * a.coeffs[u] + 2.0 * E[u] * (b.coeffs[u] + c.coeffs[u]) +
                                      d.coeffs[u]);
    }
    out.time = s.time + dt;
    return out;
}

SpectralState solve(const Equation& eq, const SpectralState& u0, double T, const SolveOptions& opts) {
    const int steps = opts.steps > 0 ? opts.steps : suggested_steps(eq, u0.grid, T);
    const double dt = T / steps;
    double initial = 0;
    for (const auto& c : u0.coeffs) initial += std::norm(c);

    SpectralState s = u0;
    for (int i = 0; i < steps; ++i) {
        s = step_ifrk4(eq, s, dt, opts.renormalized, opts.linear_only);
        double cur = 0;
        for (const auto& c : s.coeffs) cur += std::norm(c);
        if (initial > 0 && cur > opts.blowup_factor * opts.blowup_factor * initial)
            throw NumericalError("norm blow-up: l2 growth exceeded the abort threshold at t=" +
                                 std::to_string(s.time));
        if (opts.on_step) opts.on_step(s);
    }
    return s;
}

// ---------------------------------------------------------------------------

double sobolev_norm(const SpectralState& s, double sigma) {
    const Grid& g = s.grid;
    int m[3] = {0, 0, 0};
    double acc = 0;
    for (long i = 0; i < g.total(); ++i) {
        decode_modes(g, i, m);
        acc += std::pow(1.0 + frequency_of(g, m).norm_sq(), sigma) *
               std::norm(s.coeffs[static_cast<size_t>(i)]);
    }
    return std::sqrt(g.volume() * acc);
}

double mass(const SpectralState& s) {
    double acc = 0;
    for (const auto& c : s.coeffs) acc += std::norm(c);
    return s.grid.volume() * acc;
}

double energy(const Equation& eq, const SpectralState& s) {
    const Grid& g = s.grid;
    const int k = eq.nonlin.k;
    int m[3] = {0, 0, 0};
    // quadratic part
    double quad = 0;
    for (long i = 0; i < g.total(); ++i) {
        decode_modes(g, i, m);
        const Vec xi = frequency_of(g, m);
        const double w = (eq.dispersion.kind == DispersionKind::kdv) ? xi[0] * xi[0] : xi.norm_sq();
        quad += w * std::norm(s.coeffs[static_cast<size_t>(i)]);
    }
    quad *= g.volume();
    // potential part via physical samples
    std::vector<cplx> w = to_physical(s);
    double pot = 0;
    if (eq.nls_halfpower == 0) {
        for (const auto& u : w) pot += std::pow(u.real(), k + 1);
        pot *= g.volume() / static_cast<double>(g.total()) / (k + 1);
        return 0.5 * quad + pot;
    }
    const int p = 2 * eq.nls_halfpower + 2;
    for (const auto& u : w) pot += std::pow(std::abs(u), p);
    pot *= g.volume() / static_cast<double>(g.total()) * (eq.defocusing / (eq.nls_halfpower + 1));
    return quad + pot;
}

double hermitian_defect(const SpectralState& s) {
    const Grid& g = s.grid;
    int m[3] = {0, 0, 0}, neg[3] = {0, 0, 0};
    double worst = 0;
    for (long i = 0; i < g.total(); ++i) {
        decode_modes(g, i, m);
        bool ok = true;
        for (int ax = 0; ax < g.dim; ++ax) {
            neg[ax] = -m[ax];
            if (neg[ax] < -g.n / 2 || neg[ax] > (g.n - 1) / 2) ok = false;
        }
        if (!ok) continue;
        const cplx a = s.coeffs[static_cast<size_t>(i)];
        const cplx b = s.coeffs[static_cast<size_t>(encode_modes(g, neg))];
        worst = std::max(worst, std::abs(a - std::conj(b)));
    }
    return worst;
}

void make_hermitian(SpectralState& s) {
    const Grid& g = s.grid;
    int m[3] = {0, 0, 0}, neg[3] = {0, 0, 0};
    for (long i = 0; i < g.total(); ++i) {
        decode_modes(g, i, m);
        bool ok = true;
        for (int ax = 0; ax < g.dim; ++ax) {
            neg[ax] = -m[ax];
            if (neg[ax] < -g.n / 2 || neg[ax] > (g.n - 1) / 2) ok = false;
        }
        if (!ok) {
            s.coeffs[static_cast<size_t>(i)] = 0;
            continue;
        }
        const long j = encode_modes(g, neg);
        if (j < i) continue;
        const cplx a = s.coeffs[static_cast<size_t>(i)];
        const cplx b = s.coeffs[static_cast<size_t>(j)];
        const cplx avg = 0.5 * (a + std::conj(b));
        s.coeffs[static_cast<size_t>(i)] = avg;
        s.coeffs[static_cast<size_t>(j)] = std::conj(avg);
    }
}

double max_imag_physical(const SpectralState& s) {
    std::vector<cplx> w = to_physical(s);
    double worst = 0;
    for (const auto& u : w) worst = std::max(worst, std::fabs(u.imag()));
    return worst;
}

// ---------------------------------------------------------------------------

void write_checkpoint(const SpectralState& s, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    const int64_t dim = s.grid.dim, n = s.grid.n;
    std::fwrite(&dim, sizeof(dim), 1, f);
    std::fwrite(&n, sizeof(n), 1, f);
    std::fwrite(&s.grid.L, sizeof(double), 1, f);
    std::fwrite(&s.time, sizeof(double), 1, f);
    std::fwrite(s.coeffs.data(), sizeof(cplx), s.coeffs.size(), f);
    std::fclose(f);
}

SpectralState read_checkpoint(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open checkpoint: " + path);
    int64_t dim = 0, n = 0;
    SpectralState s;
    if (std::fread(&dim, sizeof(dim), 1, f) != 1 || std::fread(&n, sizeof(n), 1, f) != 1)
        throw std::runtime_error("truncated checkpoint header: " + path);
    std::fread(&s.grid.L, sizeof(double), 1, f);
    std::fread(&s.time, sizeof(double), 1, f);
    s.grid.dim = static_cast<int>(dim);
    s.grid.n = static_cast<int>(n);
    s.coeffs.resize(static_cast<size_t>(s.grid.total()));
    if (std::fread(s.coeffs.data(), sizeof(cplx), s.coeffs.size(), f) != s.coeffs.size())
        throw std::runtime_error("truncated checkpoint payload: " + path);
    std::fclose(f);
    return s;
}

} // namespace freqlab
