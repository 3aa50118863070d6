#include "freqlab/resonance.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "freqlab/rng.hpp"
#include "freqlab/sublevel.hpp"

namespace freqlab {

namespace {

// Eigenvalues count toward the rank when they clear both the relative
// threshold and a small absolute floor; the floor keeps the exact-zero
// Hessians of the pairing variety at rank zero instead of promoting
// rounding noise.
int count_rank(const std::vector<double>& eigenvalues, double rank_tol) {
    double lmax = 0.0;
    for (double l : eigenvalues) lmax = std::max(lmax, std::fabs(l));
    const double cut = std::max(rank_tol * lmax, 1e-9);
    int rank = 0;
    for (double l : eigenvalues)
        if (std::fabs(l) > cut) ++rank;
    return rank;
}

void spectrum_into(const PhaseChart& chart, const std::vector<double>& q, CriticalPoint& cp,
                   double rank_tol) {
    const int m = chart.dim();
    std::vector<double> H(static_cast<size_t>(m) * static_cast<size_t>(m));
    chart.hessian(q.data(), H.data());
    Eigen::MatrixXd He(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) He(i, j) = H[static_cast<size_t>(i * m + j)];
    // symmetrize against finite-difference noise
    He = 0.5 * (He + He.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(He);
    cp.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + m);
    double lmax = 0.0;
    for (double l : cp.eigenvalues) lmax = std::max(lmax, std::fabs(l));
    const double cut = std::max(rank_tol * lmax, 1e-9);
    cp.numerical_rank = 0;
    cp.n_pos = cp.n_neg = cp.n_zero = 0;
    for (double l : cp.eigenvalues) {
        if (std::fabs(l) > cut) {
            ++cp.numerical_rank;
            (l > 0 ? cp.n_pos : cp.n_neg)++;
        } else {
            ++cp.n_zero;
        }
    }
}

} // namespace

MorseClass classify(const CriticalPoint& p, double rank_tol) {
    const int rank = count_rank(p.eigenvalues, rank_tol);
    const int m = static_cast<int>(p.eigenvalues.size());
    if (rank == m) return MorseClass::nondegenerate;
    if (rank >= 2) return MorseClass::semi_nondegenerate;
    return MorseClass::degenerate;
}

CriticalPoint hessian_report(const PhaseChart& chart, const std::vector<double>& q,
                             double rank_tol) {
    CriticalPoint cp;
    cp.location = q;
    cp.value = chart.value(q.data());
    const int m = chart.dim();
    std::vector<double> g(static_cast<size_t>(m));
    chart.gradient(q.data(), g.data());
    double gn = 0.0;
    for (double v : g) gn += v * v;
    cp.grad_norm = std::sqrt(gn);
    spectrum_into(chart, q, cp, rank_tol);
    return cp;
}

AtlasResult find_critical_points(const PhaseChart& chart, const CriticalPointSearch& opts) {
    const int m = chart.dim();
    AtlasResult out;

    std::vector<double> q(static_cast<size_t>(m));
    std::vector<double> g(static_cast<size_t>(m));
    std::vector<double> H(static_cast<size_t>(m) * static_cast<size_t>(m));

    auto grad_norm_at = [&](const std::vector<double>& x) {
        chart.gradient(x.data(), g.data());
        double s = 0;
        for (double v : g) s += v * v;
        return std::sqrt(s);
    };

    // seed lattice
    std::vector<int> odo(static_cast<size_t>(m), 0);
    const int S = opts.seeds_per_axis;
    const long total = static_cast<long>(std::pow(static_cast<double>(S), m));
    out.seeds_total = static_cast<int>(total);
    for (long t = 0; t < total; ++t) {
        long r = t;
        for (int c = 0; c < m; ++c) {
            const int idx = static_cast<int>(r % S);
            r /= S;
            q[static_cast<size_t>(c)] =
                opts.seed_lo + (opts.seed_hi - opts.seed_lo) * (S == 1 ? 0.5 : idx / double(S - 1));
        }

        std::vector<double> x = q;
        double gn = grad_norm_at(x);
        int iters = 0;
        bool ok = false;
        for (; iters < opts.max_iters; ++iters) {
            if (gn <= opts.grad_tol) {
                ok = true;
                break;
            }
            chart.gradient(x.data(), g.data());
            chart.hessian(x.data(), H.data());
            Eigen::MatrixXd He(m, m);
            Eigen::VectorXd ge(m);
            for (int i = 0; i < m; ++i) {
                ge(i) = g[static_cast<size_t>(i)];
                for (int j = 0; j < m; ++j) He(i, j) = H[static_cast<size_t>(i * m + j)];
            }
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(He);
            if (!qr.isInvertible()) {
                // regularize mildly; degenerate directions simply stall
                He += 1e-9 * Eigen::MatrixXd::Identity(m, m);
                qr.compute(He);
                if (!qr.isInvertible()) break;
            }
            Eigen::VectorXd step = qr.solve(ge);
            double lambda = 1.0;
            bool moved = false;
            for (int h = 0; h < 8; ++h) {
                std::vector<double> xn = x;
                for (int i = 0; i < m; ++i) xn[static_cast<size_t>(i)] -= lambda * step(i);
                const double gnn = grad_norm_at(xn);
                if (gnn < gn) {
                    x = xn;
                    gn = gnn;
                    moved = true;
                    break;
                }
                lambda *= 0.5;
            }
            if (!moved) break;
        }
        if (!ok && gn <= opts.grad_tol) ok = true;
        if (!ok || gn > opts.accept_tol) {
            ++out.seeds_diverged;
            continue;
        }
        // escape region sanity: keep points in a moderate window
        bool inside = true;
        for (double v : x)
            if (std::fabs(v) > 4.0 * std::max(std::fabs(opts.seed_lo), std::fabs(opts.seed_hi)))
                inside = false;
        if (!inside) {
            ++out.seeds_diverged;
            continue;
        }
        bool dup = false;
        for (const auto& p : out.points) {
            double d2 = 0;
            for (int i = 0; i < m; ++i) {
                const double dd = p.location[static_cast<size_t>(i)] - x[static_cast<size_t>(i)];
                d2 += dd * dd;
            }
            if (std::sqrt(d2) < opts.dedup_dist) {
                dup = true;
                break;
            }
        }
        if (dup) continue;

        CriticalPoint cp;
        cp.location = x;
        cp.value = chart.value(x.data());
        cp.grad_norm = gn;
        cp.newton_iters = iters;
        spectrum_into(chart, x, cp, opts.rank_tol);
        out.points.push_back(std::move(cp));
    }
    std::sort(out.points.begin(), out.points.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
        return a.location < b.location;
    });
    return out;
}

MorseWindow morse_window_check(const PhaseChart& chart, const std::vector<double>& point,
                               double radius, const MorseWindowOptions& opts) {
    const int m = chart.dim();
    const double p_val = chart.value(point.data());
    MorseWindow out;
    out.model_exponent = (m >= 2) ? 1.0 : 0.5;

    double r = radius;
    for (int attempt = 0; attempt <= opts.max_retries; ++attempt, r *= 0.5) {
        // histogram |P - P(z)| over log2 bins
        constexpr int kBins = 96;
        std::vector<long> bins(kBins, 0);
        long total = 0;
        Rng rng = make_stream(opts.seed, 0x3035eu, static_cast<uint64_t>(attempt));
        std::vector<double> q(static_cast<size_t>(m));
        for (long i = 0; i < opts.samples; ++i) {
            // uniform in the ball of radius r
            double n2 = 0;
            do {
                n2 = 0;
                for (int c = 0; c < m; ++c) {
                    q[static_cast<size_t>(c)] = rng.uniform(-1, 1);
                    n2 += q[static_cast<size_t>(c)] * q[static_cast<size_t>(c)];
                }
            } while (n2 > 1.0);
            for (int c = 0; c < m; ++c)
                q[static_cast<size_t>(c)] = point[static_cast<size_t>(c)] + r * q[static_cast<size_t>(c)];
            const double dv = std::fabs(chart.value(q.data()) - p_val);
            if (dv <= 0) continue;
            int b = static_cast<int>(std::floor(std::log2(dv))) + 64;
            b = std::clamp(b, 0, kBins - 1);
            ++bins[static_cast<size_t>(b)];
            ++total;
        }
        if (total < 1000) continue;

        // cumulative counts from below give the empirical sublevel mass
        std::vector<double> cum(kBins, 0.0);
        double acc = 0;
        for (int b = 0; b < kBins; ++b) {
            acc += static_cast<double>(bins[static_cast<size_t>(b)]);
            cum[static_cast<size_t>(b)] = acc;
        }
        // fit window: start at the ~1e-3 quantile and go seven octaves down
        const double target_hi = std::max(200.0, 1e-3 * static_cast<double>(total));
        int b_hi = 0;
        while (b_hi < kBins - 1 && cum[static_cast<size_t>(b_hi)] < target_hi) ++b_hi;
        std::vector<std::pair<double, double>> pts; // (log2 m, log2 mass)
        for (int b = b_hi; b > b_hi - 7 && b >= 0; --b) {
            const double c = cum[static_cast<size_t>(b)];
            if (c < 120) break;
            const double edge = static_cast<double>(b + 1 - 64); // log2 of upper bin edge
            pts.push_back({edge, std::log2(c)});
        }
        if (pts.size() < 4) continue;
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        for (auto& [x, y] : pts) {
            sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
        }
        const double n = static_cast<double>(pts.size());
        const double beta = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        const double inter = (sy - beta * sx) / n;
        const double ss_tot = syy - sy * sy / n;
        double ss_res = 0;
        for (auto& [x, y] : pts) {
            const double yh = inter + beta * x;
            ss_res += (y - yh) * (y - yh);
        }
        const double r2 = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 1.0;
        if (r2 >= opts.fit_r2) {
            out.exponent = beta;
            out.r2 = r2;
            out.radius_used = r;
            out.levels_used = static_cast<int>(pts.size());
            return out;
        }
    }
    throw NumericalError("local sublevel fit did not reach the confidence threshold");
}

} // namespace freqlab
