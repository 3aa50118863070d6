#ifndef FREQLAB_VEC_HPP
#define FREQLAB_VEC_HPP

#include <array>
#include <cmath>

namespace freqlab {

// Spatial frequency vector, dimension 1..3. Fixed capacity so tuples can
// live on the stack inside Monte Carlo loops.
struct Vec {
    std::array<double, 3> v{0.0, 0.0, 0.0};
    int d = 1;

    Vec() = default;
    explicit Vec(int dim) : d(dim) {}
    static Vec of(double x) { Vec a(1); a.v[0] = x; return a; }
    static Vec of(double x, double y) { Vec a(2); a.v[0] = x; a.v[1] = y; return a; }
    static Vec of(double x, double y, double z) { Vec a(3); a.v[0] = x; a.v[1] = y; a.v[2] = z; return a; }

    double& operator[](int i) { return v[i]; }
    double operator[](int i) const { return v[i]; }

    double norm_sq() const {
        double s = 0;
        for (int i = 0; i < d; ++i) s += v[i] * v[i];
        return s;
    }
    double norm() const { return std::sqrt(norm_sq()); }
    double max_abs() const {
        double s = 0;
        for (int i = 0; i < d; ++i) s = std::max(s, std::fabs(v[i]));
        return s;
    }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < d; ++i) v[i] += o.v[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < d; ++i) v[i] -= o.v[i];
        return *this;
    }
    Vec& operator*=(double c) {
        for (int i = 0; i < d; ++i) v[i] *= c;
        return *this;
    }
    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double c, Vec a) { return a *= c; }
    friend Vec operator-(Vec a) { return -1.0 * a; }
};

inline double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (int i = 0; i < a.d; ++i) s += a.v[i] * b.v[i];
    return s;
}

// Japanese bracket <x> = sqrt(1 + |x|^2).
inline double jap(double x) { return std::sqrt(1.0 + x * x); }
inline double jap(const Vec& x) { return std::sqrt(1.0 + x.norm_sq()); }

} // namespace freqlab

#endif
