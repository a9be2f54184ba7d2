// Test-only closed-form characteristic function for piecewise-constant
// problems, built from per-segment transfer matrices. Independent of the
// library's shooting integrator; used as the oracle for [DERIVED] expected
// values.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using C = std::complex<double>;

// y'' = z y with y(0)=0, y'(0)=1 evaluated at t (sinh-like), and cosh-like
inline C sh(C z, double t) {
    if (std::abs(z) < 1e-300) return C(t, 0.0);
    const C r = std::sqrt(z);
    return std::sinh(r * t) / r;
}
inline C ch(C z, double t) {
    if (std::abs(z) < 1e-300) return C(1.0, 0.0);
    return std::cosh(std::sqrt(z) * t);
}

struct ConstSeg {
    double len, q, w;  // p = 1
};

/// D(lambda) for a chain of constant-coefficient segments with p = 1.
inline C char_fn(const std::vector<ConstSeg>& segs, C lambda) {
    C y = 0.0, yp = 1.0;
    for (const auto& s : segs) {
        const C z = s.q - lambda * s.w;
        const C yn = y * ch(z, s.len) + yp * sh(z, s.len);
        const C ypn = y * z * sh(z, s.len) + yp * ch(z, s.len);
        y = yn;
        yp = ypn;
    }
    return y;
}

inline std::vector<ConstSeg> p0() { return {{M_PI, 0.0, 1.0}}; }
inline std::vector<ConstSeg> p1(double q_label) {
    const double q = -std::abs(q_label);
    return {{1.0, q, -1.0}, {1.0, q, 1.0}};
}
inline std::vector<ConstSeg> p2() {
    const double qb = -9.0 * M_PI * M_PI / 4.0;
    return {{1.0, qb + 1.0, 1.0}, {3.0, qb - 1.0, -1.0}};
}

/// Newton refinement of a zero of D from a complex seed.
inline C newton_root(const std::vector<ConstSeg>& segs, C z0,
                     double tol = 1e-13) {
    C z = z0;
    for (int it = 0; it < 200; ++it) {
        const double h = 1e-7 * (1.0 + std::abs(z));
        const C f = char_fn(segs, z);
        const C fp = (char_fn(segs, z + h) - char_fn(segs, z - h)) / (2.0 * h);
        const C dz = f / fp;
        z -= dz;
        if (std::abs(dz) <= tol * (1.0 + std::abs(z))) break;
    }
    return z;
}

/// All real zeros of D in [lo, hi] by dense scan + bisection.
inline std::vector<double> real_roots(const std::vector<ConstSeg>& segs,
                                      double lo, double hi, int n = 200000) {
    std::vector<double> out;
    double prev_x = lo, prev_f = char_fn(segs, prev_x).real();
    for (int i = 1; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double f = char_fn(segs, x).real();
        if (prev_f == 0.0) out.push_back(prev_x);
        else if (prev_f * f < 0.0) {
            double a = prev_x, b = x, fa = prev_f;
            for (int k = 0; k < 200; ++k) {
                const double m = 0.5 * (a + b);
                const double fm = char_fn(segs, m).real();
                if (fa * fm <= 0.0) b = m;
                else { a = m; fa = fm; }
                if (b - a < 1e-13 * (1.0 + std::abs(b))) break;
            }
            out.push_back(0.5 * (a + b));
        }
        prev_x = x;
        prev_f = f;
    }
    return out;
}

}  // namespace oracle
