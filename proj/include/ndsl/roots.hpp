#pragma once

#include <array>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ndsl {

/// Real roots of c0 + c1 x + c2 x^2 + c3 x^3 inside [lo, hi], ascending,
/// multiple roots reported once. Closed-form (trigonometric/Cardano for the
/// cubic); degree is deduced from the leading nonzero coefficient.
inline std::vector<double> poly_real_roots(const std::array<double, 4>& c,
                                           double lo, double hi) {
    std::vector<double> roots;
    const double scale = std::max({std::abs(c[0]), std::abs(c[1]),
                                   std::abs(c[2]), std::abs(c[3]), 1.0});
    const double eps = 1e-14 * scale;
    auto push = [&](double r) {
        if (r < lo - 1e-12 || r > hi + 1e-12) return;
        r = std::clamp(r, lo, hi);
        for (double s : roots)
            if (std::abs(s - r) <= 1e-12 * (1.0 + std::abs(r))) return;
        roots.push_back(r);
    };

    if (std::abs(c[3]) > eps) {
        // normalized cubic x^3 + a x^2 + b x + d
        const double a = c[2] / c[3], b = c[1] / c[3], d = c[0] / c[3];
        const double p = b - a * a / 3.0;
        const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + d;
        const double shift = -a / 3.0;
        const double disc = q * q / 4.0 + p * p * p / 27.0;
        if (disc > 1e-14 * std::max(1.0, q * q)) {
            const double s = std::sqrt(disc);
            const double u = std::cbrt(-q / 2.0 + s);
            const double v = std::cbrt(-q / 2.0 - s);
            push(shift + u + v);
        } else if (disc < -1e-14 * std::max(1.0, q * q)) {
            // three real roots, trigonometric form
            const double m = 2.0 * std::sqrt(-p / 3.0);
            const double theta =
                std::acos(std::clamp(3.0 * q / (p * m), -1.0, 1.0)) / 3.0;
            for (int k = 0; k < 3; ++k)
                push(shift + m * std::cos(theta - 2.0 * M_PI * k / 3.0));
        } else {
            // borderline: repeated roots
            if (std::abs(q) < 1e-30 && std::abs(p) < 1e-30) {
                push(shift);
            } else {
                push(shift + 3.0 * q / p);
                push(shift - 3.0 * q / (2.0 * p));
            }
        }
    } else if (std::abs(c[2]) > eps) {
        const double disc = c[1] * c[1] - 4.0 * c[2] * c[0];
        if (disc >= 0.0) {
            const double s = std::sqrt(disc);
            // Citardauq-stable split
            const double q0 = -0.5 * (c[1] + std::copysign(s, c[1]));
            if (std::abs(c[2]) > 0) push(q0 / c[2]);
            if (std::abs(q0) > 0) push(c[0] / q0);
            else push(0.0);
        }
    } else if (std::abs(c[1]) > eps) {
        push(-c[0] / c[1]);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

/// Safeguarded secant/bisection root refinement on a bracket [a,b] with
/// f(a)*f(b) <= 0. Returns the root location; terminates when the bracket
/// width drops below xtol + rtol*|x|.
inline double brent_root(const std::function<double(double)>& f, double a,
                         double b, double fa, double fb, double xtol,
                         double rtol = 1e-15) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw std::invalid_argument("brent_root: no bracket");
    double c = a, fc = fa, d = b - a, e = d;
    for (int iter = 0; iter < 200; ++iter) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 0.5 * (xtol + rtol * std::abs(b));
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) return b;
        if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
            d = e = m;  // bisection
        } else {
            double p, q0;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q0 = 1.0 - s;
            } else {
                const double q1 = fa / fc, r = fb / fc;
                p = s * (2.0 * m * q1 * (q1 - r) - (b - a) * (r - 1.0));
                q0 = (q1 - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q0 = -q0; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q0 - std::abs(tol * q0),
                                   std::abs(e * q0))) {
                e = d; d = p / q0;
            } else {
                d = e = m;
            }
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol) ? d : std::copysign(tol, m);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) { c = a; fc = fa; d = e = b - a; }
    }
    return b;
}

}  // namespace ndsl
