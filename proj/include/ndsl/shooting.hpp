#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "ndsl/coefficients.hpp"

namespace ndsl {

struct IntegrationError : std::runtime_error {
    double location;
    IntegrationError(const std::string& what, double x)
        : std::runtime_error(what + " at x=" + std::to_string(x)), location(x) {}
};

using Complex = std::complex<double>;

/// One IVP integration at a fixed lambda. y(a)=0, (py')(a)=1. D = y(b),
/// D_prime = dD/dlambda from the simultaneously integrated variational
/// system. The grid holds every accepted step endpoint plus all coefficient
/// breakpoints; cubic Hermite data (y, y', py', (py')') is kept per node so
/// the trajectory can be evaluated anywhere without re-integrating.
struct ShotSolution {
    Complex lambda;
    std::vector<double> grid;
    std::vector<Complex> y;
    std::vector<Complex> py_prime;
    std::vector<Complex> y_deriv;      // y' = py'/p at nodes
    std::vector<Complex> py_deriv;     // (py')' = (q - lambda w) y at nodes
    Complex D;
    Complex D_prime;
    // divisor applied to the raw IVP solution ((py')(a) = 1/norm_scale)
    Complex norm_scale = 1.0;

    /// Hermite evaluation of (y, py') between nodes.
    std::pair<Complex, Complex> eval(double x) const {
        if (grid.size() < 2) throw std::logic_error("ShotSolution: no grid");
        auto it = std::upper_bound(grid.begin(), grid.end(), x);
        std::size_t i = (it == grid.begin()) ? 0 : (it - grid.begin() - 1);
        if (i + 1 >= grid.size()) i = grid.size() - 2;
        const double h = grid[i + 1] - grid[i];
        const double t = std::clamp((x - grid[i]) / h, 0.0, 1.0);
        auto hermite = [&](Complex f0, Complex f1, Complex d0, Complex d1) {
            const double t2 = t * t, t3 = t2 * t;
            return f0 * (2 * t3 - 3 * t2 + 1) + f1 * (-2 * t3 + 3 * t2) +
                   d0 * (h * (t3 - 2 * t2 + t)) + d1 * (h * (t3 - t2));
        };
        return {hermite(y[i], y[i + 1], y_deriv[i], y_deriv[i + 1]),
                hermite(py_prime[i], py_prime[i + 1], py_deriv[i], py_deriv[i + 1])};
    }

    double max_abs_y() const {
        double m = 0.0;
        for (const auto& v : y) m = std::max(m, std::abs(v));
        return m;
    }
};

struct ShootOptions {
    double tol = 1e-10;        // local error target per step
    double max_step = std::numeric_limits<double>::infinity();
    bool keep_trajectory = true;
    // Prufer phase advance cap per step; guarantees no eigenfunction zero is
    // skipped between consecutive grid nodes for real lambda.
    double phase_cap = M_PI / 2;
};

namespace detail {

// Dormand-Prince 5(4) tableau
struct DP45 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                            c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113,
                            b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                            e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
};

using State = std::array<Complex, 4>;  // y, py', v, pv'

struct SegmentCoeffs {
    const Segment* p;
    const Segment* q;
    const Segment* w;
};

inline State rhs(const SegmentCoeffs& sc, Complex lambda, double x,
                 const State& s) {
    const double pv = sc.p->eval(x);
    const double qv = sc.q->eval(x);
    const double wv = sc.w->eval(x);
    const Complex qlw = qv - lambda * wv;
    return {s[1] / pv, qlw * s[0], s[3] / pv, qlw * s[2] - wv * s[0]};
}

}  // namespace detail

/// Integrate the shooting IVP for -(py')' + qy = lambda w y together with
/// its variational system across [a,b], restarting at every coefficient
/// breakpoint so discontinuities are never stepped across.
inline ShotSolution shoot(const Problem& prob, Complex lambda,
                          const ShootOptions& opts = {}) {
    using detail::State;
    using T = detail::DP45;
    if (!(opts.tol > 0)) throw std::invalid_argument("shoot: tol must be > 0");

    ShotSolution out;
    out.lambda = lambda;
    State s{0.0, 1.0, 0.0, 0.0};

    const auto bps = prob.breakpoints();
    auto record = [&](double x, const State& st, const detail::SegmentCoeffs& sc) {
        if (!opts.keep_trajectory) return;
        const double pv = sc.p->eval(x);
        const double qv = sc.q->eval(x);
        const double wv = sc.w->eval(x);
        out.grid.push_back(x);
        out.y.push_back(st[0]);
        out.py_prime.push_back(st[1]);
        out.y_deriv.push_back(st[1] / pv);
        out.py_deriv.push_back((qv - lambda * wv) * st[0]);
    };

    for (std::size_t seg = 0; seg + 1 < bps.size(); ++seg) {
        const double x0 = bps[seg], x1 = bps[seg + 1];
        const double mid = 0.5 * (x0 + x1);
        detail::SegmentCoeffs sc{
            &prob.p.segments()[prob.p.segment_index(mid)],
            &prob.q.segments()[prob.q.segment_index(mid)],
            &prob.w.segments()[prob.w.segment_index(mid)]};

        // phase-advance cap from |theta'| <= max(1/p, |lambda w - q|)
        Interval segiv(x0, x1);
        const double pmin = prob.p.min_max(segiv).first;
        const double qsup = prob.q.sup_abs(segiv);
        const double wsup = prob.w.sup_abs(segiv);
        const double rate =
            std::max(1.0 / pmin, std::abs(lambda) * wsup + qsup);
        const double hcap = std::min({opts.phase_cap / rate, opts.max_step,
                                      (x1 - x0) / 8.0});

        if (seg == 0) record(x0, s, sc);
        double x = x0;
        double h = std::min(hcap, (x1 - x0) / 16.0);
        int rejects_in_row = 0;
        while (x < x1) {
            if (x + h > x1) h = x1 - x;
            if (h < 1e-14 * (1.0 + std::abs(x)))
                throw IntegrationError("shoot: step size underflow", x);
            const State k1 = detail::rhs(sc, lambda, x, s);
            State tmp;
            auto axpy = [&](const std::array<double, 6>& cs,
                            const std::array<const State*, 6>& ks, int n) {
                for (int i = 0; i < 4; ++i) {
                    Complex acc = s[i];
                    for (int j = 0; j < n; ++j) acc += h * cs[j] * (*ks[j])[i];
                    tmp[i] = acc;
                }
            };
            axpy({T::a21}, {&k1}, 1);
            const State k2 = detail::rhs(sc, lambda, x + T::c2 * h, tmp);
            axpy({T::a31, T::a32}, {&k1, &k2}, 2);
            const State k3 = detail::rhs(sc, lambda, x + T::c3 * h, tmp);
            axpy({T::a41, T::a42, T::a43}, {&k1, &k2, &k3}, 3);
            const State k4 = detail::rhs(sc, lambda, x + T::c4 * h, tmp);
            axpy({T::a51, T::a52, T::a53, T::a54}, {&k1, &k2, &k3, &k4}, 4);
            const State k5 = detail::rhs(sc, lambda, x + T::c5 * h, tmp);
            axpy({T::a61, T::a62, T::a63, T::a64, T::a65},
                 {&k1, &k2, &k3, &k4, &k5}, 5);
            const State k6 = detail::rhs(sc, lambda, x + h, tmp);
            State y5;
            for (int i = 0; i < 4; ++i)
                y5[i] = s[i] + h * (T::b1 * k1[i] + T::b3 * k3[i] +
                                    T::b4 * k4[i] + T::b5 * k5[i] +
                                    T::b6 * k6[i]);
            const State k7 = detail::rhs(sc, lambda, x + h, y5);
            double err = 0.0;
            for (int i = 0; i < 4; ++i) {
                const Complex e = h * (T::e1 * k1[i] + T::e3 * k3[i] +
                                       T::e4 * k4[i] + T::e5 * k5[i] +
                                       T::e6 * k6[i] + T::e7 * k7[i]);
                const double scale = opts.tol * (1.0 + std::abs(y5[i]));
                err = std::max(err, std::abs(e) / scale);
            }
            if (err <= 1.0) {
                x += h;
                s = y5;
                record(x, s, sc);
                rejects_in_row = 0;
                const double grow =
                    (err > 0) ? 0.9 * std::pow(err, -0.2) : 5.0;
                h = std::min({h * std::clamp(grow, 0.2, 5.0), hcap});
            } else {
                if (++rejects_in_row > 60)
                    throw IntegrationError("shoot: repeated step rejection", x);
                h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            }
        }
    }
    out.D = s[0];
    out.D_prime = s[2];
    if (!opts.keep_trajectory) {
        out.grid = {prob.interval.a, prob.interval.b};
        out.y = {0.0, s[0]};
        out.py_prime = {1.0, s[1]};
        out.y_deriv = {1.0 / prob.p.eval(prob.interval.a), s[1] / prob.p.eval(prob.interval.b)};
        out.py_deriv = {0.0, 0.0};
    }
    return out;
}

/// Characteristic function D(lambda) and its lambda-derivative; trajectory
/// discarded.
inline std::pair<Complex, Complex> char_fn(const Problem& prob, Complex lambda,
                                           double tol = 1e-10) {
    ShootOptions opts;
    opts.tol = tol;
    opts.keep_trajectory = false;
    const ShotSolution s = shoot(prob, lambda, opts);
    return {s.D, s.D_prime};
}

/// Trajectory dump: CSV columns x, Re y, Im y, Re py', Im py'.
inline void dump_trajectory_csv(const ShotSolution& s, std::ostream& os) {
    os << "x,re_y,im_y,re_py_prime,im_py_prime\n";
    for (std::size_t i = 0; i < s.grid.size(); ++i)
        os << s.grid[i] << ',' << s.y[i].real() << ',' << s.y[i].imag() << ','
           << s.py_prime[i].real() << ',' << s.py_prime[i].imag() << '\n';
}

}  // namespace ndsl
