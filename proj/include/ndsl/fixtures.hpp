#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "ndsl/coefficients.hpp"
#include "ndsl/spectrum.hpp"

namespace ndsl::fixtures {

/// Classical problem: p=1, q=0, w=1 on [0, pi]; eigenvalues k^2.
inline Problem P0() {
    Interval iv(0.0, M_PI);
    return Problem(iv, PiecewiseCoefficient::constant(iv, 1.0),
                   PiecewiseCoefficient::constant(iv, 0.0),
                   PiecewiseCoefficient::constant(iv, 1.0), "P0");
}

/// Indefinite-weight family on [-1,1]: p=1, w = sgn x, constant potential
/// -|q|. The catalogued example family is parameterized by the magnitude of
/// its (negative) potential; labels of either sign select the same problem.
inline Problem P1(double q_label) {
    Interval iv(-1.0, 1.0);
    const double q = -std::abs(q_label);
    return Problem(iv, PiecewiseCoefficient::constant(iv, 1.0),
                   PiecewiseCoefficient::constant(iv, q),
                   PiecewiseCoefficient::steps(iv, {{0.0, -1.0}, {1.0, 1.0}}),
                   "P1(" + std::to_string(q_label) + ")");
}

/// Turning-point problem on [0,4]: w = 1 on [0,1], -1 on [1,4],
/// q = -9 pi^2/4 + w. Carries lambda = 1 exactly, with eigenfunction
/// sin(3 pi x / 2).
inline Problem P2() {
    Interval iv(0.0, 4.0);
    const double qb = -9.0 * M_PI * M_PI / 4.0;
    return Problem(
        iv, PiecewiseCoefficient::constant(iv, 1.0),
        PiecewiseCoefficient::steps(iv, {{1.0, qb + 1.0}, {4.0, qb - 1.0}}),
        PiecewiseCoefficient::steps(iv, {{1.0, 1.0}, {4.0, -1.0}}), "P2");
}

struct NamedFixture {
    Problem problem;
    SpectralWindow window;
    double tol_deg;  // degeneracy tolerance for this fixture's reports
};

/// Default spectral window: real range [-top, top]; complex rectangle
/// [-R, R] x [im_min, R] with R = max(10, 2 sup|q| + 2).
inline SpectralWindow default_window(const Problem& prob, double top,
                                     double im_min = 1e-3) {
    const double R =
        std::max(10.0, 2.0 * prob.q.sup_abs(prob.interval) + 2.0);
    return SpectralWindow(Interval(-top, top), Rect{-R, R, im_min, R});
}

/// Reproduction fixtures, hard-coded by id so tests cannot drift.
/// Window tops are sized so the oscillation tail stabilizes (margin >= 5)
/// where the reproduction needs indices.
inline NamedFixture by_id(const std::string& id) {
    if (id == "q3")
        return {P1(3.0), default_window(P1(3.0), 560.0), 1e-4};
    if (id == "q15")
        return {P1(15.0), default_window(P1(15.0), 560.0), 1e-4};
    if (id == "q33")
        return {P1(33.0), default_window(P1(33.0), 600.0), 1e-4};
    if (id == "qdeg")
        return {P1(21.99604), default_window(P1(21.99604), 760.0), 1e-3};
    if (id == "q4pi2") {
        const double q = 4.0 * M_PI * M_PI;
        return {P1(q), default_window(P1(q), 760.0), 1e-4};
    }
    if (id == "qm22")
        return {P1(-22.0), default_window(P1(-22.0), 760.0), 1e-4};
    if (id == "qm419")
        return {P1(-41.9), default_window(P1(-41.9), 960.0), 1e-4};
    if (id == "tturn")
        return {P2(), default_window(P2(), 60.0, 0.5), 1e-4};
    if (id == "P0")
        return {P0(), SpectralWindow(Interval(0.5, 26.0),
                                     Rect{0.5, 26.0, 0.1, 10.0}),
                1e-4};
    throw std::invalid_argument("unknown fixture id: " + id);
}

}  // namespace ndsl::fixtures
