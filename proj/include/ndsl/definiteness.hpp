#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "ndsl/coefficients.hpp"
#include "ndsl/shooting.hpp"
#include "ndsl/spectrum.hpp"

namespace ndsl {

struct DefinitenessError : std::runtime_error {
    double search_lo, search_hi;
    DefinitenessError(const std::string& what, double lo, double hi)
        : std::runtime_error(what + " (searched [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "])"),
          search_lo(lo), search_hi(hi) {}
};

/// Smallest eigenvalue of the weight-1 auxiliary problem
/// -(py')' + qy = mu y, y(a)=y(b)=0. The Dirichlet form is indefinite iff
/// this is negative. mu_0 >= inf q, so the scan starts just below that and
/// walks up to the first sign change of the auxiliary D.
inline double auxiliary_smallest_eigenvalue(const Problem& prob) {
    Problem aux(prob.interval, prob.p,
                prob.q, PiecewiseCoefficient::constant(prob.interval, 1.0),
                prob.name + "_aux");
    const Interval full = prob.interval;
    const double qmin = prob.q.min_max(full).first;
    const double lo = qmin - 1.0;
    // generous upper limit: Rayleigh quotient scale of the first mode
    const double pmax = prob.p.min_max(full).second;
    const double qmax = prob.q.min_max(full).second;
    const double hi = qmax + 4.0 * pmax *
                                (M_PI / full.width()) * (M_PI / full.width()) + 2.0;
    double prev = char_fn(aux, lo).first.real();
    const int steps = 400;
    for (int i = 1; i <= steps; ++i) {
        const double mu = lo + (hi - lo) * i / steps;
        const double cur = char_fn(aux, mu).first.real();
        if (prev == 0.0) return lo + (hi - lo) * (i - 1) / steps;
        if (prev * cur < 0.0) {
            auto f = [&](double m) { return char_fn(aux, m).first.real(); };
            return brent_root(f, lo + (hi - lo) * (i - 1) / steps, mu, prev, cur,
                              1e-10 * (1.0 + std::abs(mu)));
        }
        prev = cur;
    }
    throw DefinitenessError("auxiliary eigenvalue search failed", lo, hi);
}

/// Definiteness type of the problem. The weight form is indefinite iff w
/// takes both signs on sets of positive measure (exact from segments); the
/// Dirichlet form is indefinite iff the auxiliary smallest eigenvalue is
/// negative. Weight-definite problems report right_definite (classical
/// naming keys on the weight); definite_both is reserved for the
/// simultaneous case, which this classifier folds into right_definite.
inline DefinitenessClass definiteness_class(const Problem& prob) {
    const bool weight_indef = prob.w.takes_both_signs();
    const bool form_indef = auxiliary_smallest_eigenvalue(prob) < 0.0;
    if (weight_indef && form_indef) return DefinitenessClass::non_definite;
    if (weight_indef) return DefinitenessClass::left_definite;
    return DefinitenessClass::right_definite;
}

}  // namespace ndsl
