#pragma once

#include <cmath>

#include "ndsl/analysis.hpp"
#include "ndsl/classification.hpp"
#include "ndsl/coefficients.hpp"
#include "ndsl/fixtures.hpp"
#include "ndsl/spectrum.hpp"

namespace ndsl {

/// Window heuristic: real top chosen so the WKB phase predicts at least 12
/// positive eigenvalues; complex rectangle from the fixture default.
inline SpectralWindow auto_window(const Problem& prob, double im_min = 1e-3) {
    double top = 8.0 * (1.0 + prob.q.sup_abs(prob.interval));
    for (int i = 0; i < 40; ++i) {
        if (detail::wkb_phase(prob, top) / M_PI >= 14.0) break;
        top *= 1.6;
    }
    return fixtures::default_window(prob, top, im_min);
}

struct SolveOptions {
    double tol = 1e-9;
    double shoot_tol = 1e-10;
    double tol_deg = 1e-4;
};

/// build_inventory + classification annotation in one step.
inline SpectralInventory solve_window(const Problem& prob,
                                      const SpectralWindow& window,
                                      const SolveOptions& opts = {}) {
    SpectralInventory inv =
        build_inventory(prob, window, opts.tol, opts.shoot_tol);
    annotate_inventory(prob, inv, opts.tol_deg);
    return inv;
}

/// indices + every applicable theorem check over a solved inventory.
inline IndexReport analyze(const Problem& prob, const SpectralInventory& inv) {
    OscillationProfile prof = profile(inv, Side::positive);
    IndexReport rep = indices(prof);
    ghost_lower_bound_check(inv, rep);
    ghost_consequence_checks(inv, rep);
    index_upper_bounds(prob, rep);
    comparison_lower_bound(prob, rep);
    for (const auto& e : inv.real_pairs)
        if (e.is_real() && e.lambda.real() > 0.0)
            rep.checks.push_back(rapoport_check(prob, e));
    return rep;
}

}  // namespace ndsl
