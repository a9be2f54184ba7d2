#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndsl/coefficients.hpp"
#include "ndsl/ghost.hpp"
#include "ndsl/roots.hpp"
#include "ndsl/shooting.hpp"

namespace ndsl {

struct Rect {
    double re_min, re_max, im_min, im_max;
    double width() const { return re_max - re_min; }
    double height() const { return im_max - im_min; }
    bool contains(Complex z, double pad = 0.0) const {
        return z.real() >= re_min - pad && z.real() <= re_max + pad &&
               z.imag() >= im_min - pad && z.imag() <= im_max + pad;
    }
};

struct SpectralWindow {
    Interval real_range;
    Rect complex_rect;  // upper half-plane; conjugates implicit

    SpectralWindow(Interval r, Rect c) : real_range(r), complex_rect(c) {
        if (!(c.im_min > 0) || !(c.im_max > c.im_min) || !(c.re_max > c.re_min))
            throw std::invalid_argument(
                "SpectralWindow: complex_rect must lie in the open upper "
                "half-plane with positive area");
    }
};

struct Eigenpair {
    Complex lambda;
    int multiplicity = 1;
    ShotSolution eigenfunction;   // normalized so max|y| = 1
    double residual = 0.0;        // |D(lambda)| after refinement
    double newton_decrement = 0.0;  // |D|/max(1,|D'|), lambda-scaled residual
    std::optional<int> osc_count; // absent iff lambda non-real
    std::optional<GhostClass> ghost;
    std::optional<FormValues> ghost_form;
    bool is_real() const { return lambda.imag() == 0.0; }
};

struct Certificate {
    int rect_count = 0;   // argument-principle zero count of complex_rect
    int found_count = 0;  // refined non-real eigenvalues, with multiplicity
    bool match = false;
    double max_conjugate_residual = 0.0;  // max |D(conj lambda)| over pairs
    std::vector<Rect> flagged;            // subrectangles that failed to resolve
    std::vector<double> flagged_real;     // unresolved real-axis tangency spots
};

struct SpectralInventory {
    std::vector<Eigenpair> real_pairs;    // ascending in lambda
    std::vector<Eigenpair> complex_pairs; // Im > 0; conjugates implicit
    Certificate certificate;
};

struct ContourError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

struct ContourTooClose {
    Complex where;
};

}  // namespace detail

/// Argument-principle zero count of D over the rectangle boundary:
/// (1/2 pi i) oint D'/D dlambda, integrated per panel through the exact
/// antiderivative Log D. Panels subdivide adaptively until every phase
/// increment is below pi/3, so the branch of the logarithm is certain and a
/// zero hugging the contour cannot slip between quadrature nodes. The
/// unrounded winding must land within 0.25 of an integer; a panel that
/// cannot be refined away from a zero perturbs the rectangle (bottom edge
/// upward, the others outward) and retries.
inline int count_rect(const Problem& prob, Rect rect, double quad_tol = 0.02,
                      double shoot_tol = 1e-10) {
    for (int attempt = 0; attempt < 6; ++attempt) {
        const Complex c1(rect.re_min, rect.im_min), c2(rect.re_max, rect.im_min),
            c3(rect.re_max, rect.im_max), c4(rect.re_min, rect.im_max);
        const std::array<std::pair<Complex, Complex>, 4> sides{
            {{c1, c2}, {c2, c3}, {c3, c4}, {c4, c1}}};
        try {
            double total_phase = 0.0;
            auto Dval = [&](Complex z) {
                const Complex D = char_fn(prob, z, shoot_tol).first;
                if (std::abs(D) == 0.0) throw detail::ContourTooClose{z};
                return D;
            };
            for (const auto& [z0, z1] : sides) {
                struct Panel {
                    double t0, t1;
                    Complex D0, D1;
                };
                const int k0 = 8;
                std::vector<Panel> stack;
                Complex prev = Dval(z0);
                std::vector<Complex> seed(k0 + 1);
                seed[0] = prev;
                for (int i = 1; i <= k0; ++i)
                    seed[i] = Dval(z0 + (z1 - z0) * (static_cast<double>(i) / k0));
                for (int i = k0; i >= 1; --i)
                    stack.push_back({(i - 1.0) / k0, static_cast<double>(i) / k0,
                                     seed[i - 1], seed[i]});
                const double min_dt = 1e-9;
                while (!stack.empty()) {
                    Panel p = stack.back();
                    stack.pop_back();
                    const double dphi = std::arg(p.D1 / p.D0);
                    if (std::abs(dphi) <= M_PI / 3.0) {
                        total_phase += dphi;
                        continue;
                    }
                    if (p.t1 - p.t0 < min_dt)
                        throw detail::ContourTooClose{
                            z0 + (z1 - z0) * (0.5 * (p.t0 + p.t1))};
                    const double tm = 0.5 * (p.t0 + p.t1);
                    const Complex Dm = Dval(z0 + (z1 - z0) * tm);
                    stack.push_back({p.t0, tm, p.D0, Dm});
                    stack.push_back({tm, p.t1, Dm, p.D1});
                }
            }
            const double winding = total_phase / (2.0 * M_PI);
            const double rounded = std::round(winding);
            if (std::abs(winding - rounded) <= std::min(0.25, quad_tol * 12.5) &&
                rounded >= 0.0)
                return static_cast<int>(rounded);
            throw detail::ContourTooClose{Complex(0, 0)};
        } catch (const detail::ContourTooClose&) {
            const double dw = 0.034 * rect.width();
            const double dh = 0.034 * rect.height();
            rect = Rect{rect.re_min - dw, rect.re_max + dw,
                        rect.im_min > 0 ? rect.im_min * 1.37
                                        : rect.im_min - dh,
                        rect.im_max + dh};
        }
    }
    throw ContourError("count_rect: contour could not avoid zeros of D");
}

namespace detail {

inline Complex newton_refine(const Problem& prob, Complex z0, double tol,
                             double step_cap, bool* ok,
                             double shoot_tol = 1e-11) {
    Complex z = z0;
    double last = std::numeric_limits<double>::infinity();
    int bad = 0;
    for (int it = 0; it < 80; ++it) {
        auto [D, Dp] = char_fn(prob, z, shoot_tol);
        if (std::abs(Dp) == 0.0) break;
        Complex dz = D / Dp;
        if (std::abs(dz) > step_cap) dz *= step_cap / std::abs(dz);
        z -= dz;
        const double sz = std::abs(dz);
        if (sz <= tol * (1.0 + std::abs(z))) {
            *ok = true;
            return z;
        }
        if (sz > 0.5 * last && ++bad > 8) break;
        last = sz;
    }
    *ok = false;
    return z;
}

// Muller's method fallback on |D|, used when Newton stalls.
inline Complex muller_refine(const Problem& prob, Complex z0, double tol,
                             bool* ok) {
    const double h = 1e-3 * (1.0 + std::abs(z0));
    Complex x0 = z0 - h, x1 = z0 + h, x2 = z0;
    Complex f0 = char_fn(prob, x0).first, f1 = char_fn(prob, x1).first,
            f2 = char_fn(prob, x2).first;
    for (int it = 0; it < 60; ++it) {
        const Complex q = (x2 - x1) / (x1 - x0);
        const Complex A = q * f2 - q * (1.0 + q) * f1 + q * q * f0;
        const Complex B = (2.0 * q + 1.0) * f2 - (1.0 + q) * (1.0 + q) * f1 +
                          q * q * f0;
        const Complex C = (1.0 + q) * f2;
        Complex disc = std::sqrt(B * B - 4.0 * A * C);
        if (std::abs(B - disc) > std::abs(B + disc)) disc = -disc;
        const Complex denom = B + disc;
        if (std::abs(denom) == 0.0) break;
        const Complex x3 = x2 - (x2 - x1) * 2.0 * C / denom;
        if (std::abs(x3 - x2) <= tol * (1.0 + std::abs(x3))) {
            *ok = true;
            return x3;
        }
        x0 = x1; f0 = f1;
        x1 = x2; f1 = f2;
        x2 = x3; f2 = char_fn(prob, x3).first;
    }
    *ok = false;
    return x2;
}

}  // namespace detail

/// Locate all zeros of D inside an upper-half-plane rectangle by recursive
/// bisection on the argument-principle count, refining isolated zeros with
/// Newton on (D, D') and falling back to Muller. Returns pairs with Im > 0.
inline std::vector<Eigenpair> find_complex(const Problem& prob, Rect rect,
                                           double tol = 1e-9,
                                           Certificate* cert = nullptr,
                                           double shoot_tol = 1e-11) {
    if (!(rect.im_min > 0))
        throw std::invalid_argument("find_complex: rect must have im_min > 0");
    std::vector<Eigenpair> found;

    std::function<void(Rect, int, int)> recurse = [&](Rect r, int count,
                                                      int depth) {
        if (count == 0) return;
        const double diag = std::hypot(r.width(), r.height());
        if (count == 1 || depth > 34 || diag < 1e-8) {
            const double pad = 1e-6 * (1.0 + diag);
            const Complex center(0.5 * (r.re_min + r.re_max),
                                 0.5 * (r.im_min + r.im_max));
            // Newton from the center, then from quadrant seeds; accept only
            // a root that stays inside this cell
            std::vector<Complex> seeds{center};
            for (double fx : {0.28, 0.72})
                for (double fy : {0.28, 0.72})
                    seeds.emplace_back(r.re_min + fx * r.width(),
                                       r.im_min + fy * r.height());
            for (const Complex& seed : seeds) {
                bool ok = false;
                Complex z = detail::newton_refine(prob, seed, tol, 2.0 * diag,
                                                  &ok, shoot_tol);
                if (!ok || !r.contains(z, pad))
                    z = detail::muller_refine(prob, seed, tol, &ok);
                if (ok && r.contains(z, pad) && z.imag() > 0) {
                    Eigenpair ep;
                    ep.lambda = z;
                    ep.multiplicity = count;
                    found.push_back(std::move(ep));
                    return;
                }
            }
            // every refinement escaped the cell: shrink it further
            if (count == 1 && depth <= 34 && diag >= 1e-8) {
                // fall through to subdivision below
            } else {
                if (cert) cert->flagged.push_back(r);
                return;
            }
        }
        // split the longer side; nudge the cut if a zero sits on it
        for (int shift = 0; shift < 4; ++shift) {
            const double fr = 0.5 + 0.037 * shift;
            Rect ra = r, rb = r;
            if (r.width() >= r.height()) {
                const double mid = r.re_min + fr * r.width();
                ra.re_max = mid;
                rb.re_min = mid;
            } else {
                const double mid = r.im_min + fr * r.height();
                ra.im_max = mid;
                rb.im_min = mid;
            }
            try {
                const int ca = count_rect(prob, ra, 0.02, shoot_tol);
                const int cb = count_rect(prob, rb, 0.02, shoot_tol);
                if (ca + cb != count) continue;  // a zero on the cut; nudge
                recurse(ra, ca, depth + 1);
                recurse(rb, cb, depth + 1);
                return;
            } catch (const ContourError&) {
                continue;
            }
        }
        if (cert) cert->flagged.push_back(r);
    };

    const int total = count_rect(prob, rect, 0.02, shoot_tol);
    recurse(rect, total, 0);

    // dedupe roots that two neighboring cells refined to the same point
    std::sort(found.begin(), found.end(), [](const Eigenpair& a, const Eigenpair& b) {
        return a.lambda.real() != b.lambda.real()
                   ? a.lambda.real() < b.lambda.real()
                   : a.lambda.imag() < b.lambda.imag();
    });
    std::vector<Eigenpair> unique;
    for (auto& ep : found) {
        if (!unique.empty() &&
            std::abs(unique.back().lambda - ep.lambda) <=
                1e-6 * (1.0 + std::abs(ep.lambda))) {
            continue;  // same zero found twice through adjacent cells
        }
        unique.push_back(std::move(ep));
    }
    return unique;
}

namespace detail {

// WKB phase estimate: Theta(lambda) = int sqrt(max((lambda w - q)/p, 0)).
inline double wkb_phase(const Problem& prob, double lambda) {
    double theta = 0.0;
    const auto bps = prob.breakpoints();
    for (std::size_t s = 0; s + 1 < bps.size(); ++s) {
        const int n = 24;
        const double h = (bps[s + 1] - bps[s]) / n;
        for (int i = 0; i < n; ++i) {
            const double x = bps[s] + (i + 0.5) * h;
            const double v =
                (lambda * prob.w.eval(x) - prob.q.eval(x)) / prob.p.eval(x);
            if (v > 0) theta += std::sqrt(v) * h;
        }
    }
    return theta;
}

}  // namespace detail

struct ScanOptions {
    double tol = 1e-9;           // lambda refinement tolerance (relative)
    double shoot_tol = 1e-10;
    double tangency_rel = 1e-6;  // |D| dip threshold vs local scale
    int max_refine_depth = 9;
};

/// All real eigenvalues in range: adaptive grid on D with sign-change
/// bracketing; local minima of |D| without a sign change are recursively
/// refined and, when they persist, resolved through count_rect on a small
/// straddling box (even-order zeros and close pairs).
inline std::vector<Eigenpair> scan_real(const Problem& prob, Interval range,
                                        const ScanOptions& opts = {},
                                        Certificate* cert = nullptr) {
    struct Node {
        double lam, D, Dp;
    };
    auto probe = [&](double lam) -> Node {
        auto [D, Dp] = char_fn(prob, lam, opts.shoot_tol);
        return {lam, D.real(), Dp.real()};
    };

    // grid: phase-density based step with an absolute cap in the low range
    std::vector<Node> nodes;
    {
        double lam = range.a + 1.2345678901e-4;  // keep exact zeros off-node
        const double dl = 0.01;
        while (lam < range.b) {
            nodes.push_back(probe(lam));
            const double th0 = detail::wkb_phase(prob, lam);
            const double th1 = detail::wkb_phase(prob, lam + dl);
            const double dens = std::abs(th1 - th0) / dl;
            double step = (dens > 1e-4) ? (M_PI / 3.0) / dens : 1e30;
            step = std::clamp(step, 0.05,
                              std::max(0.4, 0.02 * (1.0 + std::abs(lam))));
            lam += step;
        }
        nodes.push_back(probe(range.b));
    }

    std::vector<std::pair<Node, Node>> brackets;
    std::vector<Eigenpair> out;

    auto refine_bracket = [&](Node lo, Node hi) {
        auto f = [&](double l) { return char_fn(prob, l, opts.shoot_tol).first.real(); };
        double root = brent_root(f, lo.lam, hi.lam, lo.D, hi.D,
                                 opts.tol * (1.0 + std::abs(lo.lam)));
        // Newton polish with the analytic derivative
        for (int i = 0; i < 3; ++i) {
            auto [D, Dp] = char_fn(prob, root, opts.shoot_tol);
            if (std::abs(Dp.real()) == 0.0) break;
            const double step = D.real() / Dp.real();
            const double next = root - step;
            if (next <= lo.lam || next >= hi.lam) break;
            root = next;
            if (std::abs(step) <= 1e-14 * (1.0 + std::abs(root))) break;
        }
        Eigenpair ep;
        ep.lambda = root;
        ep.multiplicity = 1;
        out.push_back(std::move(ep));
    };

    // tangency resolution: |D| dip without a sign change. Sign information
    // below the integration noise floor is meaningless, so brackets are only
    // trusted when both endpoints clear it.
    std::function<void(Node, Node, Node, int, double)> resolve_dip =
        [&](Node a, Node /*m*/, Node b, int depth, double prev_min) {
        std::vector<Node> fine{a};
        for (int i = 1; i < 8; ++i)
            fine.push_back(probe(a.lam + i * (b.lam - a.lam) / 8.0));
        fine.push_back(b);
        const double flank = std::max(std::abs(fine.front().D),
                                      std::abs(fine.back().D));
        const double noise_floor = 40.0 * opts.shoot_tol * (1.0 + flank);
        bool found_sign = false;
        for (std::size_t i = 0; i + 1 < fine.size(); ++i) {
            if (std::abs(fine[i].D) > noise_floor &&
                std::abs(fine[i + 1].D) > noise_floor &&
                fine[i].D * fine[i + 1].D < 0.0) {
                found_sign = true;
                refine_bracket(fine[i], fine[i + 1]);
            }
        }
        if (found_sign) return;
        std::size_t k = 0;
        for (std::size_t i = 1; i < fine.size(); ++i)
            if (std::abs(fine[i].D) < std::abs(fine[k].D)) k = i;
        if (k == 0 || k + 1 == fine.size()) return;  // dip drifted out
        const double dip = std::abs(fine[k].D);
        const bool saturated = depth >= 2 && dip > 0.45 * prev_min;
        if (depth < opts.max_refine_depth && !saturated && dip > noise_floor &&
            dip > opts.tangency_rel * flank) {
            resolve_dip(fine[k - 1], fine[k], fine[k + 1], depth + 1, dip);
            return;
        }
        // persistent tangency: count a small straddling box
        const double lc = fine[k].lam;
        const double r = std::max(4.0 * (fine[k + 1].lam - fine[k - 1].lam),
                                  1e-5 * (1.0 + std::abs(lc)));
        int boxcount = 0;
        try {
            boxcount = count_rect(prob, Rect{lc - r, lc + r, -r, r}, 0.02,
                                  opts.shoot_tol);
        } catch (const ContourError&) {
            if (cert) cert->flagged_real.push_back(lc);
            return;
        }
        if (boxcount == 0) return;  // spurious dip (e.g. a far off-axis pair)
        // try a real zero of D' (even-order real eigenvalue)
        double l0 = lc;
        for (int it = 0; it < 60; ++it) {
            const auto Dp = char_fn(prob, l0, opts.shoot_tol).second.real();
            const double h = 1e-6 * (1.0 + std::abs(l0));
            const double dpp =
                (char_fn(prob, l0 + h, opts.shoot_tol).second.real() -
                 char_fn(prob, l0 - h, opts.shoot_tol).second.real()) /
                (2.0 * h);
            if (dpp == 0.0) break;
            const double step = Dp / dpp;
            l0 -= step;
            if (std::abs(step) <= 1e-13 * (1.0 + std::abs(l0))) break;
        }
        const double Dat = std::abs(char_fn(prob, l0, opts.shoot_tol).first);
        if (boxcount % 2 == 0 && std::abs(l0 - lc) <= 4.0 * r &&
            Dat <= std::max(1e-7 * flank, noise_floor)) {
            Eigenpair ep;  // even-order real zero
            ep.lambda = l0;
            ep.multiplicity = boxcount;
            out.push_back(std::move(ep));
        } else {
            // a genuinely complex pair hugging the axis; refine off-axis
            bool ok = false;
            Complex z = detail::newton_refine(prob, Complex(lc, r), opts.tol,
                                              10.0 * r, &ok, opts.shoot_tol);
            if (ok && z.imag() > 0) {
                Eigenpair ep;
                ep.lambda = z;
                ep.multiplicity = boxcount / 2;
                out.push_back(std::move(ep));  // routed to complex list later
            } else if (cert) {
                cert->flagged_real.push_back(lc);
            }
        }
    };

    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (nodes[i].D == 0.0) {
            Eigenpair ep;
            ep.lambda = nodes[i].lam;
            out.push_back(std::move(ep));
            continue;
        }
        if (nodes[i].D * nodes[i + 1].D < 0.0)
            refine_bracket(nodes[i], nodes[i + 1]);
    }
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
        const bool dip = std::abs(nodes[i].D) < std::abs(nodes[i - 1].D) &&
                         std::abs(nodes[i].D) < std::abs(nodes[i + 1].D);
        const bool same_sign = nodes[i - 1].D * nodes[i].D > 0.0 &&
                               nodes[i].D * nodes[i + 1].D > 0.0;
        if (dip && same_sign)
            resolve_dip(nodes[i - 1], nodes[i], nodes[i + 1], 0,
                        std::abs(nodes[i].D));
    }

    std::sort(out.begin(), out.end(), [](const Eigenpair& x, const Eigenpair& y) {
        return x.lambda.real() < y.lambda.real();
    });
    std::vector<Eigenpair> unique;
    for (auto& ep : out) {
        if (!unique.empty() && ep.is_real() && unique.back().is_real() &&
            std::abs(unique.back().lambda.real() - ep.lambda.real()) <=
                10.0 * opts.tol * (1.0 + std::abs(ep.lambda.real())))
            continue;
        unique.push_back(std::move(ep));
    }
    return unique;
}

namespace detail {

inline void attach_eigenfunction(const Problem& prob, Eigenpair& ep,
                                 double shoot_tol) {
    ShootOptions opts;
    opts.tol = shoot_tol;
    opts.keep_trajectory = true;
    ShotSolution sol = shoot(prob, ep.lambda, opts);
    ep.residual = std::abs(sol.D);
    ep.newton_decrement =
        std::abs(sol.D) / std::max(1.0, std::abs(sol.D_prime));
    // normalize: value at the max-|y| node becomes exactly 1
    std::size_t k = 0;
    for (std::size_t i = 0; i < sol.y.size(); ++i)
        if (std::abs(sol.y[i]) > std::abs(sol.y[k])) k = i;
    const Complex scale = sol.y[k];
    if (std::abs(scale) > 0) {
        for (auto* arr : {&sol.y, &sol.py_prime, &sol.y_deriv, &sol.py_deriv})
            for (auto& v : *arr) v /= scale;
        sol.D /= scale;
        sol.D_prime /= scale;
        sol.norm_scale = scale;
    }
    if (ep.is_real())  // drop integration-noise imaginary parts
        for (auto* arr : {&sol.y, &sol.py_prime, &sol.y_deriv, &sol.py_deriv})
            for (auto& v : *arr) v = Complex(v.real(), 0.0);
    ep.eigenfunction = std::move(sol);
}

}  // namespace detail

/// Compose scan_real + find_complex + the completeness certificate.
/// Oscillation counts and ghost classes are filled afterwards by the
/// classification layer (see annotate_inventory).
inline SpectralInventory build_inventory(const Problem& prob,
                                         const SpectralWindow& window,
                                         double tol = 1e-9,
                                         double shoot_tol = 1e-10) {
    SpectralInventory inv;
    ScanOptions sopts;
    sopts.tol = tol;
    sopts.shoot_tol = shoot_tol;
    auto real_candidates =
        scan_real(prob, window.real_range, sopts, &inv.certificate);
    for (auto& ep : real_candidates) {
        if (ep.is_real())
            inv.real_pairs.push_back(std::move(ep));
        else if (ep.lambda.imag() > 0)
            inv.complex_pairs.push_back(std::move(ep));  // near-axis pair
    }
    auto cpx = find_complex(prob, window.complex_rect, tol, &inv.certificate,
                            shoot_tol);
    for (auto& ep : cpx) {
        bool dup = false;
        for (const auto& have : inv.complex_pairs)
            if (std::abs(have.lambda - ep.lambda) <=
                1e-6 * (1.0 + std::abs(ep.lambda)))
                dup = true;
        if (!dup) inv.complex_pairs.push_back(std::move(ep));
    }
    std::sort(inv.complex_pairs.begin(), inv.complex_pairs.end(),
              [](const Eigenpair& a, const Eigenpair& b) {
                  return a.lambda.real() != b.lambda.real()
                             ? a.lambda.real() < b.lambda.real()
                             : a.lambda.imag() < b.lambda.imag();
              });

    for (auto& ep : inv.real_pairs) detail::attach_eigenfunction(prob, ep, shoot_tol);
    for (auto& ep : inv.complex_pairs) detail::attach_eigenfunction(prob, ep, shoot_tol);

    // certificate
    inv.certificate.rect_count =
        count_rect(prob, window.complex_rect, 0.02, shoot_tol);
    int found = 0;
    double conj_res = 0.0;
    for (const auto& ep : inv.complex_pairs) {
        if (window.complex_rect.contains(ep.lambda)) found += ep.multiplicity;
        conj_res = std::max(conj_res,
                            std::abs(char_fn(prob, std::conj(ep.lambda), shoot_tol)
                                         .first));
    }
    inv.certificate.found_count = found;
    inv.certificate.match = (found == inv.certificate.rect_count) &&
                            inv.certificate.flagged.empty();
    inv.certificate.max_conjugate_residual = conj_res;
    return inv;
}

}  // namespace ndsl
