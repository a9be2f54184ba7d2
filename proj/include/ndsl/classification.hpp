#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ndsl/coefficients.hpp"
#include "ndsl/ghost.hpp"
#include "ndsl/shooting.hpp"
#include "ndsl/spectrum.hpp"

namespace ndsl {

struct IntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Co-integrate several shooting solutions (y_k, py'_k) from the same left
/// endpoint together with quadrature accumulators whose derivatives are
/// functions of x and the current states. Quadrature inherits the ODE
/// tolerance instead of relying on trajectory interpolation.
struct CoResult {
    std::vector<Complex> y_end;
    std::vector<Complex> integrals;
};

using CoIntegrand = std::function<Complex(
    double x, double p, double q, double w, const std::vector<Complex>& y,
    const std::vector<Complex>& py)>;

inline CoResult co_integrate(const Problem& prob,
                             const std::vector<Complex>& lambdas,
                             const std::vector<Complex>& py_init,
                             const std::vector<CoIntegrand>& quads,
                             double tol = 1e-11) {
    const std::size_t K = lambdas.size(), M = quads.size();
    std::vector<Complex> state(2 * K + M, 0.0);
    for (std::size_t k = 0; k < K; ++k) state[2 * k + 1] = py_init[k];

    std::vector<Complex> ytmp(K), pytmp(K);
    auto rhs = [&](const Segment& ps, const Segment& qs, const Segment& ws,
                   double x, const std::vector<Complex>& s,
                   std::vector<Complex>& ds) {
        const double pv = ps.eval(x), qv = qs.eval(x), wv = ws.eval(x);
        for (std::size_t k = 0; k < K; ++k) {
            ds[2 * k] = s[2 * k + 1] / pv;
            ds[2 * k + 1] = (qv - lambdas[k] * wv) * s[2 * k];
            ytmp[k] = s[2 * k];
            pytmp[k] = s[2 * k + 1];
        }
        for (std::size_t m = 0; m < M; ++m)
            ds[2 * K + m] = quads[m](x, pv, qv, wv, ytmp, pytmp);
    };

    double maxmod = 0.0;
    for (const auto& l : lambdas) maxmod = std::max(maxmod, std::abs(l));
    const auto bps = prob.breakpoints();
    using T = DP45;
    for (std::size_t seg = 0; seg + 1 < bps.size(); ++seg) {
        const double x0 = bps[seg], x1 = bps[seg + 1];
        const double mid = 0.5 * (x0 + x1);
        const Segment& ps = prob.p.segments()[prob.p.segment_index(mid)];
        const Segment& qs = prob.q.segments()[prob.q.segment_index(mid)];
        const Segment& ws = prob.w.segments()[prob.w.segment_index(mid)];
        Interval segiv(x0, x1);
        const double rate = std::max(1.0 / prob.p.min_max(segiv).first,
                                     maxmod * prob.w.sup_abs(segiv) +
                                         prob.q.sup_abs(segiv));
        const double hcap = std::min(0.45 * M_PI / rate, (x1 - x0) / 8.0);
        double x = x0, h = std::min(hcap, (x1 - x0) / 16.0);
        std::vector<Complex> k1(state.size()), k2(state.size()), k3(state.size()),
            k4(state.size()), k5(state.size()), k6(state.size()), k7(state.size()),
            tmp(state.size()), y5(state.size());
        while (x < x1) {
            if (x + h > x1) h = x1 - x;
            if (h < 1e-14 * (1.0 + std::abs(x)))
                throw IntegrationError("co_integrate: step underflow", x);
            rhs(ps, qs, ws, x, state, k1);
            auto stage = [&](std::initializer_list<std::pair<const std::vector<Complex>*, double>> terms,
                             double cx, std::vector<Complex>& out) {
                for (std::size_t i = 0; i < state.size(); ++i) {
                    Complex acc = state[i];
                    for (const auto& [kv, cf] : terms) acc += h * cf * (*kv)[i];
                    tmp[i] = acc;
                }
                rhs(ps, qs, ws, x + cx * h, tmp, out);
            };
            stage({{&k1, T::a21}}, T::c2, k2);
            stage({{&k1, T::a31}, {&k2, T::a32}}, T::c3, k3);
            stage({{&k1, T::a41}, {&k2, T::a42}, {&k3, T::a43}}, T::c4, k4);
            stage({{&k1, T::a51}, {&k2, T::a52}, {&k3, T::a53}, {&k4, T::a54}},
                  T::c5, k5);
            stage({{&k1, T::a61}, {&k2, T::a62}, {&k3, T::a63}, {&k4, T::a64},
                   {&k5, T::a65}},
                  1.0, k6);
            for (std::size_t i = 0; i < state.size(); ++i)
                y5[i] = state[i] + h * (T::b1 * k1[i] + T::b3 * k3[i] +
                                        T::b4 * k4[i] + T::b5 * k5[i] +
                                        T::b6 * k6[i]);
            rhs(ps, qs, ws, x + h, y5, k7);
            double err = 0.0;
            for (std::size_t i = 0; i < state.size(); ++i) {
                const Complex e = h * (T::e1 * k1[i] + T::e3 * k3[i] +
                                       T::e4 * k4[i] + T::e5 * k5[i] +
                                       T::e6 * k6[i] + T::e7 * k7[i]);
                err = std::max(err, std::abs(e) / (tol * (1.0 + std::abs(y5[i]))));
            }
            if (err <= 1.0) {
                x += h;
                state = y5;
                h = std::min(h * std::clamp(err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0,
                                            0.2, 5.0),
                             hcap);
            } else {
                h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            }
        }
    }
    CoResult res;
    for (std::size_t k = 0; k < K; ++k) res.y_end.push_back(state[2 * k]);
    for (std::size_t m = 0; m < M; ++m) res.integrals.push_back(state[2 * K + m]);
    return res;
}

}  // namespace detail

/// Number of interior zeros of a real eigenfunction, by sign changes over
/// the dense trajectory. Step control keeps the Prufer phase advance under
/// pi/2 per node, so no zero can hide between nodes; endpoint zeros are
/// excluded and simplicity of each zero is asserted through |py'|.
inline int oscillation_count(const Eigenpair& e) {
    if (!e.is_real())
        throw std::invalid_argument("oscillation_count: lambda must be real");
    const ShotSolution& s = e.eigenfunction;
    const double ymax = s.max_abs_y();
    double pymax = 0.0;
    for (const auto& v : s.py_prime) pymax = std::max(pymax, std::abs(v));
    const double floor_y = 1e-11 * ymax;
    int count = 0;
    int last_sign = 0;
    std::size_t last_idx = 0;
    for (std::size_t i = 1; i + 1 < s.grid.size(); ++i) {
        const double yv = s.y[i].real();
        if (std::abs(yv) <= floor_y) continue;
        const int sign = yv > 0 ? 1 : -1;
        if (last_sign != 0 && sign != last_sign) {
            // simplicity: py' must stay away from zero across the bracket
            const double pmin = std::min(std::abs(s.py_prime[last_idx]),
                                         std::abs(s.py_prime[i]));
            if (pmin <= 1e-9 * pymax)
                throw IntegrityError(
                    "oscillation_count: y and py' nearly vanish together");
            ++count;
        }
        last_sign = sign;
        last_idx = i;
    }
    return count;
}

/// Quadratic forms of an eigenfunction, accumulated inside the integrator
/// (derivative values come from py'/p, never finite differences).
inline FormValues form_values(const Problem& prob, const Eigenpair& e,
                              double tol = 1e-11) {
    using detail::CoIntegrand;
    const Complex lam = e.lambda;
    std::vector<CoIntegrand> quads;
    // phi^2 w
    quads.push_back([](double, double, double, double w,
                       const std::vector<Complex>& y,
                       const std::vector<Complex>&) { return y[0] * y[0] * w; });
    // |phi|^2 w
    quads.push_back([](double, double, double, double w,
                       const std::vector<Complex>& y,
                       const std::vector<Complex>&) {
        return Complex(std::norm(y[0]) * w, 0.0);
    });
    // p|phi'|^2 + q|phi|^2
    quads.push_back([](double, double p, double q, double,
                       const std::vector<Complex>& y,
                       const std::vector<Complex>& py) {
        return Complex(std::norm(py[0]) / p + q * std::norm(y[0]), 0.0);
    });
    // |phi|^2 |w|
    quads.push_back([](double, double, double, double w,
                       const std::vector<Complex>& y,
                       const std::vector<Complex>&) {
        return Complex(std::norm(y[0]) * std::abs(w), 0.0);
    });
    // |phi|^2
    quads.push_back([](double, double, double, double,
                       const std::vector<Complex>& y,
                       const std::vector<Complex>&) {
        return Complex(std::norm(y[0]), 0.0);
    });

    auto run = [&](double t) {
        return detail::co_integrate(prob, {lam}, {Complex(1.0, 0.0)}, quads, t);
    };
    const auto fine = run(tol);
    const auto coarse = run(tol * 100.0);

    // the eigenfunction is the raw IVP solution divided by its norm scale
    const Complex s = e.eigenfunction.norm_scale;
    const Complex s2 = s * s;
    const double sa = std::norm(s);
    FormValues fv;
    fv.weighted_sq = fine.integrals[0] / s2;
    fv.weighted_abs = fine.integrals[1].real() / sa;
    fv.dirichlet = fine.integrals[2].real() / sa;
    fv.abs_scale = fine.integrals[3].real() / sa;
    fv.norm_sq = fine.integrals[4].real() / sa;
    double qe = 0.0;
    qe = std::max(qe, std::abs(fine.integrals[0] / s2 - coarse.integrals[0] / s2));
    for (int m = 1; m < 5; ++m)
        qe = std::max(qe, std::abs(fine.integrals[m] - coarse.integrals[m]) / sa);
    fv.quad_error = qe;
    if (e.is_real()) fv.weighted_sq = Complex(fv.weighted_sq.real(), 0.0);
    return fv;
}

/// Ghost taxonomy from the weighted square form, relative to
/// scale = int |phi|^2 |w|. Real lambda: |int u^2 w| <= tol*scale is a
/// degenerate real ghost, lambda*int u^2 w < 0 a non-degenerate one,
/// positive sign ordinary. Complex lambda: degenerate iff |int phi^2 w|
/// is below the band.
inline GhostClass classify(const Problem& prob, const Eigenpair& e,
                           double tol_deg = 1e-4) {
    (void)prob;
    if (!e.ghost_form.has_value())
        throw std::logic_error("classify: form_values not computed");
    const FormValues& fv = *e.ghost_form;
    GhostClass gc;
    const double scale = std::max(fv.abs_scale, 1e-300);
    if (e.is_real()) {
        const double ws = fv.weighted_sq.real();
        const double lam = e.lambda.real();
        if (std::abs(ws) <= tol_deg * scale) {
            gc.tag = GhostTag::degenerate_real_ghost;
            gc.borderline = std::abs(ws) >= 0.5 * tol_deg * scale ||
                            std::abs(ws) <= 4.0 * fv.quad_error;
        } else if (lam * ws < -tol_deg * scale) {
            gc.tag = GhostTag::nondegenerate_real_ghost;
        } else if (lam * ws > tol_deg * scale) {
            gc.tag = GhostTag::ordinary;
        } else {
            // lambda ~ 0 with nonzero weighted_sq: sign test is mute
            gc.tag = GhostTag::ordinary;
            gc.zero_eigenvalue = true;
        }
        if (lam == 0.0) gc.zero_eigenvalue = true;
        if (e.osc_count.has_value() && *e.osc_count == 0) gc.ground_state = true;
    } else {
        const double ws = std::abs(fv.weighted_sq);
        gc.tag = ws <= tol_deg * scale ? GhostTag::complex_ghost_degenerate
                                       : GhostTag::complex_ghost_nondegenerate;
    }
    return gc;
}

struct OrthogonalityEntry {
    std::size_t i, j;     // indices into the combined [real..., complex...] list
    std::string kind;     // L1_weighted, L2_weighted_conj, L2_dirichlet,
                          // L2_weighted, E5_weighted, E5_dirichlet, RR_weighted
    double residual;      // |integral| / (||phi_i|| * ||phi_j||)
};

/// Numerical residuals of the orthogonality lemmas over a certified
/// inventory, normalized by the product of unweighted L2 norms.
inline std::vector<OrthogonalityEntry> orthogonality_residuals(
    const Problem& prob, const SpectralInventory& inv, double tol = 1e-11) {
    using detail::CoIntegrand;
    std::vector<const Eigenpair*> all;
    for (const auto& e : inv.real_pairs) all.push_back(&e);
    for (const auto& e : inv.complex_pairs) all.push_back(&e);
    const std::size_t nreal = inv.real_pairs.size();
    std::vector<OrthogonalityEntry> out;
    if (all.size() < 2) return out;

    auto pair_integrals = [&](const Eigenpair& A, const Eigenpair& B) {
        std::vector<CoIntegrand> quads;
        // phi_a phi_b w
        quads.push_back([](double, double, double, double w,
                           const std::vector<Complex>& y,
                           const std::vector<Complex>&) {
            return y[0] * y[1] * w;
        });
        // phi_a conj(phi_b) w
        quads.push_back([](double, double, double, double w,
                           const std::vector<Complex>& y,
                           const std::vector<Complex>&) {
            return y[0] * std::conj(y[1]) * w;
        });
        // p phi_a' conj(phi_b') + q phi_a conj(phi_b)
        quads.push_back([](double, double p, double q, double,
                           const std::vector<Complex>& y,
                           const std::vector<Complex>& py) {
            return py[0] * std::conj(py[1]) / p + q * y[0] * std::conj(y[1]);
        });
        quads.push_back([](double, double, double, double,
                           const std::vector<Complex>& y,
                           const std::vector<Complex>&) {
            return Complex(std::norm(y[0]), 0.0);
        });
        quads.push_back([](double, double, double, double,
                           const std::vector<Complex>& y,
                           const std::vector<Complex>&) {
            return Complex(std::norm(y[1]), 0.0);
        });
        auto res = detail::co_integrate(prob, {A.lambda, B.lambda},
                                        {Complex(1.0), Complex(1.0)}, quads, tol);
        const Complex sa = A.eigenfunction.norm_scale;
        const Complex sb = B.eigenfunction.norm_scale;
        struct R {
            Complex ww, wc, dir;
            double na, nb;
        } r;
        r.ww = res.integrals[0] / (sa * sb);
        r.wc = res.integrals[1] / (sa * std::conj(sb));
        r.dir = res.integrals[2] / (sa * std::conj(sb));
        r.na = std::sqrt(res.integrals[3].real() / std::norm(sa));
        r.nb = std::sqrt(res.integrals[4].real() / std::norm(sb));
        return r;
    };

    const double sep = 1e-6;
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            const Eigenpair& A = *all[i];
            const Eigenpair& B = *all[j];
            const auto r = pair_integrals(A, B);
            const double nn = std::max(r.na * r.nb, 1e-300);
            const bool a_real = i < nreal, b_real = j < nreal;
            const Complex la = A.lambda, lb = B.lambda;
            if (a_real && b_real) {
                if (std::abs(la - lb) > sep * (1.0 + std::abs(la)))
                    out.push_back({i, j, "RR_weighted", std::abs(r.ww) / nn});
            } else if (a_real != b_real) {
                out.push_back({i, j, "L1_weighted", std::abs(r.ww) / nn});
            } else {
                if (std::abs(la - std::conj(lb)) > sep * (1.0 + std::abs(la))) {
                    out.push_back({i, j, "L2_weighted_conj", std::abs(r.wc) / nn});
                    out.push_back({i, j, "L2_dirichlet", std::abs(r.dir) / nn});
                }
                if (std::abs(la - lb) > sep * (1.0 + std::abs(la)))
                    out.push_back({i, j, "L2_weighted", std::abs(r.ww) / nn});
            }
        }
    }
    // Eq. (5) self-identities for every non-real pair
    for (std::size_t j = nreal; j < all.size(); ++j) {
        const Eigenpair& e = *all[j];
        if (!e.ghost_form.has_value()) continue;
        const FormValues& fv = *e.ghost_form;
        const double nn = std::max(fv.norm_sq, 1e-300);
        out.push_back({j, j, "E5_weighted", std::abs(fv.weighted_abs) / nn});
        out.push_back({j, j, "E5_dirichlet", std::abs(fv.dirichlet) / nn});
    }
    return out;
}

/// Smooth test multiplier for the minimum principle: a polynomial in x.
struct TestMultiplier {
    std::vector<double> coeffs;  // c0 + c1 x + ...
    double eval(double x) const {
        double v = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;) v = v * x + coeffs[i];
        return v;
    }
    double deriv(double x) const {
        double v = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 1;)
            v = v * x + coeffs[i] * static_cast<double>(i);
        return v;
    }
};

struct GapResult {
    double gap;          // int p|phi'|^2+q|phi|^2 - lambda int |phi|^2 w
    double eta_term;     // int p u^2 |eta'|^2, the exact value of the gap
    double quad_error;
};

/// Minimum-principle gap for phi = u * eta with u a real eigenfunction.
/// Nonnegative up to quadrature error; zero iff eta is constant.
inline GapResult quadratic_form_gap(const Problem& prob, const Eigenpair& e,
                                    const TestMultiplier& eta,
                                    double tol = 1e-11) {
    if (!e.is_real())
        throw std::invalid_argument("quadratic_form_gap: real eigenpairs only");
    using detail::CoIntegrand;
    const double lam = e.lambda.real();
    std::vector<CoIntegrand> quads;
    // p|phi'|^2 + q|phi|^2 with phi = u eta, phi' = u' eta + u eta'
    quads.push_back([&eta](double x, double p, double q, double,
                           const std::vector<Complex>& y,
                           const std::vector<Complex>& py) {
        const double ev = eta.eval(x), ed = eta.deriv(x);
        const Complex phi = y[0] * ev;
        const Complex phip = py[0] / p * ev + y[0] * ed;
        return Complex(p * std::norm(phip) + q * std::norm(phi), 0.0);
    });
    quads.push_back([&eta](double x, double, double, double w,
                           const std::vector<Complex>& y,
                           const std::vector<Complex>&) {
        const double ev = eta.eval(x);
        return Complex(std::norm(y[0] * ev) * w, 0.0);
    });
    quads.push_back([&eta](double x, double p, double, double,
                           const std::vector<Complex>& y,
                           const std::vector<Complex>&) {
        const double ed = eta.deriv(x);
        return Complex(p * std::norm(y[0]) * ed * ed, 0.0);
    });
    auto run = [&](double t) {
        return detail::co_integrate(prob, {e.lambda}, {Complex(1.0)}, quads, t);
    };
    const auto fine = run(tol);
    const auto coarse = run(tol * 100.0);
    const double sa = std::norm(e.eigenfunction.norm_scale);
    GapResult g;
    g.gap = (fine.integrals[0].real() - lam * fine.integrals[1].real()) / sa;
    g.eta_term = fine.integrals[2].real() / sa;
    g.quad_error = 0.0;
    for (int m = 0; m < 3; ++m)
        g.quad_error = std::max(
            g.quad_error, std::abs(fine.integrals[m] - coarse.integrals[m]) / sa);
    g.quad_error = std::max(g.quad_error, 1e-12 * (1.0 + std::abs(g.gap)));
    return g;
}

/// Fill oscillation counts, quadratic forms, and ghost classes across an
/// inventory (the composition step after build_inventory).
inline void annotate_inventory(const Problem& prob, SpectralInventory& inv,
                               double tol_deg = 1e-4, double tol = 1e-11) {
    for (auto& e : inv.real_pairs) {
        e.osc_count = oscillation_count(e);
        e.ghost_form = form_values(prob, e, tol);
        e.ghost = classify(prob, e, tol_deg);
    }
    for (auto& e : inv.complex_pairs) {
        e.ghost_form = form_values(prob, e, tol);
        e.ghost = classify(prob, e, tol_deg);
    }
}

}  // namespace ndsl
