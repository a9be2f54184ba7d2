#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndsl/coefficients.hpp"

namespace ndsl {

struct NotSupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Finite-difference pencil A y = lambda W y on a breakpoint-aligned mesh.
/// A is the symmetric tridiagonal flux-form discretization of -(py')' + q
/// (rows scaled by the dual-cell width so piecewise-uniform meshes keep the
/// symmetry); W is diagonal with the node w values times the same widths.
struct DiscreteOperator {
    int n_interior = 0;
    std::vector<double> diag;      // A diagonal
    std::vector<double> offdiag;   // A subdiagonal (size n-1)
    std::vector<double> weight;    // W diagonal
    std::vector<double> nodes;     // interior node coordinates
    double h = 0.0;                // representative mesh width (largest)
};

inline DiscreteOperator discretize(const Problem& prob, int n_interior,
                                   double eps_w = 1e-12) {
    if (n_interior < 3)
        throw std::invalid_argument("discretize: n_interior >= 3 required");
    const auto bps = prob.breakpoints();
    const double len = prob.interval.width();
    // per-segment uniform meshes so every breakpoint is a node
    std::vector<double> nodes;  // all nodes including endpoints
    nodes.push_back(bps.front());
    double hmax = 0.0;
    for (std::size_t s = 0; s + 1 < bps.size(); ++s) {
        const double L = bps[s + 1] - bps[s];
        const int k = std::max(
            1, static_cast<int>(std::lround((n_interior + 1) * L / len)));
        hmax = std::max(hmax, L / k);
        for (int i = 1; i <= k; ++i) nodes.push_back(bps[s] + L * i / k);
    }
    const int n = static_cast<int>(nodes.size()) - 2;
    if (n < 3) throw std::invalid_argument("discretize: mesh too coarse");

    DiscreteOperator op;
    op.n_interior = n;
    op.h = hmax;
    op.diag.resize(n);
    op.offdiag.resize(n - 1);
    op.weight.resize(n);
    op.nodes.assign(nodes.begin() + 1, nodes.end() - 1);
    for (int i = 0; i < n; ++i) {
        const double xl = nodes[i], xc = nodes[i + 1], xr = nodes[i + 2];
        const double hl = xc - xl, hr = xr - xc;
        const double pl = prob.p.eval(0.5 * (xl + xc));
        const double pr = prob.p.eval(0.5 * (xc + xr));
        const double cell = 0.5 * (hl + hr);
        const double wv = prob.w.eval(xc);
        if (std::abs(wv) <= eps_w)
            throw NotSupportedError(
                "discretize: w vanishes at a mesh node (restriction of the "
                "matrix oracle)");
        op.diag[i] = pl / hl + pr / hr + prob.q.eval(xc) * cell;
        if (i + 1 < n) op.offdiag[i] = -pr / hr;
        op.weight[i] = wv * cell;
    }
    return op;
}

namespace detail {

/// Dense real non-symmetric eigensolver: balancing, Householder reduction to
/// upper Hessenberg form, implicitly shifted Francis double-shift QR with
/// deflation. Eigenvalues only.
class DenseEigenSolver {
  public:
    explicit DenseEigenSolver(std::vector<double> a, int n)
        : n_(n), a_(std::move(a)) {}

    std::vector<std::complex<double>> eigenvalues() {
        balance();
        hessenberg();
        return francis_qr();
    }

  private:
    double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    void balance() {
        const double radix = 2.0;
        bool done = false;
        while (!done) {
            done = true;
            for (int i = 0; i < n_; ++i) {
                double r = 0.0, c = 0.0;
                for (int j = 0; j < n_; ++j) {
                    if (j == i) continue;
                    c += std::abs(at(j, i));
                    r += std::abs(at(i, j));
                }
                if (c == 0.0 || r == 0.0) continue;
                double g = r / radix, f = 1.0, s = c + r;
                while (c < g) {
                    f *= radix;
                    c *= radix * radix;
                }
                g = r * radix;
                while (c > g) {
                    f /= radix;
                    c /= radix * radix;
                }
                if ((c + r) / f < 0.95 * s) {
                    done = false;
                    const double ginv = 1.0 / f;
                    for (int j = 0; j < n_; ++j) at(i, j) *= ginv;
                    for (int j = 0; j < n_; ++j) at(j, i) *= f;
                }
            }
        }
    }

    void hessenberg() {
        for (int k = 1; k + 1 < n_; ++k) {
            // Householder vector annihilating a_[k+1..n-1][k-1]
            double scale = 0.0;
            for (int i = k; i < n_; ++i) scale += std::abs(at(i, k - 1));
            if (scale == 0.0) continue;
            double h = 0.0;
            std::vector<double> v(n_, 0.0);
            for (int i = k; i < n_; ++i) {
                v[i] = at(i, k - 1) / scale;
                h += v[i] * v[i];
            }
            double g = -std::copysign(std::sqrt(h), v[k]);
            h -= v[k] * g;
            v[k] -= g;
            if (h == 0.0) continue;
            // apply (I - vv^T/h) from left and right
            for (int j = 0; j < n_; ++j) {
                double f = 0.0;
                for (int i = k; i < n_; ++i) f += v[i] * at(i, j);
                f /= h;
                for (int i = k; i < n_; ++i) at(i, j) -= f * v[i];
            }
            for (int i = 0; i < n_; ++i) {
                double f = 0.0;
                for (int j = k; j < n_; ++j) f += at(i, j) * v[j];
                f /= h;
                for (int j = k; j < n_; ++j) at(i, j) -= f * v[j];
            }
            at(k, k - 1) = scale * g;
            for (int i = k + 1; i < n_; ++i) at(i, k - 1) = 0.0;
        }
    }

    std::vector<std::complex<double>> francis_qr() {
        std::vector<std::complex<double>> eig;
        eig.reserve(n_);
        int hi = n_ - 1;
        int iter_since_deflation = 0;
        const double eps = std::numeric_limits<double>::epsilon();
        int guard = 80 * n_;
        while (hi >= 0 && guard-- > 0) {
            // deflate tiny subdiagonals
            int lo = hi;
            while (lo > 0) {
                const double s = std::abs(at(lo - 1, lo - 1)) + std::abs(at(lo, lo));
                if (std::abs(at(lo, lo - 1)) <= eps * std::max(s, 1e-300)) {
                    at(lo, lo - 1) = 0.0;
                    break;
                }
                --lo;
            }
            if (lo == hi) {  // 1x1 block
                eig.emplace_back(at(hi, hi), 0.0);
                --hi;
                iter_since_deflation = 0;
                continue;
            }
            if (lo == hi - 1) {  // 2x2 block
                const double a = at(hi - 1, hi - 1), b = at(hi - 1, hi);
                const double c = at(hi, hi - 1), d = at(hi, hi);
                const double tr = a + d;
                const double disc = (a - d) * (a - d) / 4.0 + b * c;
                if (disc >= 0.0) {
                    const double s = std::sqrt(disc);
                    eig.emplace_back(tr / 2.0 + s, 0.0);
                    eig.emplace_back(tr / 2.0 - s, 0.0);
                } else {
                    const double s = std::sqrt(-disc);
                    eig.emplace_back(tr / 2.0, s);
                    eig.emplace_back(tr / 2.0, -s);
                }
                hi -= 2;
                iter_since_deflation = 0;
                continue;
            }
            // Francis double-shift on rows lo..hi
            double s1, s2;  // shift sum and product from trailing 2x2
            {
                const double a = at(hi - 1, hi - 1), b = at(hi - 1, hi);
                const double c = at(hi, hi - 1), d = at(hi, hi);
                s1 = a + d;
                s2 = a * d - b * c;
            }
            if (++iter_since_deflation % 12 == 0) {
                // exceptional shift to break stagnation
                const double s = std::abs(at(hi, hi - 1)) +
                                 std::abs(at(hi - 1, hi - 2));
                s1 = 1.5 * s;
                s2 = s * s * 0.81;
            }
            double x = at(lo, lo) * at(lo, lo) +
                       at(lo, lo + 1) * at(lo + 1, lo) - s1 * at(lo, lo) + s2;
            double y = at(lo + 1, lo) * (at(lo, lo) + at(lo + 1, lo + 1) - s1);
            double z = at(lo + 2, lo + 1) * at(lo + 1, lo);
            for (int k = lo; k <= hi - 2; ++k) {
                // Householder on (x, y, z)
                double alpha = std::sqrt(x * x + y * y + z * z);
                if (alpha == 0.0) break;
                if (x > 0) alpha = -alpha;
                const double v0 = x - alpha, v1 = y, v2 = z;
                const double vnorm = v0 * v0 + v1 * v1 + v2 * v2;
                if (vnorm > 0) {
                    const int jmin = std::max(lo, k - 1);
                    for (int j = jmin; j < n_; ++j) {
                        const double f =
                            2.0 * (v0 * at(k, j) + v1 * at(k + 1, j) +
                                   v2 * at(k + 2, j)) / vnorm;
                        at(k, j) -= f * v0;
                        at(k + 1, j) -= f * v1;
                        at(k + 2, j) -= f * v2;
                    }
                    const int imax = std::min(hi, k + 3);
                    for (int i = 0; i <= imax; ++i) {
                        const double f =
                            2.0 * (v0 * at(i, k) + v1 * at(i, k + 1) +
                                   v2 * at(i, k + 2)) / vnorm;
                        at(i, k) -= f * v0;
                        at(i, k + 1) -= f * v1;
                        at(i, k + 2) -= f * v2;
                    }
                }
                x = at(k + 1, k);
                y = at(k + 2, k);
                z = (k + 3 <= hi) ? at(k + 3, k) : 0.0;
            }
            // final 2x2 rotation on the last column pair
            {
                const int k = hi - 1;
                double alpha = std::hypot(x, y);
                if (alpha != 0.0) {
                    if (x > 0) alpha = -alpha;
                    const double v0 = x - alpha, v1 = y;
                    const double vnorm = v0 * v0 + v1 * v1;
                    if (vnorm > 0) {
                        for (int j = k - 1; j < n_; ++j) {
                            const double f = 2.0 * (v0 * at(k, j) +
                                                    v1 * at(k + 1, j)) / vnorm;
                            at(k, j) -= f * v0;
                            at(k + 1, j) -= f * v1;
                        }
                        for (int i = 0; i <= hi; ++i) {
                            const double f = 2.0 * (v0 * at(i, k) +
                                                    v1 * at(i, k + 1)) / vnorm;
                            at(i, k) -= f * v0;
                            at(i, k + 1) -= f * v1;
                        }
                    }
                }
            }
            // restore Hessenberg zeros below the first subdiagonal
            for (int i = lo + 2; i <= hi; ++i)
                for (int j = lo; j <= i - 2; ++j) at(i, j) = 0.0;
        }
        if (hi >= 0)
            throw std::runtime_error(
                "pencil_eigenvalues: QR failed to converge (deflation stalled "
                "at block size " + std::to_string(hi + 1) + ")");
        return eig;
    }

    int n_;
    std::vector<double> a_;
};

}  // namespace detail

/// All eigenvalues of the pencil A y = lambda W y via M = W^{-1} A and the
/// in-repo dense QR solver. Conjugate pairing is enforced by averaging
/// matched upper/lower partners.
inline std::vector<std::complex<double>> pencil_eigenvalues(
    const DiscreteOperator& op) {
    const int n = op.n_interior;
    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double inv = 1.0 / op.weight[i];
        m[static_cast<std::size_t>(i) * n + i] = op.diag[i] * inv;
        if (i > 0) m[static_cast<std::size_t>(i) * n + i - 1] = op.offdiag[i - 1] * inv;
        if (i + 1 < n) m[static_cast<std::size_t>(i) * n + i + 1] = op.offdiag[i] * inv;
    }
    detail::DenseEigenSolver solver(std::move(m), n);
    auto eig = solver.eigenvalues();

    // enforce exact conjugate pairing
    std::vector<std::complex<double>> out;
    std::vector<bool> used(eig.size(), false);
    for (std::size_t i = 0; i < eig.size(); ++i) {
        if (used[i]) continue;
        if (std::abs(eig[i].imag()) == 0.0) {
            out.push_back(eig[i]);
            used[i] = true;
            continue;
        }
        std::size_t best = i;
        double bestd = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < eig.size(); ++j) {
            if (j == i || used[j]) continue;
            const double d = std::abs(eig[j] - std::conj(eig[i]));
            if (d < bestd) {
                bestd = d;
                best = j;
            }
        }
        if (best != i && bestd <= 1e-6 * (1.0 + std::abs(eig[i]))) {
            const std::complex<double> avg =
                0.5 * (eig[i] + std::conj(eig[best]));
            out.push_back(avg);
            out.push_back(std::conj(avg));
            used[i] = used[best] = true;
        } else {
            out.push_back(eig[i]);
            used[i] = true;
        }
    }
    std::sort(out.begin(), out.end(), [](auto a, auto b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
}

struct ExtrapolatedEigenvalue {
    std::complex<double> value;
    double error_estimate;
    bool flagged_cluster = false;
};

/// Richardson extrapolation over meshes n and 2n assuming O(h^2)
/// convergence; eigenvalues matched nearest-neighbor with an injectivity
/// check (ambiguous matches flagged, not dropped).
inline std::vector<ExtrapolatedEigenvalue> extrapolate(const Problem& prob,
                                                       int n) {
    const auto coarse = pencil_eigenvalues(discretize(prob, n));
    const auto fine = pencil_eigenvalues(discretize(prob, 2 * n));
    std::vector<ExtrapolatedEigenvalue> out;
    std::vector<int> claim(fine.size(), -1);
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        std::size_t best = 0;
        double bestd = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < fine.size(); ++j) {
            const double d = std::abs(fine[j] - coarse[i]);
            if (d < bestd) {
                bestd = d;
                best = j;
            }
        }
        ExtrapolatedEigenvalue e;
        e.value = (4.0 * fine[best] - coarse[i]) / 3.0;
        e.error_estimate = bestd / 3.0;
        if (claim[best] >= 0) {
            e.flagged_cluster = true;
            out[claim[best]].flagged_cluster = true;
        } else {
            claim[best] = static_cast<int>(out.size());
        }
        out.push_back(e);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.value.real() != b.value.real()
                   ? a.value.real() < b.value.real()
                   : a.value.imag() < b.value.imag();
    });
    return out;
}

/// Matrix trace of W^{-1} A, for the eigenvalue-sum sanity property.
inline double pencil_trace(const DiscreteOperator& op) {
    double t = 0.0;
    for (int i = 0; i < op.n_interior; ++i) t += op.diag[i] / op.weight[i];
    return t;
}

/// Plain text dump of the pencil (one "i j value" row per nonzero).
inline void dump_pencil(const DiscreteOperator& op, std::ostream& os) {
    os << "# symmetric tridiagonal A (rows), diagonal W; n=" << op.n_interior
       << "\n";
    for (int i = 0; i < op.n_interior; ++i) {
        os << i << ' ' << i << ' ' << op.diag[i] << '\n';
        if (i + 1 < op.n_interior) {
            os << i << ' ' << i + 1 << ' ' << op.offdiag[i] << '\n';
            os << i + 1 << ' ' << i << ' ' << op.offdiag[i] << '\n';
        }
    }
    os << "# W\n";
    for (int i = 0; i < op.n_interior; ++i)
        os << i << ' ' << i << ' ' << op.weight[i] << '\n';
}

}  // namespace ndsl
