#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndsl/roots.hpp"

namespace ndsl {

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Interval {
    double a;
    double b;
    Interval(double a_, double b_) : a(a_), b(b_) {
        if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
            throw std::invalid_argument("Interval: need finite a < b");
    }
    double width() const { return b - a; }
    bool contains(double x) const { return x >= a && x <= b; }
};

enum class SegmentKind { kConstant, kPolynomial };

/// One piece of a piecewise coefficient: valid on [x_prev, upto), closed at
/// the global right endpoint. Polynomials are in the global x variable,
/// degree <= 3.
struct Segment {
    double upto;
    SegmentKind kind;
    std::array<double, 4> c{};  // c0 + c1 x + c2 x^2 + c3 x^3

    double eval(double x) const {
        if (kind == SegmentKind::kConstant) return c[0];
        return c[0] + x * (c[1] + x * (c[2] + x * c[3]));
    }
    int degree() const {
        if (kind == SegmentKind::kConstant) return 0;
        for (int d = 3; d > 0; --d)
            if (c[d] != 0.0) return d;
        return 0;
    }
    // exact antiderivative, for segment-local integration
    double antiderivative(double x) const {
        return x * (c[0] + x * (c[1] / 2 + x * (c[2] / 3 + x * c[3] / 4)));
    }
};

/// Piecewise coefficient on [a,b] with strictly increasing breakpoints.
/// Evaluation is right-continuous at interior breakpoints (the segment to the
/// right owns the breakpoint); the right endpoint b belongs to the last
/// segment.
class PiecewiseCoefficient {
  public:
    PiecewiseCoefficient(double a, std::vector<Segment> segments)
        : a_(a), segs_(std::move(segments)) {
        if (segs_.empty())
            throw std::invalid_argument("PiecewiseCoefficient: no segments");
        double prev = a_;
        for (const auto& s : segs_) {
            if (!(s.upto > prev))
                throw std::invalid_argument(
                    "PiecewiseCoefficient: breakpoints must increase");
            prev = s.upto;
        }
    }

    static PiecewiseCoefficient constant(const Interval& iv, double value) {
        Segment s{iv.b, SegmentKind::kConstant, {value, 0, 0, 0}};
        return PiecewiseCoefficient(iv.a, {s});
    }

    /// Step function: pieces[i] = {upto, value}; last upto must equal b.
    static PiecewiseCoefficient steps(
        const Interval& iv, const std::vector<std::pair<double, double>>& pieces) {
        std::vector<Segment> segs;
        for (const auto& [upto, v] : pieces)
            segs.push_back({upto, SegmentKind::kConstant, {v, 0, 0, 0}});
        if (segs.empty() || segs.back().upto != iv.b)
            throw std::invalid_argument("steps: last breakpoint must be b");
        return PiecewiseCoefficient(iv.a, std::move(segs));
    }

    double a() const { return a_; }
    double b() const { return segs_.back().upto; }

    const std::vector<Segment>& segments() const { return segs_; }

    std::vector<double> breakpoints() const {
        std::vector<double> bp{a_};
        for (const auto& s : segs_) bp.push_back(s.upto);
        return bp;
    }

    double eval(double x) const {
        if (x < a_ - 1e-12 * (1 + std::abs(a_)) ||
            x > b() + 1e-12 * (1 + std::abs(b())))
            throw DomainError("eval: x outside [a,b]");
        return segs_[segment_index(x)].eval(x);
    }

    std::size_t segment_index(double x) const {
        // right-continuous: first segment with x < upto; b maps to the last
        for (std::size_t i = 0; i + 1 < segs_.size(); ++i)
            if (x < segs_[i].upto) return i;
        return segs_.size() - 1;
    }

    double segment_left(std::size_t i) const {
        return i == 0 ? a_ : segs_[i - 1].upto;
    }

    /// Exact integral over range (range must be inside [a,b]).
    double integrate(const Interval& range) const {
        check_range(range);
        double total = 0.0;
        for (std::size_t i = 0; i < segs_.size(); ++i) {
            const double lo = std::max(range.a, segment_left(i));
            const double hi = std::min(range.b, segs_[i].upto);
            if (hi <= lo) continue;
            total += segs_[i].antiderivative(hi) - segs_[i].antiderivative(lo);
        }
        return total;
    }

    enum class Part { kPositive, kNegative };

    /// Exact integral of the positive or negative part over range.
    /// c+ = (c+|c|)/2, c- = (|c|-c)/2; sign changes of polynomial segments
    /// are isolated by closed-form root finding.
    double integrate_part(Part part, const Interval& range) const {
        check_range(range);
        double total = 0.0;
        const double want = (part == Part::kPositive) ? 1.0 : -1.0;
        for (std::size_t i = 0; i < segs_.size(); ++i) {
            const double lo = std::max(range.a, segment_left(i));
            const double hi = std::min(range.b, segs_[i].upto);
            if (hi <= lo) continue;
            const Segment& s = segs_[i];
            std::vector<double> cuts{lo};
            if (s.kind == SegmentKind::kPolynomial && s.degree() > 0)
                for (double r : poly_real_roots(s.c, lo, hi)) cuts.push_back(r);
            cuts.push_back(hi);
            std::sort(cuts.begin(), cuts.end());
            for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
                if (cuts[j + 1] - cuts[j] <= 0) continue;
                const double mid = 0.5 * (cuts[j] + cuts[j + 1]);
                if (want * s.eval(mid) > 0.0)
                    total += want * (s.antiderivative(cuts[j + 1]) -
                                     s.antiderivative(cuts[j]));
            }
        }
        return std::max(total, 0.0);
    }

    /// Exact min and max over range (stationary points of cubics are exact).
    std::pair<double, double> min_max(const Interval& range) const {
        check_range(range);
        double mn = std::numeric_limits<double>::infinity();
        double mx = -mn;
        auto consider = [&](double v) {
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        };
        for (std::size_t i = 0; i < segs_.size(); ++i) {
            const double lo = std::max(range.a, segment_left(i));
            const double hi = std::min(range.b, segs_[i].upto);
            if (hi <= lo) continue;
            const Segment& s = segs_[i];
            consider(s.eval(lo));
            consider(s.eval(hi));
            if (s.kind == SegmentKind::kPolynomial) {
                // roots of the derivative, degree <= 2
                std::array<double, 4> d{s.c[1], 2 * s.c[2], 3 * s.c[3], 0};
                for (double r : poly_real_roots(d, lo, hi)) consider(s.eval(r));
            }
        }
        return {mn, mx};
    }

    double sup_abs(const Interval& range) const {
        auto [mn, mx] = min_max(range);
        return std::max(std::abs(mn), std::abs(mx));
    }

    /// Does the coefficient take both signs on sets of positive measure?
    /// Exact for this segment model.
    bool takes_both_signs() const {
        Interval full(a_, b());
        return integrate_part(Part::kPositive, full) > 0.0 &&
               integrate_part(Part::kNegative, full) > 0.0;
    }

    /// alpha*f + beta*g on the merged breakpoint set.
    static PiecewiseCoefficient linear_combination(double alpha,
                                                   const PiecewiseCoefficient& f,
                                                   double beta,
                                                   const PiecewiseCoefficient& g) {
        if (f.a() != g.a() || f.b() != g.b())
            throw std::invalid_argument("linear_combination: interval mismatch");
        std::vector<double> bps;
        for (const auto& s : f.segs_) bps.push_back(s.upto);
        for (const auto& s : g.segs_) bps.push_back(s.upto);
        std::sort(bps.begin(), bps.end());
        bps.erase(std::unique(bps.begin(), bps.end(),
                              [](double x, double y) {
                                  return std::abs(x - y) <=
                                         1e-14 * (1 + std::abs(x));
                              }),
                  bps.end());
        std::vector<Segment> segs;
        double prev = f.a();
        for (double up : bps) {
            const double mid = 0.5 * (prev + up);
            const Segment& sf = f.segs_[f.segment_index(mid)];
            const Segment& sg = g.segs_[g.segment_index(mid)];
            Segment out{up, SegmentKind::kPolynomial, {}};
            for (int k = 0; k < 4; ++k)
                out.c[k] = alpha * sf.c[k] + beta * sg.c[k];
            if (out.degree() == 0)
                out.kind = SegmentKind::kConstant;
            segs.push_back(out);
            prev = up;
        }
        return PiecewiseCoefficient(f.a(), std::move(segs));
    }

  private:
    void check_range(const Interval& range) const {
        if (range.a < a_ - 1e-12 * (1 + std::abs(a_)) ||
            range.b > b() + 1e-12 * (1 + std::abs(b())))
            throw DomainError("range not inside [a,b]");
    }

    double a_;
    std::vector<Segment> segs_;
};

/// Dirichlet problem -(p y')' + q y = lambda w y on [a,b], y(a)=y(b)=0.
struct Problem {
    Interval interval;
    PiecewiseCoefficient p;
    PiecewiseCoefficient q;
    PiecewiseCoefficient w;
    std::string name;

    Problem(Interval iv, PiecewiseCoefficient p_, PiecewiseCoefficient q_,
            PiecewiseCoefficient w_, std::string name_ = "")
        : interval(iv), p(std::move(p_)), q(std::move(q_)), w(std::move(w_)),
          name(std::move(name_)) {
        if (p.a() != iv.a || p.b() != iv.b || q.a() != iv.a || q.b() != iv.b ||
            w.a() != iv.a || w.b() != iv.b)
            throw std::invalid_argument("Problem: coefficient domain mismatch");
        if (p.min_max(iv).first <= 0.0)
            throw std::invalid_argument("Problem: p(x) must be positive on [a,b]");
        Interval full(iv.a, iv.b);
        if (w.integrate_part(PiecewiseCoefficient::Part::kPositive, full) == 0.0 &&
            w.integrate_part(PiecewiseCoefficient::Part::kNegative, full) == 0.0)
            throw std::invalid_argument("Problem: w vanishes identically");
    }

    /// Union of all coefficient breakpoints, ascending, including a and b.
    std::vector<double> breakpoints() const {
        std::vector<double> bp;
        for (const auto* c : {&p, &q, &w})
            for (double x : c->breakpoints()) bp.push_back(x);
        std::sort(bp.begin(), bp.end());
        bp.erase(std::unique(bp.begin(), bp.end(),
                             [](double x, double y) {
                                 return std::abs(x - y) <= 1e-14 * (1 + std::abs(x));
                             }),
                 bp.end());
        return bp;
    }

    /// Problem with the weight negated (lambda -> -lambda reflection).
    Problem reflected() const {
        PiecewiseCoefficient nw =
            PiecewiseCoefficient::linear_combination(-1.0, w, 0.0, w);
        return Problem(interval, p, q, nw, name.empty() ? "" : name + "~");
    }
};

enum class DefinitenessClass {
    right_definite,
    left_definite,
    non_definite,
    definite_both,  // weight and form both definite; folded into
                    // right_definite by the classifier (classical usage)
};

inline const char* to_string(DefinitenessClass c) {
    switch (c) {
        case DefinitenessClass::right_definite: return "right_definite";
        case DefinitenessClass::left_definite: return "left_definite";
        case DefinitenessClass::non_definite: return "non_definite";
        case DefinitenessClass::definite_both: return "definite_both";
    }
    return "?";
}

}  // namespace ndsl
