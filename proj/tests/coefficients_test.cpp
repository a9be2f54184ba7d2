#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ndsl/coefficients.hpp"
#include "ndsl/fixtures.hpp"

using namespace ndsl;
using Part = PiecewiseCoefficient::Part;

TEST(Interval, Invariants) {
    EXPECT_THROW(Interval(1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(Interval(2.0, 1.0), std::invalid_argument);
    EXPECT_THROW(Interval(0.0, std::numeric_limits<double>::infinity()),
                 std::invalid_argument);
    Interval iv(-1.0, 1.0);
    EXPECT_EQ(iv.width(), 2.0);
}

TEST(Eval, RightContinuousAtBreakpoints) {
    const Problem p1 = fixtures::P1(3.0);
    // w of P1 at 0.5 -> 1, at -0.5 -> -1; right-continuous at the jump
    EXPECT_EQ(p1.w.eval(0.5), 1.0);
    EXPECT_EQ(p1.w.eval(-0.5), -1.0);
    EXPECT_EQ(p1.w.eval(0.0), 1.0);  // one-sided convention
    EXPECT_EQ(p1.w.eval(1.0), 1.0);
    EXPECT_EQ(p1.w.eval(-1.0), -1.0);
    EXPECT_THROW(p1.w.eval(1.5), DomainError);
}

TEST(Eval, P2PotentialCarriesTheWeightShift) {
    const Problem p2 = fixtures::P2();
    const double qb = -9.0 * M_PI * M_PI / 4.0;
    EXPECT_NEAR(p2.q.eval(0.5), qb + 1.0, 1e-14);
    EXPECT_NEAR(p2.q.eval(2.0), qb - 1.0, 1e-14);
    EXPECT_EQ(p2.w.eval(2.0), -1.0);
    EXPECT_EQ(p2.w.eval(1.0), -1.0);
}

TEST(IntegratePart, P1Examples) {
    const Problem p1 = fixtures::P1(-22.0);
    Interval full(-1.0, 1.0);
    EXPECT_NEAR(p1.w.integrate_part(Part::kPositive, full), 1.0, 1e-14);
    EXPECT_NEAR(p1.q.integrate_part(Part::kNegative, full), 44.0, 1e-12);
    const Problem p2 = fixtures::P2();
    // q everywhere negative on [0,4]
    EXPECT_EQ(p2.q.integrate_part(Part::kPositive, Interval(0.0, 4.0)), 0.0);
}

TEST(IntegratePart, PolynomialSignIsolation) {
    // c(x) = x(x-1)(x+1) = x^3 - x on [-2, 2]
    Interval iv(-2.0, 2.0);
    Segment s{2.0, SegmentKind::kPolynomial, {0.0, -1.0, 0.0, 1.0}};
    PiecewiseCoefficient c(-2.0, {s});
    // int of positive part: on [-1,0] and [1,2]: (1/4) + (9/4) = 5/2
    EXPECT_NEAR(c.integrate_part(Part::kPositive, iv), 2.5, 1e-12);
    EXPECT_NEAR(c.integrate_part(Part::kNegative, iv), 2.5, 1e-12);
    EXPECT_NEAR(c.integrate(iv), 0.0, 1e-12);
}

TEST(IntegratePart, PositiveMinusNegativeIsPlainIntegral) {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        Interval iv(-1.5, 2.0);
        std::vector<Segment> segs;
        segs.push_back({0.3, SegmentKind::kPolynomial,
                        {coef(rng), coef(rng), coef(rng), coef(rng)}});
        segs.push_back({2.0, SegmentKind::kPolynomial,
                        {coef(rng), coef(rng), coef(rng), 0.0}});
        PiecewiseCoefficient c(-1.5, segs);
        std::uniform_real_distribution<double> pt(-1.5, 2.0);
        double a = pt(rng), b = pt(rng);
        if (a > b) std::swap(a, b);
        if (b - a < 1e-3) continue;
        Interval r(a, b);
        const double plus = c.integrate_part(Part::kPositive, r);
        const double minus = c.integrate_part(Part::kNegative, r);
        const double plain = c.integrate(r);
        EXPECT_NEAR(plus - minus, plain, 1e-12 * (1.0 + std::abs(plain)));
        EXPECT_GE(plus, 0.0);
        EXPECT_GE(minus, 0.0);
        // additivity over adjacent ranges
        const double mid = 0.5 * (a + b);
        const double left = c.integrate_part(Part::kPositive, Interval(a, mid));
        const double right = c.integrate_part(Part::kPositive, Interval(mid, b));
        EXPECT_NEAR(left + right, plus, 1e-12 * (1.0 + plus));
    }
}

TEST(Problem, ValidationRejectsNonPositiveP) {
    Interval iv(0.0, 1.0);
    // p dips to zero at x = 0.5: p = (x - 0.5)^2
    Segment s{1.0, SegmentKind::kPolynomial, {0.25, -1.0, 1.0, 0.0}};
    EXPECT_THROW(Problem(iv, PiecewiseCoefficient(0.0, {s}),
                         PiecewiseCoefficient::constant(iv, 0.0),
                         PiecewiseCoefficient::constant(iv, 1.0)),
                 std::invalid_argument);
    EXPECT_THROW(Problem(iv, PiecewiseCoefficient::constant(iv, 1.0),
                         PiecewiseCoefficient::constant(iv, 0.0),
                         PiecewiseCoefficient::constant(iv, 0.0)),
                 std::invalid_argument);
}

TEST(Problem, BreakpointUnionAndReflection) {
    const Problem p2 = fixtures::P2();
    const auto bps = p2.breakpoints();
    ASSERT_EQ(bps.size(), 3u);
    EXPECT_EQ(bps[1], 1.0);
    const Problem r = p2.reflected();
    EXPECT_EQ(r.w.eval(0.5), -1.0);
    EXPECT_EQ(r.w.eval(2.0), 1.0);
}

TEST(MinMax, ExactOnCubics) {
    // x^3 - 3x on [-2, 2]: min -2 (x=1 and x=-2), max 2 (x=-1, x=2)
    Segment s{2.0, SegmentKind::kPolynomial, {0.0, -3.0, 0.0, 1.0}};
    PiecewiseCoefficient c(-2.0, {s});
    auto [mn, mx] = c.min_max(Interval(-2.0, 2.0));
    EXPECT_NEAR(mn, -2.0, 1e-12);
    EXPECT_NEAR(mx, 2.0, 1e-12);
    EXPECT_NEAR(c.sup_abs(Interval(-2.0, 2.0)), 2.0, 1e-12);
}

TEST(LinearCombination, MergesBreakpoints) {
    const Problem p2 = fixtures::P2();
    // lambda w - q at lambda = 1: equals 9 pi^2/4 on all of [0,4]
    auto qeff =
        PiecewiseCoefficient::linear_combination(1.0, p2.w, -1.0, p2.q);
    const double expect = 9.0 * M_PI * M_PI / 4.0;
    EXPECT_NEAR(qeff.eval(0.3), expect, 1e-12);
    EXPECT_NEAR(qeff.eval(3.7), expect, 1e-12);
    EXPECT_NEAR(qeff.integrate(Interval(0.0, 4.0)), 4.0 * expect, 1e-10);
}

TEST(DefinitenessData, RefiningBreakpointsKeepsClassInputs) {
    // split w of P1 into more segments without changing values
    Interval iv(-1.0, 1.0);
    auto w1 = PiecewiseCoefficient::steps(iv, {{0.0, -1.0}, {1.0, 1.0}});
    auto w2 = PiecewiseCoefficient::steps(
        iv, {{-0.5, -1.0}, {0.0, -1.0}, {0.25, 1.0}, {1.0, 1.0}});
    EXPECT_EQ(w1.takes_both_signs(), w2.takes_both_signs());
    EXPECT_NEAR(w1.integrate_part(Part::kPositive, iv),
                w2.integrate_part(Part::kPositive, iv), 1e-14);
}
