#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "closed_form.hpp"
#include "ndsl/fixtures.hpp"
#include "ndsl/shooting.hpp"

using namespace ndsl;

TEST(Shoot, P0AtZeroLambdaGivesPi) {
    // q=0, lambda=0: y = x, D = pi
    auto [D, Dp] = char_fn(fixtures::P0(), 0.0);
    EXPECT_NEAR(D.real(), M_PI, 1e-9);
    EXPECT_NEAR(D.imag(), 0.0, 1e-12);
    (void)Dp;
}

TEST(Shoot, P0AnalyticEigenvalue) {
    auto [D, Dp] = char_fn(fixtures::P0(), 4.0);
    EXPECT_LT(std::abs(D), 1e-8);
    EXPECT_GT(std::abs(Dp), 1e-3);  // simple zero
}

TEST(CharFn, P0SimpleZeroAtOne) {
    auto [D, Dp] = char_fn(fixtures::P0(), 1.0);
    EXPECT_LT(std::abs(D), 1e-9);
    EXPECT_GT(std::abs(Dp), 1e-3);
}

TEST(CharFn, P0ClosedFormAtTwo) {
    // oracle: D(2) = sin(sqrt(2) pi)/sqrt(2), frozen from the closed form
    const double expect = std::sin(std::sqrt(2.0) * M_PI) / std::sqrt(2.0);
    ASSERT_NEAR(expect, -0.6815820173810371, 1e-12);  // frozen oracle value
    auto [D, Dp] = char_fn(fixtures::P0(), 2.0);
    EXPECT_NEAR(D.real(), expect, 1e-8);
    (void)Dp;
}

TEST(CharFn, RealnessForRealLambda) {
    const Problem p1 = fixtures::P1(15.0);
    for (double lam : {-31.4, -3.0, 0.7, 12.9, 57.3, 200.1}) {
        auto [D, Dp] = char_fn(p1, lam);
        EXPECT_LE(std::abs(D.imag()), 1e-10 * (1.0 + std::abs(D)));
        EXPECT_LE(std::abs(Dp.imag()), 1e-10 * (1.0 + std::abs(Dp)));
    }
}

TEST(CharFn, ConjugateSymmetry) {
    const Problem p1 = fixtures::P1(15.0);
    for (Complex lam : {Complex(3.0, 2.0), Complex(-11.0, 7.5), Complex(0.4, 0.2)}) {
        const Complex D = char_fn(p1, lam).first;
        const Complex Dc = char_fn(p1, std::conj(lam)).first;
        EXPECT_LE(std::abs(Dc - std::conj(D)), 1e-8 * (1.0 + std::abs(D)));
    }
}

TEST(CharFn, MatchesClosedFormTransferMatrices) {
    const Problem p1 = fixtures::P1(33.0);
    const auto segs = oracle::p1(33.0);
    for (Complex lam : {Complex(5.0, 0.0), Complex(29.46, 4.03),
                        Complex(-14.0, 9.0), Complex(101.93, 0.0)}) {
        const Complex mine = char_fn(p1, lam).first;
        const Complex ref = oracle::char_fn(segs, lam);
        EXPECT_LE(std::abs(mine - ref), 1e-7 * (1.0 + std::abs(ref)))
            << "lambda = " << lam;
    }
}

TEST(CharFn, DerivativeMatchesFiniteDifferences) {
    const Problem p1 = fixtures::P1(-22.0);
    const double lam = 7.3;
    const double tol = 1e-12;  // keep the noise floor under the h^2 term
    const Complex Dp = char_fn(p1, lam, tol).second;
    std::vector<double> errs;
    for (double h : {1e-3, 1e-4}) {
        const Complex fd = (char_fn(p1, lam + h, tol).first -
                            char_fn(p1, lam - h, tol).first) /
                           (2.0 * h);
        errs.push_back(std::abs(fd - Dp));
    }
    // second-order convergence: error drops by ~100 per decade of h
    const double order = std::log10(errs[0] / std::max(errs[1], 1e-300));
    EXPECT_GE(order, 1.9);
}

TEST(Shoot, ToleranceControlsError) {
    const Problem p1 = fixtures::P1(-41.9);
    const double lam = 17.5;
    const double ref = char_fn(p1, lam, 1e-12).first.real();
    double prev = std::abs(char_fn(p1, lam, 1e-6).first.real() - ref);
    int improvements = 0;
    for (double tol : {1e-7, 1e-8, 1e-9}) {
        const double err = std::abs(char_fn(p1, lam, tol).first.real() - ref);
        if (err <= prev) ++improvements;
        prev = err;
    }
    EXPECT_GE(improvements, 2);
}

TEST(Shoot, PureImaginaryEigenvalueFromMatrixSeed) {
    // oracle first: beta* from the closed form (matrix-free independent route)
    const auto segs = oracle::p1(3.0);
    const oracle::C beta = oracle::newton_root(segs, oracle::C(0.0, 2.2));
    ASSERT_LT(std::abs(beta.real()), 1e-10);
    ASSERT_NEAR(beta.imag(), 2.2194793420, 1e-6);
    auto [D, Dp] = char_fn(fixtures::P1(3.0), Complex(0.0, beta.imag()));
    EXPECT_LT(std::abs(D), 1e-6);
    (void)Dp;
}

TEST(Shoot, TrajectoryInvariants) {
    const Problem p2 = fixtures::P2();
    ShootOptions opts;
    ShotSolution sol = shoot(p2, Complex(5.83, 8.21), opts);
    ASSERT_GE(sol.grid.size(), 16u);
    EXPECT_EQ(sol.grid.front(), 0.0);
    EXPECT_EQ(sol.grid.back(), 4.0);
    EXPECT_EQ(sol.y.front(), Complex(0.0));
    EXPECT_EQ(sol.py_prime.front(), Complex(1.0));
    // grid contains the breakpoint x = 1
    bool has_bp = false;
    for (double x : sol.grid)
        if (std::abs(x - 1.0) < 1e-12) has_bp = true;
    EXPECT_TRUE(has_bp);
    // Hermite evaluation agrees with nodes
    auto [yv, pv] = sol.eval(sol.grid[5]);
    EXPECT_LE(std::abs(yv - sol.y[5]), 1e-12 * (1.0 + std::abs(yv)));
    EXPECT_LE(std::abs(pv - sol.py_prime[5]), 1e-12 * (1.0 + std::abs(pv)));
}

TEST(Shoot, TrajectoryCsvDump) {
    ShotSolution sol = shoot(fixtures::P0(), 2.0, {});
    std::ostringstream os;
    dump_trajectory_csv(sol, os);
    const std::string s = os.str();
    EXPECT_NE(s.find("x,re_y,im_y,re_py_prime,im_py_prime"), std::string::npos);
    EXPECT_GT(std::count(s.begin(), s.end(), '\n'), 10);
}
