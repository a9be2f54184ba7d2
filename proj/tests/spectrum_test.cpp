#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "closed_form.hpp"
#include "ndsl/fixtures.hpp"
#include "ndsl/spectrum.hpp"

using namespace ndsl;

TEST(ScanReal, P0FirstThreeEigenvalues) {
    auto pairs = scan_real(fixtures::P0(), Interval(0.5, 10.0));
    ASSERT_EQ(pairs.size(), 3u);
    EXPECT_NEAR(pairs[0].lambda.real(), 1.0, 1e-8);
    EXPECT_NEAR(pairs[1].lambda.real(), 4.0, 1e-8);
    EXPECT_NEAR(pairs[2].lambda.real(), 9.0, 1e-8);
}

TEST(ScanReal, P1m22LowWindow) {
    auto pairs = scan_real(fixtures::P1(-22.0), Interval(1e-3, 30.0));
    ASSERT_EQ(pairs.size(), 2u);
    // frozen from the closed-form oracle
    EXPECT_NEAR(pairs[0].lambda.real(), 5.706875, 2e-5);
    EXPECT_NEAR(pairs[1].lambda.real(), 6.569437, 2e-5);
}

TEST(ScanReal, P2AgainstClosedForm) {
    auto pairs = scan_real(fixtures::P2(), Interval(1e-3, 50.0));
    const auto ref = oracle::real_roots(oracle::p2(), 1e-3, 50.0);
    ASSERT_EQ(pairs.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i)
        EXPECT_NEAR(pairs[i].lambda.real(), ref[i],
                    1e-6 * (1.0 + std::abs(ref[i])));
    // the first eigenvalue is exactly 1 (eigenfunction sin(3 pi x / 2))
    EXPECT_NEAR(pairs[0].lambda.real(), 1.0, 1e-8);
}

TEST(ScanReal, ResolvesTheNearDegeneratePair) {
    // two simple zeros 0.00987 apart must both be found
    auto pairs = scan_real(fixtures::P1(21.99604), Interval(1e-3, 10.0));
    ASSERT_EQ(pairs.size(), 2u);
    EXPECT_NEAR(pairs[0].lambda.real(), 6.14661109, 1e-5);
    EXPECT_NEAR(pairs[1].lambda.real(), 6.15647642, 1e-5);
    EXPECT_EQ(pairs[0].multiplicity, 1);
    EXPECT_EQ(pairs[1].multiplicity, 1);
}

TEST(ScanReal, DoubleZeroAtOrigin) {
    // P1(4 pi^2): lambda = 0 is an exact double zero of D
    auto pairs = scan_real(fixtures::P1(4.0 * M_PI * M_PI), Interval(-5.0, 5.0));
    ASSERT_EQ(pairs.size(), 1u);
    EXPECT_TRUE(pairs[0].is_real());
    EXPECT_NEAR(pairs[0].lambda.real(), 0.0, 1e-6);
    EXPECT_EQ(pairs[0].multiplicity, 2);
}

TEST(ScanReal, NoFalseRootNearTheComplexPair) {
    // q = -41.9 carries a complex pair at 23.373 +- 0.951i; the real scan
    // must not report a real eigenvalue between the true ones
    auto pairs = scan_real(fixtures::P1(-41.9), Interval(16.0, 30.0));
    std::vector<double> reals;
    for (const auto& e : pairs)
        if (e.is_real()) reals.push_back(e.lambda.real());
    ASSERT_EQ(reals.size(), 1u);
    EXPECT_NEAR(reals[0], 17.547994661094357, 1e-6);
}

TEST(CountRect, P0NoComplexSpectrum) {
    EXPECT_EQ(count_rect(fixtures::P0(), Rect{0.5, 4.5, 0.1, 5.0}), 0);
}

TEST(CountRect, P1CountsMatchThePaperExamples) {
    EXPECT_EQ(count_rect(fixtures::P1(3.0), Rect{-20, 20, 0.1, 20}), 1);
    EXPECT_EQ(count_rect(fixtures::P1(15.0), Rect{-40, 40, 0.1, 40}), 2);
}

TEST(FindComplex, P1q3PureImaginaryPair) {
    auto pairs = find_complex(fixtures::P1(3.0), Rect{-20, 20, 1e-3, 20});
    ASSERT_EQ(pairs.size(), 1u);
    EXPECT_LT(std::abs(pairs[0].lambda.real()), 1e-6);
    // frozen from the closed-form oracle
    EXPECT_NEAR(pairs[0].lambda.imag(), 2.2194793420087486, 1e-6);
}

TEST(FindComplex, P2TwoGhostPairs) {
    auto pairs = find_complex(fixtures::P2(), Rect{-30, 30, 0.5, 30});
    ASSERT_EQ(pairs.size(), 2u);
    const auto r1 = oracle::newton_root(oracle::p2(), oracle::C(-12.07, 4.16));
    const auto r2 = oracle::newton_root(oracle::p2(), oracle::C(5.83, 8.21));
    EXPECT_NEAR(pairs[0].lambda.real(), r1.real(), 1e-5);
    EXPECT_NEAR(pairs[0].lambda.imag(), r1.imag(), 1e-5);
    EXPECT_NEAR(pairs[1].lambda.real(), r2.real(), 1e-5);
    EXPECT_NEAR(pairs[1].lambda.imag(), r2.imag(), 1e-5);
}

TEST(FindComplex, P1q33ThreePairwiseNonConjugate) {
    auto pairs = find_complex(fixtures::P1(33.0), Rect{-68, 68, 1e-3, 68});
    ASSERT_EQ(pairs.size(), 3u);
    for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = 0; j < pairs.size(); ++j) {
            if (i == j) continue;
            EXPECT_GT(std::abs(pairs[i].lambda - std::conj(pairs[j].lambda)),
                      1e-3);
        }
}

TEST(BuildInventory, P0Window) {
    SpectralWindow win(Interval(0.5, 26.0), Rect{0.5, 26.0, 0.1, 10.0});
    auto inv = build_inventory(fixtures::P0(), win);
    ASSERT_EQ(inv.real_pairs.size(), 5u);
    const double expect[5] = {1, 4, 9, 16, 25};
    for (int i = 0; i < 5; ++i) {
        EXPECT_NEAR(inv.real_pairs[i].lambda.real(), expect[i], 1e-8);
        EXPECT_LT(inv.real_pairs[i].newton_decrement, 1e-8);
        EXPECT_NEAR(inv.real_pairs[i].eigenfunction.max_abs_y(), 1.0, 1e-12);
    }
    EXPECT_TRUE(inv.complex_pairs.empty());
    EXPECT_TRUE(inv.certificate.match);
    EXPECT_EQ(inv.certificate.rect_count, 0);
}

TEST(BuildInventory, P1qdegHasNoComplexPairsInRect) {
    auto fx = fixtures::by_id("qdeg");
    SpectralWindow win(Interval(1e-3, 30.0), fx.window.complex_rect);
    auto inv = build_inventory(fx.problem, win);
    EXPECT_EQ(inv.complex_pairs.size(), 0u);
    EXPECT_TRUE(inv.certificate.match);
    ASSERT_GE(inv.real_pairs.size(), 2u);
}

TEST(BuildInventory, P1q4pi2Window) {
    const Problem prob = fixtures::P1(4.0 * M_PI * M_PI);
    SpectralWindow win(Interval(-5.0, 100.0), Rect{-81, 81, 1e-3, 81});
    auto inv = build_inventory(prob, win);
    // lambda = 0 double zero + the real eigenvalue at 94.27; one quadruple
    ASSERT_EQ(inv.complex_pairs.size(), 2u);
    EXPECT_NEAR(inv.complex_pairs[0].lambda.real(), -27.308632, 1e-4);
    EXPECT_NEAR(inv.complex_pairs[1].lambda.real(), 27.308632, 1e-4);
    EXPECT_NEAR(inv.complex_pairs[1].lambda.imag(), 7.252597, 1e-4);
    ASSERT_EQ(inv.real_pairs.size(), 2u);
    EXPECT_EQ(inv.real_pairs[0].multiplicity, 2);
    EXPECT_NEAR(inv.real_pairs[0].lambda.real(), 0.0, 1e-6);
    EXPECT_NEAR(inv.real_pairs[1].lambda.real(), 94.26894, 1e-3);
    EXPECT_TRUE(inv.certificate.match);
    EXPECT_EQ(inv.certificate.rect_count, 2);  // two upper-half zeros of the quadruple
    EXPECT_LT(inv.certificate.max_conjugate_residual, 1e-6);
}

TEST(BuildInventory, WindowMonotonicity) {
    const Problem prob = fixtures::P1(15.0);
    SpectralWindow small(Interval(1e-3, 70.0), Rect{-15, 15, 1e-3, 15});
    SpectralWindow large(Interval(-10.0, 130.0), Rect{-32, 32, 1e-3, 32});
    auto inv_small = build_inventory(prob, small);
    auto inv_large = build_inventory(prob, large);
    for (const auto& e : inv_small.real_pairs) {
        bool present = false;
        for (const auto& f : inv_large.real_pairs)
            if (std::abs(e.lambda - f.lambda) <=
                1e-6 * (1.0 + std::abs(e.lambda)))
                present = true;
        EXPECT_TRUE(present) << "lost eigenvalue " << e.lambda;
    }
    for (const auto& e : inv_small.complex_pairs) {
        bool present = false;
        for (const auto& f : inv_large.complex_pairs)
            if (std::abs(e.lambda - f.lambda) <=
                1e-5 * (1.0 + std::abs(e.lambda)))
                present = true;
        EXPECT_TRUE(present) << "lost eigenvalue " << e.lambda;
    }
}

TEST(SpectralWindow, RejectsBadRects) {
    EXPECT_THROW(SpectralWindow(Interval(0, 1), Rect{0, 1, -0.5, 1}),
                 std::invalid_argument);
    EXPECT_THROW(SpectralWindow(Interval(0, 1), Rect{0, 1, 0.5, 0.2}),
                 std::invalid_argument);
}
