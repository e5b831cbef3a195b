#include "oracles.hpp"
#include "vpr/linkmath.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace vpr;

TEST(LinkMath, SingleUserCir) {
    Matrix g(1, 1);
    g << 1.0;
    EXPECT_DOUBLE_EQ(cir(Vector::Ones(1), g, 0.5, 0), 2.0);
}

TEST(LinkMath, TwoUserCirByHand) {
    Matrix g(2, 2);
    g << 1.0, 0.1, 0.1, 1.0;
    const double expected = 1.0 / (0.1 + 0.01);  // 9.0909...
    EXPECT_NEAR(cir(Vector::Ones(2), g, 0.01, 0), expected, 1e-12 * expected);
    EXPECT_NEAR(cir(Vector::Ones(2), g, 0.01, 1), expected, 1e-12 * expected);
}

TEST(LinkMath, ZeroPowerZeroCir) {
    Matrix g = Matrix::Constant(3, 3, 0.3);
    EXPECT_EQ(all_cirs(Vector::Zero(3), g, 1e-3), Vector::Zero(3));
}

TEST(LinkMath, CirMatchesLonghandOracle) {
    Rng rng = make_rng(8);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    const std::size_t k = 12;
    Matrix g(k, k);
    std::vector<std::vector<double>> gv(k, std::vector<double>(k));
    std::vector<double> pv(k);
    Vector p(k);
    for (std::size_t i = 0; i < k; ++i) {
        pv[i] = p(static_cast<Eigen::Index>(i)) = u(rng);
        for (std::size_t j = 0; j < k; ++j) gv[i][j] = g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = u(rng);
    }
    for (std::size_t i = 0; i < k; ++i) {
        const double ref = oracle::cir(pv, gv, 0.02, i);
        EXPECT_NEAR(cir(p, g, 0.02, i), ref, 1e-13 * ref);
    }
}

TEST(LinkMath, Snir) {
    EXPECT_NEAR(snir(0.019624, 128.0), 2.5119, 1e-4);
    EXPECT_NEAR(linear_to_db(snir(0.019624, 128.0)), 4.0, 1e-4);
    EXPECT_DOUBLE_EQ(snir(0.37, 1.0), 0.37);
    EXPECT_DOUBLE_EQ(snir(0.0, 16.0), 0.0);
}

TEST(LinkMath, AchievedRate) {
    EXPECT_NEAR(achieved_rate(0.019624, 2.5119, 3.84e6), 30'000.0, 2.0);
    EXPECT_DOUBLE_EQ(achieved_rate(0.0, 2.5119, 3.84e6), 0.0);
    const RadioConstants r;
    for (double rate : {30'000.0, 120'000.0, 240'000.0}) {
        const double g = class_cir_target(rate, r, CirTargetMode::spreading_factor);
        EXPECT_NEAR(achieved_rate(g, r.target_snr, r.chip_rate), rate, 1e-9 * rate);
    }
}

TEST(LinkMath, DefaultClassTargets) {
    const RadioConstants r;
    const auto classes = default_classes();
    const CirTargets t = cir_targets(classes, {0, 1, 2}, r, CirTargetMode::spreading_factor);
    const double expected[] = {0.0196241, 0.0784964, 0.1569929};
    for (Eigen::Index i = 0; i < 3; ++i) {
        EXPECT_NEAR(t.cir_min(i), expected[i], 1e-6);
        const double ref = oracle::cir_target(classes[static_cast<std::size_t>(i)].min_rate, 3.84e6, 4.0);
        EXPECT_NEAR(t.cir_min(i), ref, 1e-14);
        EXPECT_DOUBLE_EQ(t.snir_target(i), r.target_snr);
        // At the target CIR the despread SNIR is exactly delta*.
        EXPECT_NEAR(snir(t.cir_min(i), t.spreading(i)), r.target_snr, 1e-15);
    }
    EXPECT_DOUBLE_EQ(t.spreading(0), 128.0);
    EXPECT_DOUBLE_EQ(t.spreading(1), 32.0);
    EXPECT_DOUBLE_EQ(t.spreading(2), 16.0);
}

TEST(LinkMath, ShannonTargets) {
    const RadioConstants r;
    EXPECT_DOUBLE_EQ(class_cir_target(r.chip_rate, r, CirTargetMode::shannon), 1.0);
    const auto classes = default_classes();
    const CirTargets t = cir_targets(classes, {0, 2}, r, CirTargetMode::shannon);
    EXPECT_NEAR(t.cir_min(0), std::exp2(1.0 / 128.0) - 1.0, 1e-15);
    EXPECT_NEAR(t.snir_target(1), 16.0 * (std::exp2(1.0 / 16.0) - 1.0), 1e-14);
}

TEST(LinkMath, SingleClassSharesOneTarget) {
    const RadioConstants r;
    const std::vector<UserClass> one = {{1, 60'000.0, "only"}};
    const CirTargets t = cir_targets(one, std::vector<std::size_t>(5, 0), r, CirTargetMode::spreading_factor);
    EXPECT_TRUE((t.cir_min.array() == t.cir_min(0)).all());
}

TEST(LinkMath, CirScaleCovariantAndMonotone) {
    Rng rng = make_rng(21);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    const Eigen::Index k = 6;
    Matrix g(k, k);
    Vector p(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        p(i) = u(rng);
        for (Eigen::Index j = 0; j < k; ++j) g(i, j) = u(rng);
    }
    for (double c : {1e-6, 0.3, 7.0, 1e5}) {
        const Vector a = all_cirs(p, g, 0.01), b = all_cirs(c * p, g, c * 0.01);
        EXPECT_TRUE(a.isApprox(b, 1e-13)) << c;
    }
    Vector more_own = p, more_other = p;
    more_own(2) *= 1.5;
    more_other(4) *= 1.5;
    EXPECT_GT(cir(more_own, g, 0.01, 2), cir(p, g, 0.01, 2));
    EXPECT_LT(cir(more_other, g, 0.01, 2), cir(p, g, 0.01, 2));
}
