#include "vpr/channel.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace vpr;

namespace {

ChannelSettings deterministic() {
    ChannelSettings c;
    c.shadowing = false;
    c.fading = false;
    return c;
}

Geometry one_bs(std::vector<Point> mts) {
    Geometry g;
    g.bs_positions = {{2500.0, 2500.0}};
    g.mt_positions = std::move(mts);
    return g;
}

}  // namespace

TEST(Channel, PathLossAtHundredMeters) {
    EXPECT_DOUBLE_EQ(path_loss(100.0), 1e-4);
    Rng rng = make_rng(1);
    const GainMatrix g = build_gain_matrix(one_bs({{2600.0, 2500.0}}), deterministic(), rng);
    EXPECT_DOUBLE_EQ(g.entries(0, 0), 1e-4);
}

TEST(Channel, EqualDistancesGiveEqualGains) {
    Rng rng = make_rng(1);
    const GainMatrix g =
        build_gain_matrix(one_bs({{2500.0, 2800.0}, {2200.0, 2500.0}}), deterministic(), rng);
    EXPECT_DOUBLE_EQ(g.entries(0, 0), g.entries(1, 1));
    EXPECT_DOUBLE_EQ(g.entries(0, 1), g.entries(1, 0));
}

TEST(Channel, DistanceFloorClampsCoLocatedTerminals) {
    Rng rng = make_rng(1);
    const GainMatrix g = build_gain_matrix(one_bs({{2500.0, 2500.0}}), deterministic(), rng);
    EXPECT_DOUBLE_EQ(g.entries(0, 0), 1.0);
    EXPECT_EQ(g.clamped_distances, 1u);
}

TEST(Channel, EntriesPositiveAndRowsShareTheServingBs) {
    Rng rng = make_rng(11);
    Geometry geo = place_uniform(20, 5000.0, 5000.0, {}, rng);
    const GainMatrix g = build_gain_matrix(geo, ChannelSettings{}, rng);
    ASSERT_EQ(g.size(), 20u);
    EXPECT_TRUE((g.entries.array() > 0.0).all());
    // Users served by the same BS see one realization per transmitter.
    for (std::size_t a = 0; a < 20; ++a)
        for (std::size_t b = 0; b < 20; ++b)
            if (g.serving_bs[a] == g.serving_bs[b]) {
                for (Eigen::Index j = 0; j < 20; ++j)
                    EXPECT_EQ(g.entries(static_cast<Eigen::Index>(a), j), g.entries(static_cast<Eigen::Index>(b), j));
            }
}

TEST(Channel, StrongestAssociationPicksTheLargestOwnGain) {
    Rng rng = make_rng(5);
    Geometry geo = place_uniform(15, 5000.0, 5000.0, {}, rng);
    Rng r1 = make_rng(9), r2 = make_rng(9);
    const LinkGains links = draw_link_gains(geo, ChannelSettings{}, r1);
    const GainMatrix g = build_gain_matrix(geo, ChannelSettings{}, r2);
    for (Eigen::Index i = 0; i < 15; ++i)
        EXPECT_DOUBLE_EQ(g.entries(i, i), links.gain.row(i).maxCoeff());
}

TEST(Channel, NearestAssociationUsesDistance) {
    ChannelSettings c;
    c.association = Association::nearest;
    Geometry geo;
    geo.bs_positions = {{1250.0, 1250.0}, {3750.0, 3750.0}};
    geo.mt_positions = {{1000.0, 1000.0}, {4000.0, 4000.0}};
    Rng rng = make_rng(1);
    const GainMatrix g = build_gain_matrix(geo, c, rng);
    EXPECT_EQ(g.serving_bs, (std::vector<std::size_t>{0, 1}));
}

TEST(Channel, ShadowingIsZeroMeanInDb) {
    // Shadowing only, 10^5 samples: mean of 10 log10(S) within 0.05 dB of 0,
    // variance near 6 dB^2.
    ChannelSettings c;
    c.fading = false;
    Geometry geo;
    geo.bs_positions = {{0.0, 0.0}, {0.0, 100.0}, {100.0, 0.0}, {100.0, 100.0}};
    geo.mt_positions.assign(25'000, Point{50.0, 50.0});
    Rng rng = make_rng(77);
    const LinkGains l = draw_link_gains(geo, c, rng);
    const Eigen::ArrayXXd db = 10.0 * l.shadowing.array().log10();
    const double mean = db.mean();
    const double var = (db - mean).square().mean();
    EXPECT_NEAR(mean, 0.0, 0.05);
    EXPECT_NEAR(var, 6.0, 0.1);
}

TEST(Channel, RicianPowerHasTheExpectedMean) {
    // E|h|^2 = 0.6^2 + 2 * 0.4^2 = 0.68
    ChannelSettings c;
    c.shadowing = false;
    Geometry geo;
    geo.bs_positions = {{0.0, 0.0}};
    geo.mt_positions.assign(100'000, Point{1.0, 0.0});
    Rng rng = make_rng(78);
    const LinkGains l = draw_link_gains(geo, c, rng);
    EXPECT_NEAR(l.gain.mean(), 0.68, 0.005);
}

TEST(Channel, GainsAreDeterministicPerSeed) {
    Rng a = make_rng(4), b = make_rng(4);
    const Geometry geo = place_uniform(10, 5000.0, 5000.0, {}, a);
    (void)place_uniform(10, 5000.0, 5000.0, {}, b);
    const GainMatrix g1 = build_gain_matrix(geo, ChannelSettings{}, a);
    const GainMatrix g2 = build_gain_matrix(geo, ChannelSettings{}, b);
    EXPECT_EQ(g1.entries, g2.entries);
    EXPECT_EQ(g1.serving_bs, g2.serving_bs);
}

TEST(Channel, ZeroErrorIsBitIdenticalAndDrawsNothing) {
    Rng rng = make_rng(3);
    const GainMatrix g = build_gain_matrix(place_uniform(8, 5000.0, 5000.0, {}, rng), ChannelSettings{}, rng);
    Rng e = make_rng(99), untouched = make_rng(99);
    const GainMatrix p = perturb(g, {0.0, true}, e);
    EXPECT_EQ(p.entries, g.entries);
    EXPECT_EQ(e(), untouched());
}

TEST(Channel, ErrorRatiosStayInsideTheBand) {
    Rng rng = make_rng(3);
    const GainMatrix g = build_gain_matrix(place_uniform(10, 5000.0, 5000.0, {}, rng), ChannelSettings{}, rng);
    Rng e = make_rng(5);
    for (int rep = 0; rep < 100; ++rep) {
        const GainMatrix p = perturb(g, {0.2, true}, e);
        const Eigen::ArrayXXd ratio = p.entries.array() / g.entries.array();
        EXPECT_GE(ratio.minCoeff(), 0.8);
        EXPECT_LE(ratio.maxCoeff(), 1.2);
    }
}

TEST(Channel, ErrorIsUnbiased) {
    Matrix one = Matrix::Ones(100, 1000);
    Matrix out;
    Rng e = make_rng(6);
    perturb_into(one, 0.2, e, out);
    EXPECT_NEAR(out.mean(), 1.0, 0.003);
}

TEST(Channel, ErrorHalfWidthValidated) {
    Matrix one = Matrix::Ones(2, 2), out;
    Rng e = make_rng(6);
    EXPECT_THROW(perturb_into(one, 1.0, e, out), ValidationError);
    EXPECT_THROW(perturb_into(one, -0.1, e, out), ValidationError);
}

TEST(Channel, EmptyGeometryRejected) {
    Rng rng = make_rng(1);
    EXPECT_THROW((void)build_gain_matrix(one_bs({}), ChannelSettings{}, rng), ValidationError);
    Geometry nobs;
    nobs.mt_positions = {{1.0, 1.0}};
    EXPECT_THROW((void)build_gain_matrix(nobs, ChannelSettings{}, rng), ValidationError);
}
