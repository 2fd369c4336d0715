#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gnls/branching.hpp"
#include "gnls/drivers.hpp"

using namespace gnls;

TEST(Branching, ClassifySymmetry) {
    EXPECT_EQ(classify_symmetry(fx::gamma_star()), Symmetry::Rstar);
    EXPECT_EQ(classify_symmetry(fx::gamma1_plus()), Symmetry::R1only);
    EXPECT_EQ(classify_symmetry(apply_reversor(fx::gamma1_plus(), 2)), Symmetry::R1only);
}

TEST(Branching, HausdorffOfReversorImages) {
    const OrbitSolution& g = fx::gamma1_plus();
    EXPECT_LE(hausdorff(g, apply_reversor(g, 1), 1000), 1e-6);  // R1-symmetric: same set
    EXPECT_GT(hausdorff(g, apply_reversor(g, 2), 1000), 0.1);   // the other orbit of the pair
}

TEST(Branching, SigmaPlaneDistanceOfSymmetricOrbit) {
    EXPECT_LE(sigma_plane_distance(fx::gamma_star(), 1), 1e-8);
    EXPECT_LE(sigma_plane_distance(fx::gamma_star(), 2), 1e-8);
    EXPECT_GT(sigma_plane_distance(fx::gamma1_plus(), 2), 1e-3);
}

TEST(Branching, SymmetryBreakingAtSBGivesR1Pair) {
    BifurcationSpec s;
    s.kind = "SB";
    s.beta2_hi = 0.605;
    const BifurcationPoint sb = find_bifurcation_seed(Params{}, s);
    EXPECT_NEAR(sb.beta2, 0.60064, 2e-3);
    SwitchOptions so;
    so.follow_steps = 0;
    const SwitchResult r = switch_branch_sb(sb, so);
    ASSERT_EQ(r.families.size(), 2u);
    for (const SwitchedFamily& f : r.families) {
        EXPECT_TRUE(f.symmetry == Symmetry::R1only || f.symmetry == Symmetry::R2only);
        EXPECT_NEAR(f.first.period, sb.orbit.period, 1e-2 * sb.orbit.period);
    }
    EXPECT_GT(hausdorff(r.families[0].first, r.families[1].first, 800), 1e-4);
}

TEST(Branching, BHat2GivesR1AndR2Pairs) {
    BifurcationSpec s;
    s.kind = "BHAT";
    s.k = 2;
    s.p = 1;
    s.beta2_hi = 0.70;
    const BifurcationPoint b = find_bifurcation_seed(Params{}, s);
    SwitchOptions so;
    so.follow_steps = 0;
    const SwitchResult r = switch_branch_periodk(b, 2, 1, so);
    EXPECT_EQ(r.kind, BifKind::BkHat);
    int r1 = 0, r2 = 0;
    for (const SwitchedFamily& f : r.families) {
        r1 += f.symmetry == Symmetry::R1only;
        r2 += f.symmetry == Symmetry::R2only;
    }
    EXPECT_EQ(r1, 2);
    EXPECT_EQ(r2, 2);
    EXPECT_FALSE(r.wrong_multiplicity);
}

TEST(Branching, PeriodKRejectsKBelowTwo) {
    BifurcationPoint bp;
    bp.orbit = fx::gamma_star();
    EXPECT_THROW(switch_branch_periodk(bp, 1, 0), std::invalid_argument);
}

TEST(Branching, InterleavingCheck) {
    auto row = [](int k, int p, double b) {
        Table1Row r;
        r.k = k;
        r.p = p;
        r.beta2_crossing = b;
        return r;
    };
    std::vector<Table1Row> good{row(3, 1, 0.6399), row(2, 1, 0.6867), row(5, 3, 0.7206), row(3, 2, 0.7439), row(7, 5, 0.7602)};
    EXPECT_TRUE(check_interleaving(good));
    std::vector<Table1Row> bad = good;
    bad[1].beta2_crossing = 0.73;  // BHAT2 after B5
    EXPECT_FALSE(check_interleaving(bad));
}
