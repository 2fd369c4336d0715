#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "gnls/contin.hpp"
#include "gnls/rotation.hpp"

using namespace gnls;

namespace {

const Branch& zero_energy_family() {
    static const Branch b = [] {
        StepControl c;
        c.sections = false;
        c.beta2_max = 0.70;
        Branch br = extend_branch(fx::gamma_star(), FamilyKind::Beta2Family, c);
        return br;
    }();
    return b;
}

}  // namespace

TEST(Contin, EnergyFamilyLocatesZeroEnergyEvent) {
    StepControl c;
    c.T_max = 8.0;
    c.sections = false;
    c.floquet = false;
    c.events = {monitor_energy(0.0)};
    const Branch br = extend_branch(fx::gamma_star(), FamilyKind::EnergyFamily, c);
    ASSERT_GE(br.events.size(), 2u);
    for (const BifurcationPoint& e : br.events) EXPECT_NEAR(e.energy, 0.0, 1e-9);
    EXPECT_NEAR(br.events[1].orbit.period, 7.108514, 1e-3);
}

TEST(ContinProperty, PointsSatisfyPinnedEnergy) {
    const Branch& br = zero_energy_family();
    ASSERT_GT(br.points.size(), 5u);
    for (std::size_t i = 0; i < br.points.size(); ++i) EXPECT_NEAR(br.points[i].H, 0.0, 1e-8);
    for (std::size_t i = 1; i < br.points.size(); ++i) EXPECT_GT(br.points[i].s, br.points[i - 1].s);
}

TEST(ContinProperty, RegeneratedOrbitsMatchStoredPoints) {
    const Branch& br = zero_energy_family();
    for (int i : {0, int(br.points.size()) / 2, int(br.points.size()) - 1}) {
        const OrbitSolution o = br.orbit_at(i);
        EXPECT_NEAR(o.params.beta2, br.points[i].beta2, 1e-9);
        EXPECT_NEAR(o.period, br.points[i].T, 1e-7 * br.points[i].T);
    }
}

TEST(Rotation, UnwrappedAlphaIsMonotoneAndSmooth) {
    const auto rs = rotation_number_along(zero_energy_family());
    ASSERT_GT(rs.size(), 3u);
    for (std::size_t i = 1; i < rs.size(); ++i) {
        EXPECT_GT(rs[i].alpha, rs[i - 1].alpha);
        EXPECT_LT(rs[i].alpha - rs[i - 1].alpha, 0.25);
    }
}

TEST(Rotation, ResonanceEventsFilterByOrder) {
    Branch br = zero_energy_family();
    const auto ev = resonance_events(br, 2);
    ASSERT_EQ(ev.size(), 1u);
    EXPECT_EQ(*ev[0].k, 2);
    EXPECT_EQ(*ev[0].p, 1);
    EXPECT_NEAR(ev[0].beta2, 0.68667, 2e-3);
    ASSERT_TRUE(ev[0].floquet.rotation_number.has_value());
    EXPECT_NEAR(*ev[0].floquet.rotation_number, 0.5, 1e-6);
    // a second call reuses the located event
    EXPECT_EQ(resonance_events(br, 2).size(), 1u);
}

TEST(Rotation, ResonanceEventsAreCoprimeAndOrdered) {
    Branch br = zero_energy_family();
    const auto ev = resonance_events(br, 6);
    ASSERT_FALSE(ev.empty());
    for (std::size_t i = 0; i < ev.size(); ++i) {
        EXPECT_EQ(std::gcd(*ev[i].p, *ev[i].k), 1);
        if (i) EXPECT_GT(ev[i].beta2, ev[i - 1].beta2);
    }
}

TEST(Contin, ShortEnergyRunHasNoFold) {
    StepControl c;
    c.max_steps = 5;
    c.sections = false;
    c.floquet = false;
    const Branch br = extend_branch(fx::gamma_star(), FamilyKind::EnergyFamily, c);
    EXPECT_TRUE(fold_points(br).empty());
}
