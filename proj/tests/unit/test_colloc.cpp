#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "gnls/branching.hpp"
#include "gnls/colloc.hpp"
#include "gnls/floquet.hpp"

using namespace gnls;

TEST(Colloc, GaussLegendreIntegratesPolynomialsExactly) {
    std::vector<double> x, w;
    gauss_legendre(4, x, w);
    for (int d = 0; d <= 7; ++d) {
        double s = 0.0;
        for (int i = 0; i < 4; ++i) s += w[i] * std::pow(x[i], d);
        EXPECT_NEAR(s, 1.0 / (d + 1), 1e-15);
    }
}

TEST(Colloc, UniformMeshIsValid) {
    const Mesh m = Mesh::uniform(200, 4);
    EXPECT_NO_THROW(m.validate());
    EXPECT_EQ(m.nodes(), 801);
    EXPECT_TRUE(m.half_shift_compatible());
}

TEST(Colloc, GammaStarConverged) {
    const OrbitSolution& o = fx::gamma_star();
    EXPECT_LE(build_residual(o, Constraint::energy(0.0)).norm(), 1e-9);
    EXPECT_LE(std::abs(o.eps), 1e-10);
    EXPECT_NEAR(o.energy, 0.0, 1e-10);
    EXPECT_GT(o.period, 1.0);
}

TEST(CollocProperty, EnergyConstantAlongInterpolant) {
    const OrbitSolution& o = fx::gamma_star();
    for (int i = 0; i <= 2000; ++i) EXPECT_NEAR(hamiltonian(evaluate(o, i / 2000.0), o.params), o.energy, 1e-8);
}

TEST(CollocProperty, HalfShiftSymmetryOfGammaStar) {
    const OrbitSolution& o = fx::gamma_star();
    for (int i = 0; i < 500; ++i) {
        const double t = i / 1000.0;
        EXPECT_LE((evaluate(o, t + 0.5) + evaluate(o, t)).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(Colloc, EvaluateIsPeriodic) {
    const OrbitSolution& o = fx::gamma_star();
    EXPECT_LE((evaluate(o, 0.0) - evaluate(o, 1.0)).norm(), 1e-9);
    EXPECT_LE((evaluate(o, 0.3) - evaluate(o, 1.3)).norm(), 1e-12);
}

TEST(Colloc, NewtonFromPerturbedStart) {
    const OrbitSolution& o = fx::gamma_star();
    OrbitSolution s = o;
    s.values *= 1.002;
    s.period *= 0.999;
    const OrbitSolution r = newton_solve(s, Constraint::energy(0.0));
    EXPECT_NEAR(r.period, o.period, 1e-7);
    EXPECT_NEAR(r.energy, 0.0, 1e-10);
}

TEST(Colloc, ReversorImageIsASolution) {
    const OrbitSolution img = apply_reversor(fx::gamma1_plus(), 2);
    EXPECT_LE(build_residual(img, Constraint::energy(0.0)).norm(), 1e-8);
    const OrbitSolution r = newton_solve(img, Constraint::energy(0.0));
    EXPECT_LE(r.iterations, 2);
}

TEST(Colloc, RemeshKeepsTheOrbit) {
    const OrbitSolution& o = fx::gamma_star();
    const OrbitSolution r = remesh(o);
    EXPECT_NEAR(r.period, o.period, 1e-7);
    EXPECT_LE(hausdorff(r, o, 800), 1e-6);
}

TEST(Colloc, KCoverTriplesPeriodAndKeepsEnergy) {
    const OrbitSolution& o = fx::gamma_star();
    const OrbitSolution c = k_cover(o, 3);
    EXPECT_NEAR(c.period, 3 * o.period, 1e-8 * o.period);
    EXPECT_NEAR(c.energy, o.energy, 1e-10);
    for (int i = 0; i < 300; ++i) {
        const double t = i / 300.0;
        for (int j = 0; j < 3; ++j) EXPECT_LE((evaluate(c, (t + j) / 3.0) - evaluate(o, t)).norm(), 1e-7);
    }
}

TEST(Colloc, CollocationMonodromyMatchesVariational) {
    const OrbitSolution& o = fx::gamma_star();
    const Mat4 a = monodromy_collocation(o), b = monodromy(o);
    EXPECT_LE((a - b).norm() / b.norm(), 1e-5);
}
