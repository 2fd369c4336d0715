#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gnls/model.hpp"

using namespace gnls;

namespace {

State4 random_state(std::mt19937_64& rng, double scale = 3.0) {
    std::uniform_real_distribution<double> d(-scale, scale);
    return State4(d(rng), d(rng), d(rng), d(rng));
}

Params random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> b(-1.5, 1.5);
    Params p;
    p.beta2 = b(rng);
    return p;
}

}  // namespace

TEST(Model, VectorFieldComponents) {
    const Params p;
    const State4 u(0.5, -0.25, 1.5, 2.0);
    const State4 f = vector_field(u, p);
    EXPECT_DOUBLE_EQ(f[0], u[1]);
    EXPECT_DOUBLE_EQ(f[1], u[2]);
    EXPECT_DOUBLE_EQ(f[2], u[3]);
    const double expect = (24.0 / p.beta4) * (0.5 * p.beta2 * u[2] + p.mu * u[0] - p.gamma * u[0] * u[0] * u[0]);
    EXPECT_NEAR(f[3], expect, 1e-14);
}

TEST(Model, DefaultsMatchFixedCoefficients) {
    const Params p;
    EXPECT_EQ(p.beta4, -1.0);
    EXPECT_EQ(p.gamma, 1.0);
    EXPECT_EQ(p.mu, 1.0);
}

TEST(Model, ValidateRejectsZeroBeta4) {
    Params p;
    p.beta4 = 0.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(ModelProperty, ReversibilityEnergyAndDivergence) {
    std::mt19937_64 rng(20260101);
    for (int i = 0; i < 10000; ++i) {
        const Params p = random_params(rng);
        const State4 u = random_state(rng);
        const State4 f = vector_field(u, p);
        const double s = 1.0 + f.norm();
        EXPECT_LE((vector_field(apply_R1(u), p) + apply_R1(f)).norm(), 1e-10 * s);
        EXPECT_LE((vector_field(apply_R2(u), p) + apply_R2(f)).norm(), 1e-10 * s);
        EXPECT_LE(std::abs(grad_H(u, p).dot(f)), 1e-10 * s * (1.0 + grad_H(u, p).norm()));
        EXPECT_LE(std::abs(jacobian(u, p).trace()), 1e-10);
    }
}

TEST(ModelProperty, HamiltonianReversorInvariant) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const Params p = random_params(rng);
        const State4 u = random_state(rng);
        const double H = hamiltonian(u, p);
        EXPECT_NEAR(hamiltonian(apply_R1(u), p), H, 1e-10 * (1 + std::abs(H)));
        EXPECT_NEAR(hamiltonian(apply_R2(u), p), H, 1e-10 * (1 + std::abs(H)));
    }
}

TEST(ModelProperty, JacobianAndGradientMatchFiniteDifferences) {
    std::mt19937_64 rng(42);
    const double h = 1e-6;
    for (int i = 0; i < 1000; ++i) {
        const Params p = random_params(rng);
        const State4 u = random_state(rng, 2.0);
        const Mat4 J = jacobian(u, p);
        const State4 g = grad_H(u, p);
        for (int j = 0; j < 4; ++j) {
            State4 e = State4::Zero();
            e[j] = h;
            const State4 col = (vector_field(u + e, p) - vector_field(u - e, p)) / (2 * h);
            EXPECT_LE((col - J.col(j)).cwiseAbs().maxCoeff(), 1e-6 * (1 + J.col(j).norm()));
            const double dH = (hamiltonian(u + e, p) - hamiltonian(u - e, p)) / (2 * h);
            EXPECT_NEAR(dH, g[j], 1e-6 * (1 + std::abs(g[j])));
        }
    }
}

TEST(Model, PoissonStructure) {
    std::mt19937_64 rng(3);
    const Params p;
    const Mat4 Jp = poisson_matrix(p);
    EXPECT_LE((Jp + Jp.transpose()).norm(), 1e-14);
    for (int i = 0; i < 100; ++i) {
        const State4 u = random_state(rng);
        EXPECT_LE((Jp * grad_H(u, p) - vector_field(u, p)).norm(), 1e-10 * (1 + vector_field(u, p).norm()));
    }
}

TEST(Model, Beta2Derivatives) {
    const Params p;
    const State4 u(0.3, -0.7, 1.1, 0.4);
    const double h = 1e-6;
    Params a = p, b = p;
    a.beta2 += h;
    b.beta2 -= h;
    EXPECT_LE(((vector_field(u, a) - vector_field(u, b)) / (2 * h) - dfield_dbeta2(u, p)).norm(), 1e-7);
    EXPECT_NEAR((hamiltonian(u, a) - hamiltonian(u, b)) / (2 * h), dH_dbeta2(u, p), 1e-7);
    EXPECT_LE(((grad_H(u, a) - grad_H(u, b)) / (2 * h) - dgradH_dbeta2(u, p)).norm(), 1e-7);
}

TEST(Model, EquilibriaAreZerosOfTheField) {
    const Params p;
    const auto eqs = equilibria(p);
    ASSERT_EQ(eqs.size(), 3u);
    for (const State4& e : eqs) EXPECT_LE(vector_field(e, p).norm(), 1e-14);
}

TEST(Model, OriginSpectrumBoundaryIsSqrtTwoThirds) {
    Params p;
    p.beta2 = 0.4;
    const SpectrumKind below = classify_origin(p).kind;
    p.beta2 = 1.2;
    const SpectrumKind above = classify_origin(p).kind;
    ASSERT_NE(below, above);
    double lo = 0.4, hi = 1.2;
    while (hi - lo > 1e-13) {
        p.beta2 = 0.5 * (lo + hi);
        (classify_origin(p).kind == below ? lo : hi) = p.beta2;
    }
    EXPECT_NEAR(0.5 * (lo + hi), std::sqrt(2.0 / 3.0), 1e-9);
}

TEST(Model, OriginSpectrumKinds) {
    Params p;
    p.beta2 = 0.4;
    EXPECT_EQ(classify_origin(p).kind, SpectrumKind::ComplexQuadruple);
    p.beta2 = 1.0;
    EXPECT_EQ(classify_origin(p).kind, SpectrumKind::ImaginaryQuadruple);
    p.beta2 = -1.0;
    EXPECT_EQ(classify_origin(p).kind, SpectrumKind::RealQuadruple);
}
