#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "gnls/branching.hpp"
#include "gnls/floquet.hpp"
#include "gnls/integrate.hpp"

using namespace gnls;

namespace {

void check_invariants(const FloquetData& fd) {
    std::complex<double> prod = 1.0;
    for (const auto& z : fd.multipliers) prod *= z;
    EXPECT_LE(std::abs(prod - 1.0), 1e-6);
    EXPECT_LE(std::abs(fd.multipliers[0] - 1.0), 1e-4);
    EXPECT_LE(std::abs(fd.multipliers[1] - 1.0), 1e-4);
    EXPECT_LE(std::abs(fd.nontrivial_pair[0] * fd.nontrivial_pair[1] - 1.0), 1e-6);
    EXPECT_EQ(fd.orbit_class == OrbitClass::Elliptic,
              std::abs(std::abs(fd.nontrivial_pair[0]) - 1.0) < 1e-6 && std::abs(fd.trace) < 2.0);
}

}  // namespace

TEST(Floquet, MonodromyHasUnitDeterminant) {
    EXPECT_NEAR(monodromy(fx::gamma_star()).determinant(), 1.0, 1e-6);
}

TEST(Floquet, GammaStarInvariants) { check_invariants(floquet(fx::gamma_star())); }

TEST(Floquet, TrivialPairHasEigenvectorAlongFlow) {
    const OrbitSolution& o = fx::gamma_star();
    const Mat4 M = monodromy(o);
    const State4 f = vector_field(o.start(), o.params);
    EXPECT_LE((M * f - f).norm(), 1e-6 * f.norm());
}

TEST(Floquet, MonodromyMatchesDirectIntegration) {
    // independent oracle: integrate u and the variational system together from u(0)
    const OrbitSolution& o = fx::gamma_star();
    const Params p = o.params;
    auto rhs = [&](const Eigen::Matrix<double, 4, 5>& y) {
        Eigen::Matrix<double, 4, 5> d;
        const State4 u = y.col(0);
        d.col(0) = o.period * vector_field(u, p);
        d.rightCols<4>() = o.period * jacobian(u, p) * y.rightCols<4>();
        return d;
    };
    Eigen::Matrix<double, 4, 5> y;
    y.col(0) = o.start();
    y.rightCols<4>() = Mat4::Identity();
    const int n = 20000;
    const double h = 1.0 / n;
    for (int i = 0; i < n; ++i) {
        const auto k1 = rhs(y);
        const auto k2 = rhs(y + 0.5 * h * k1);
        const auto k3 = rhs(y + 0.5 * h * k2);
        const auto k4 = rhs(y + h * k3);
        y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    const Mat4 Md = y.rightCols<4>();
    const Mat4 M = monodromy(o);
    EXPECT_LE((M - Md).norm() / Md.norm(), 1e-5);
}

TEST(Floquet, ReversorImageHasSameFloquetData) {
    const OrbitSolution& a = fx::gamma1_plus();
    const FloquetData fa = floquet(a), fb = floquet(apply_reversor(a, 2));
    EXPECT_NEAR(fa.trace, fb.trace, 1e-8);
    EXPECT_EQ(fa.orbit_class, fb.orbit_class);
    check_invariants(fb);
}

TEST(Floquet, CoverMultipliersArePowers) {
    const OrbitSolution& o = fx::gamma_star();
    const FloquetData f1 = floquet(o), f3 = floquet(k_cover(o, 3));
    const auto z = f1.nontrivial_pair[0];
    const auto z3 = z * z * z;
    const double d = std::min(std::abs(f3.nontrivial_pair[0] - z3), std::abs(f3.nontrivial_pair[1] - z3));
    EXPECT_LE(d / std::max(1.0, std::abs(z3)), 1e-5);
}

TEST(Floquet, BlockAngleOfRotation) {
    for (double th : {0.1, 1.0, 2.0, 3.0, -0.5}) {
        Eigen::Matrix2d B;
        B << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        EXPECT_NEAR(block_angle(B), th, 1e-12);
    }
}

TEST(Floquet, ClassificationOfSyntheticBlocks) {
    const Params p;
    Mat4 M = Mat4::Identity();
    // zero state: no flow direction, so the eigenvalue fallback is taken
    Eigen::Matrix2d R;
    const double th = 2 * M_PI / 3;
    R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    M.block<2, 2>(2, 2) = R;
    const FloquetData fd = nontrivial_multipliers(M, State4::Zero(), p);
    EXPECT_TRUE(fd.deflation_fallback);
    EXPECT_EQ(fd.orbit_class, OrbitClass::Elliptic);
    ASSERT_TRUE(fd.rotation_number.has_value());
    const double a = *fd.rotation_number;
    EXPECT_TRUE(std::abs(a - 1.0 / 3) < 1e-12 || std::abs(a - 2.0 / 3) < 1e-12);
    Mat4 H = Mat4::Identity();
    H(2, 2) = 3.0;
    H(3, 3) = 1.0 / 3.0;
    EXPECT_EQ(nontrivial_multipliers(H, State4::Zero(), p).orbit_class, OrbitClass::HyperbolicOrientable);
    H(2, 2) = -3.0;
    H(3, 3) = -1.0 / 3.0;
    EXPECT_EQ(nontrivial_multipliers(H, State4::Zero(), p).orbit_class, OrbitClass::HyperbolicNonOrientable);
}
