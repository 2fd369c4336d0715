#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "gnls/colloc.hpp"

namespace gnls {

enum class OrbitClass { Elliptic, HyperbolicOrientable, HyperbolicNonOrientable, Parabolic };
const char* to_string(OrbitClass c);

struct FloquetData {
    std::array<std::complex<double>, 4> multipliers;  // trivial pair first
    std::array<std::complex<double>, 2> nontrivial_pair;
    std::optional<double> rotation_number;  // present whenever |trace| <= 2 + 1e-6
    OrbitClass orbit_class = OrbitClass::Parabolic;
    double trace = 0.0;           // trace of the deflated 2x2 block
    Eigen::Matrix2d block;        // deflated block in a positively oriented basis
    bool ill_conditioned = false;
    bool deflation_fallback = false;
};

struct MonodromyInfo {
    Mat4 M;
    bool ill_conditioned = false;
};

// Variational equations integrated by RKF78 along the collocation interpolant.
MonodromyInfo monodromy_info(const OrbitSolution& orbit);
Mat4 monodromy(const OrbitSolution& orbit);

FloquetData nontrivial_multipliers(const Mat4& M, const State4& u0, const Params& p);
FloquetData floquet(const OrbitSolution& orbit);

// Angle of the elliptic pair from a 2x2 block, accurate near both +1 and -1.
double block_angle(const Eigen::Matrix2d& B);

}  // namespace gnls
