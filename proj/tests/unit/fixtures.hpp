#pragma once

#include "gnls/colloc.hpp"

namespace fx {

// R*-symmetric single loop at beta2 = 0.4, H = 0.
const gnls::OrbitSolution& gamma_star();
// R1-symmetric zero-energy orbit of the family born at E+, beta2 = 0.4.
const gnls::OrbitSolution& gamma1_plus();

}  // namespace fx
