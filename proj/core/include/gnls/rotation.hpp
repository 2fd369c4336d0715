#pragma once

#include <vector>

#include "gnls/contin.hpp"

namespace gnls {

struct RotationSample {
    int point = 0;      // index into Branch::points
    double scalar = 0;  // beta2 or H
    double alpha = 0;   // unwrapped along the branch
    bool edge = false;  // a neighbour has lost ellipticity
};

// Rotation number at the elliptic points of a branch, unwrapped so consecutive samples differ by
// less than 1/2. Points inserted by event location are skipped.
std::vector<RotationSample> rotation_number_along(const Branch& branch);

// Crossings alpha = p/k (gcd(p, k) = 1, 2 <= k <= k_max) located on the branch; the located
// orbits are inserted into the branch as events.
std::vector<BifurcationPoint> resonance_events(Branch& branch, int k_max);

}  // namespace gnls
