#include "fixtures.hpp"

#include "gnls/drivers.hpp"
#include "gnls/seed.hpp"

namespace fx {

const gnls::OrbitSolution& gamma_star() {
    static const gnls::OrbitSolution o = gnls::seed_rstar_orbit(gnls::Params{}, 1.0261, -3.4592, 0.0);
    return o;
}

const gnls::OrbitSolution& gamma1_plus() {
    static const gnls::OrbitSolution o = gnls::gamma1_at(gnls::Params{}, 0.0, 1);
    return o;
}

}  // namespace fx
