#pragma once

#include "gnls/colloc.hpp"
#include "gnls/integrate.hpp"

namespace gnls {

struct SeedOptions {
    int ntst = 200;
    int ncol = 4;
    double box = 50.0;
    double tol = 1e-10;
};

// Harmonic orbit of the linearization at an equilibrium, Newton-corrected.
OrbitSolution seed_lyapunov_orbit(const State4& eq, const Params& p, double amplitude, const SeedOptions& opt = {});

// Quarter-period shooting from (u1, 0, u3, 0) on Sigma1 to Sigma2, assembled by reflection.
OrbitSolution seed_rstar_orbit(const Params& p, double u1, double u3, double H_target, const SeedOptions& opt = {});

// Half-period shooting from Sigma1 back to Sigma1; tau_guess is the half period.
OrbitSolution seed_r1_orbit(const Params& p, double u1, double u3, double H_target, double tau_guess,
                            const SeedOptions& opt = {});

struct ShootResult {
    double u1, u3, tau;
};
ShootResult shoot_symmetric(const Params& p, double u1, double u3, double tau, double H_target, bool to_sigma2,
                            double box = 50.0);

}  // namespace gnls
