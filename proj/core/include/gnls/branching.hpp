#pragma once

#include <string>
#include <vector>

#include "gnls/contin.hpp"

namespace gnls {

// Same closed curve traversed k times (period kT), re-converged at fixed energy.
// refine = false returns the concatenated copies, already a discrete solution when orbit is converged.
OrbitSolution k_cover(const OrbitSolution& orbit, int k, bool refine = true);

// Symmetry from the distance of the orbit to the planes Sigma1 and Sigma2.
Symmetry classify_symmetry(const OrbitSolution& orbit, double tol = 1e-6);

// Distance of the point in Sigma1 (or Sigma2) closest to the orbit.
double sigma_plane_distance(const OrbitSolution& orbit, int which);

// Symmetric Hausdorff distance between the point sets of two orbits (dense sampling).
double hausdorff(const OrbitSolution& a, const OrbitSolution& b, int samples = 2000);

struct SwitchOptions {
    std::vector<double> amplitudes{1e-4, 3e-4, 1e-3, 3e-3, 1e-2};  // in units of max |u|, largest tried first
    StepControl ctl;      // continuation of the bifurcating families
    int follow_steps = 12;  // steps taken along each new family (0: only the first corrected orbit)
};

struct SwitchedFamily {
    OrbitSolution first;  // first corrected orbit off the parent
    OrbitSolution last;   // last computed member
    Branch branch;        // empty when follow_steps == 0
    Symmetry symmetry = Symmetry::Unclassified;  // of the first corrected orbit
    OrbitClass stability = OrbitClass::Parabolic;  // at the last computed member
    double amplitude = 0.0;
    double distance_from_parent = 0.0;  // Hausdorff distance of the last member from the parent cover
    std::string origin;                 // which candidate direction produced it
};

struct SwitchResult {
    BifKind kind = BifKind::Event;  // decided from the symmetry of the results
    int k = 1;
    int p = 0;
    std::vector<SwitchedFamily> families;
    bool wrong_multiplicity = false;
};

// Families bifurcating at a symmetry-breaking point of an R*-symmetric family: the R1-only
// family found along the kernel direction and its R2 image.
SwitchResult switch_branch_sb(const BifurcationPoint& sb, const SwitchOptions& opt = {});

// Families bifurcating at a p:k resonance of the parent family.
SwitchResult switch_branch_periodk(const BifurcationPoint& res, int k, int p, const SwitchOptions& opt = {});

struct BifCurveOptions {
    double ds_init = 0.004;
    double ds_min = 1e-7;
    double ds_max = 0.02;
    int max_steps = 400;
    int direction = 1;  // sign of the initial change of the curve parameter (H or T)
    double H_min = -1.0;
    double H_max = 1.0;
    int points_after_fold = 6;  // curve points kept past a fold before stopping; < 0 continues
    double tol = 1e-10;         // on the defining condition
};

struct BifCurve {
    BifKind kind = BifKind::Event;
    int k = 1;
    int p = 0;
    std::vector<BifurcationPoint> points;
    std::vector<BifurcationPoint> folds;           // degenerate points
    std::vector<double> zero_crossings;            // beta2 where H = 0
    std::vector<BifurcationPoint> zero_points;
    std::string stop_reason;
};

// Scalar defining condition of a codimension-one point of the given kind.
double bif_condition(const OrbitSolution& orbit, BifKind kind, int k, int p);

BifKind degenerate_kind(BifKind kind);

// Curve of codimension-one points in (beta2, H) through the seed, restricted to the beta2 window.
// For SN seeds the curve is traced as the fold of the family over beta2 and ds_max is the H step.
BifCurve continue_bif_point(const BifurcationPoint& seed, double beta2_lo, double beta2_hi,
                            const BifCurveOptions& opt = {});

}  // namespace gnls
