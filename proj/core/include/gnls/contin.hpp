#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gnls/colloc.hpp"
#include "gnls/floquet.hpp"
#include "gnls/sections.hpp"

namespace gnls {

enum class FamilyKind { EnergyFamily, Beta2Family };
const char* to_string(FamilyKind f);

enum class BifKind { SB, PD, SN, Fold, Tk, Bk, BkHat, CSB, CSN, CTk, CBk, CBkHat, Event };
const char* to_string(BifKind k);

struct BifurcationPoint {
    BifKind kind = BifKind::Event;
    double beta2 = 0.0;
    double energy = 0.0;
    std::optional<int> k;
    std::optional<int> p;
    OrbitSolution orbit;
    FloquetData floquet;
    FamilyKind family = FamilyKind::EnergyFamily;
    std::string label;
    double s = 0.0;  // arclength on the parent branch
};

// Scalar function of an orbit whose sign changes mark an event.
struct Monitor {
    std::string name;
    std::function<double(const OrbitSolution&)> fn;
    BifKind kind = BifKind::Event;
    int k = 0;  // resonance order and numerator for rotation monitors
    int p = 0;
};

Monitor monitor_energy(double H0 = 0.0);
Monitor monitor_trace(double target, BifKind kind);  // trace of deflated block minus target
Monitor monitor_rotation(int p, int k);              // rotation number minus p/k
Monitor monitor_beta2(double b0);
Monitor monitor_period(double T0);
// Contact monitor near a state: u2 at the nearest critical point of u2 (quadratic), or u3 at the
// nearest Sigma1 crossing (cubic).
Monitor monitor_tangency(const State4& near, Contact kind);

struct StepControl {
    double ds_init = 0.02;
    double ds_min = 1e-7;
    double ds_max = 1.0;
    int max_steps = 5000;
    double T_max = 200.0;
    double box = 50.0;
    double H_min = -std::numeric_limits<double>::infinity();
    double H_max = std::numeric_limits<double>::infinity();
    double beta2_min = -std::numeric_limits<double>::infinity();
    double beta2_max = std::numeric_limits<double>::infinity();
    int direction = 1;           // sign of the initial change of the free scalar
    int snapshot_every = 10;
    double max_alpha_jump = 0.25;
    int remesh_every = 10;
    int ntst_max = 800;
    double newton_tol = 1e-10;
    int newton_max_iter = 8;
    bool floquet = true;
    bool sections = true;
    bool symmetric = true;  // keep the half-shift symmetry of R* starting orbits
    std::vector<Monitor> events;
    std::function<bool(const OrbitSolution&)> stop;  // extra predicate, true stops
};

struct BranchPoint {
    double s = 0.0;
    double ds = 0.0;  // step that produced the point
    double beta2 = 0.0;
    double H = 0.0;
    double T = 0.0;
    double eps = 0.0;
    double max_u = 0.0;
    int iterations = 0;
    std::optional<FloquetData> floquet;
    std::vector<SigmaPoint> sigma;
    int loops = -1;  // -1 when the projection is degenerate
    int snapshot = -1;
    int event = -1;  // index into Branch::events when the point was inserted by event location
};

struct Snapshot {
    int point = 0;
    OrbitSolution orbit;
    Eigen::VectorXd tangent;
};

struct Branch {
    FamilyKind family = FamilyKind::EnergyFamily;
    int direction = 1;
    double pinned_energy = 0.0;  // Beta2Family only
    BvpSpec spec;
    StepControl ctl;
    std::vector<BranchPoint> points;
    std::vector<Snapshot> snapshots;
    std::vector<BifurcationPoint> events;
    bool stalled = false;
    std::string stop_reason;

    // Orbit at point i, regenerated from the nearest snapshot when not stored.
    OrbitSolution orbit_at(int i) const;
    double scalar(int i) const;
};

Branch extend_branch(const OrbitSolution& start, FamilyKind family, const StepControl& ctl);

// Orbit at which the monitor vanishes between points which and which+1; inserted into the branch.
OrbitSolution locate_event(Branch& branch, const Monitor& test, int which);

std::vector<OrbitSolution> fold_points(const Branch& branch);

// Record for an orbit (all monitors); used by the continuation and the drivers.
BranchPoint describe(const OrbitSolution& orbit, bool with_floquet, bool with_sections);

}  // namespace gnls
