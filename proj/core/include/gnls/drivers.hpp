#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gnls/branching.hpp"
#include "gnls/config.hpp"
#include "gnls/output.hpp"

namespace gnls {

// R*-symmetric single-loop orbit at (beta2, H), reached from the known orbit at beta2 = 0.4, H = 0
// (default beta4, gamma, mu only).
OrbitSolution gamma_star_at(const Params& p, double H = 0.0);

// R1-symmetric orbit of the family born at E+ (equilibrium = 1) or E- (-1), at energy H.
OrbitSolution gamma1_at(const Params& p, double H = 0.0, int equilibrium = 1);

OrbitSolution build_seed(const RunConfig& cfg);

// Codimension-one point of the requested kind on the zero-energy Gamma* family (SN: the fold of
// the 3-loop family at fixed energy; PD: on the R1 family born at SB).
BifurcationPoint find_bifurcation_seed(const Params& p, const BifurcationSpec& spec);

struct Table1Row {
    std::string label;      // SB, T3, B5, BHAT2, ...
    std::string predicted;  // label expected from the rotation-number pattern
    int k = 1;
    int p = 0;
    double alpha = 0.0;
    double beta2_crossing = 0.0;  // event on the zero-energy Gamma* family
    std::optional<double> beta2_curve_zero;  // H = 0 crossing of the bifurcation curve
    std::optional<double> beta2_degenerate;
    std::optional<double> H_degenerate;
    int families = 0;
    bool wrong_multiplicity = false;
    bool pattern_ok = false;
    std::string error;
};

struct Table1Result {
    std::vector<Table1Row> rows;
    std::vector<BifurcationPoint> resonances;  // every p/k crossing up to k_max
    bool interleaving_ok = false;
    double seconds = 0.0;
};

Table1Result compute_table1(const RunConfig& cfg, EventLog* log = nullptr);

// Both label sequences (T3, B5, B7, ... and BHAT2, BHAT3, ...) increase in beta2 with k and alternate
// as B_{2m+1} < BHAT_{m+1} < B_{2m+3}.
bool check_interleaving(const std::vector<Table1Row>& rows);

ResultRecord run_equilibria(const RunConfig& cfg, EventLog& log);
ResultRecord run_find_orbit(const RunConfig& cfg, EventLog& log);
ResultRecord run_continue(const RunConfig& cfg, EventLog& log);
ResultRecord run_floquet(const RunConfig& cfg, EventLog& log);
ResultRecord run_surface(const RunConfig& cfg, EventLog& log);
ResultRecord run_bif_curve(const RunConfig& cfg, EventLog& log);
ResultRecord run_table1(const RunConfig& cfg, EventLog& log);
ResultRecord run_experiment(const RunConfig& cfg, EventLog& log);

// 0 when everything was produced, 2 for partial output; table1 tolerates up to 20% failed rows.
int exit_code(const ResultRecord& rec);

}  // namespace gnls
