#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "gnls/contin.hpp"

namespace gnls {

enum class Experiment { Equilibria, FindOrbit, Continue, Floquet, Surface, BifCurve, Table1 };
const char* to_string(Experiment e);
Experiment experiment_from_string(std::string_view s);  // accepts "find-orbit" and "find_orbit"

// Starting orbit of a run.
//   gamma_star  R*-symmetric single loop at energy H, continued in beta2 from 0.4 when needed
//   gamma1      R1-symmetric orbit of the family born at E+ (E- with equilibrium = -1) at energy H
//   rstar       shooting from (u1, 0, u3, 0) on Sigma1 to Sigma2
//   r1          half-period shooting from Sigma1 to Sigma1 with half period tau
//   lyapunov    small harmonic orbit at E+ or E-
struct SeedSpec {
    std::string kind = "gamma_star";
    double u1 = 1.0261;
    double u3 = -3.4592;
    double H = 0.0;
    double tau = 0.0;
    double amplitude = 1e-3;
    int equilibrium = 1;
    int ntst = 200;
    bool operator==(const SeedSpec&) const = default;
};

struct ContinuationSpec {
    FamilyKind family = FamilyKind::EnergyFamily;
    double ds_init = 0.02;
    double ds_min = 1e-7;
    double ds_max = 1.0;
    int max_steps = 5000;
    double T_max = 200.0;
    double H_min = -10.0;
    double H_max = 10.0;
    double beta2_min = -10.0;
    double beta2_max = 0.812;
    int direction = 1;
    double newton_tol = 1e-10;
    bool floquet = true;
    bool sections = true;
    bool zero_energy_events = true;
    bool operator==(const ContinuationSpec&) const = default;

    StepControl step_control() const;
};

struct BifurcationSpec {
    std::string kind = "SB";  // SB, PD, SN, T (with k), B (with k, p), BHAT (with k, p)
    int k = 1;
    int p = 0;
    double beta2_lo = 0.55;
    double beta2_hi = 0.85;
    double ds_max = 0.02;
    double H_min = -1.0;
    double H_max = 1.0;
    int follow_steps = 0;  // branch switching in table1
    bool operator==(const BifurcationSpec&) const = default;
};

struct Table1Spec {
    double beta2_start = 0.4;
    double beta2_end = 0.812;
    bool curves = true;  // continue each row's bifurcation curve for the degenerate point
    bool operator==(const Table1Spec&) const = default;
};

struct RunConfig {
    Params params;
    Experiment experiment = Experiment::Table1;
    std::string output_dir = "out";
    std::uint64_t seed_rng = 0;
    int workers = 0;  // 0: hardware concurrency
    int k_max = 13;
    SeedSpec seed;
    ContinuationSpec continuation;
    BifurcationSpec bifurcation;
    Table1Spec table1;
    bool operator==(const RunConfig&) const = default;
};

// INI-like text: [section] headers, key = value lines, '#' or ';' comments.
// Throws ParseError (with line) on syntax errors, duplicate keys and bad values, UnknownKey on
// keys outside the schema.
RunConfig parse_config_text(std::string_view text);
RunConfig parse_config(const std::string& path);  // IoError when unreadable

// Text that parses back to an identical RunConfig.
std::string format_config(const RunConfig& cfg);

// Worker count after the GNLS_MAX_WORKERS cap.
int effective_workers(const RunConfig& cfg);

}  // namespace gnls
