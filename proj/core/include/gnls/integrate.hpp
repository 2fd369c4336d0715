#pragma once

#include <functional>
#include <vector>

#include "gnls/model.hpp"

namespace gnls {

struct IntegratorTol {
    double abs = 1e-12;
    double rel = 1e-12;
    double box = 50.0;  // phase-space bound, infinity norm
};

// Adaptive Runge-Kutta-Fehlberg 7(8) flow of the vector field.
State4 flow(const State4& u0, double t, const Params& p, const IntegratorTol& tol = {});

// States at the requested (sorted, nonnegative) times.
std::vector<State4> flow_at(const State4& u0, const std::vector<double>& times, const Params& p,
                            const IntegratorTol& tol = {});

struct FlowJet {
    State4 u;
    Mat4 phi;
};

// Flow together with its fundamental matrix.
FlowJet flow_variational(const State4& u0, double t, const Params& p, const IntegratorTol& tol = {});

// Fundamental matrix of v' = scale * A(s) v over s in [0, 1].
Mat4 fundamental_matrix(const std::function<Mat4(double)>& A, double scale, const IntegratorTol& tol = {},
                        const std::vector<double>& breaks = {});

// Integrate until g(u) changes sign from the given side, starting after t_min.
// Returns the crossing time located by bisection on dense output.
struct Crossing {
    double t;
    State4 u;
};
bool first_crossing(const State4& u0, double t_min, double t_max, const std::function<double(const State4&)>& g,
                    const Params& p, Crossing& out, const IntegratorTol& tol = {});

}  // namespace gnls
