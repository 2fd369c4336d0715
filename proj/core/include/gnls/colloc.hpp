#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "gnls/model.hpp"

namespace gnls {

struct Mesh {
    int ntst = 100;
    int ncol = 4;
    std::vector<double> breakpoints;  // ntst + 1 values, 0 ... 1

    static Mesh uniform(int ntst, int ncol);
    void validate() const;
    double width(int j) const { return breakpoints[j + 1] - breakpoints[j]; }
    int nodes() const { return ntst * ncol + 1; }
    // t of node g (mesh point or equally spaced interior node)
    double node_time(int g) const;
    // true when the second half of the mesh is the first half shifted by 1/2
    bool half_shift_compatible() const;
};

enum class Symmetry { Rstar, R1only, R2only, NonSymmetric, Unclassified };
const char* to_string(Symmetry s);

struct OrbitSolution {
    Mesh mesh;
    Eigen::Matrix<double, 4, Eigen::Dynamic> values;  // nodal values, column g
    double period = 0.0;
    double eps = 0.0;
    Params params;
    double energy = 0.0;
    Symmetry symmetry = Symmetry::Unclassified;
    int iterations = 0;          // Newton iterations of the last solve
    bool remesh_failed = false;  // set when remesh kept the original

    State4 node(int g) const { return values.col(g); }
    State4 start() const { return values.col(0); }
    double max_abs() const { return values.cwiseAbs().maxCoeff(); }
};

// Piecewise-polynomial evaluation, t in [0,1] (wrapped periodically).
State4 evaluate(const OrbitSolution& orbit, double t);
// Derivative with respect to t in [0,1]; divide by the period for physical time.
State4 evaluate_derivative(const OrbitSolution& orbit, double t);

enum class ConstraintKind { FixPeriod, FixEnergy, FixBeta2, ArclengthFree };

struct Constraint {
    ConstraintKind kind = ConstraintKind::FixEnergy;
    double target = 0.0;

    static Constraint period(double T) { return {ConstraintKind::FixPeriod, T}; }
    static Constraint energy(double H) { return {ConstraintKind::FixEnergy, H}; }
    static Constraint beta2(double b) { return {ConstraintKind::FixBeta2, b}; }
    static Constraint arclength() { return {ConstraintKind::ArclengthFree, 0.0}; }
};

enum class PhaseKind { Integral, SigmaAnchor };

struct BvpSpec {
    std::vector<Constraint> constraints;
    bool beta2_free = false;
    PhaseKind phase = PhaseKind::Integral;
    bool enforce_half_shift = false;  // keep u(t + 1/2) = -u(t) during Newton
};

// Assembled discretization u' = T (f + eps grad H) on [0,1] with periodic boundary conditions.
// Unknowns: nodal values (column-major 4 x nodes), T, eps, and beta2 when free.
class BvpProblem {
public:
    BvpProblem(const OrbitSolution& reference, BvpSpec spec);

    int n_unknowns() const { return n_unknowns_; }
    int n_equations() const { return n_equations_; }  // includes the arclength row when requested
    bool has_arclength_row() const { return arclength_; }
    const BvpSpec& spec() const { return spec_; }
    const Mesh& mesh() const { return ref_.mesh; }

    Eigen::VectorXd pack(const OrbitSolution& orbit) const;
    OrbitSolution unpack(const Eigen::VectorXd& x) const;
    Params params_of(const Eigen::VectorXd& x) const;

    // Residual without the arclength row.
    Eigen::VectorXd residual(const Eigen::VectorXd& x) const;
    Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& x) const;

    // Weights of the inner product used by arclength steps.
    const Eigen::VectorXd& weights() const { return weights_; }

    void symmetrize(Eigen::VectorXd& x) const;
    void set_reference(const OrbitSolution& ref);

    int index_T() const { return 4 * mesh().nodes(); }
    int index_eps() const { return index_T() + 1; }
    int index_beta2() const { return index_T() + 2; }

private:
    void assemble(const Eigen::VectorXd& x, Eigen::VectorXd* F, std::vector<Eigen::Triplet<double>>* trip) const;

    OrbitSolution ref_;
    BvpSpec spec_;
    bool arclength_ = false;
    int n_unknowns_ = 0;
    int n_equations_ = 0;
    Eigen::Matrix<double, 4, Eigen::Dynamic> ref_dot_;  // reference derivative at collocation points
    Eigen::VectorXd weights_;
};

struct BvpResidual {
    Eigen::VectorXd values;
    int n_collocation = 0;
    int n_periodic = 4;
    int n_phase = 1;
    int n_pins = 0;
    double norm() const { return values.size() ? values.lpNorm<Eigen::Infinity>() : 0.0; }
};

BvpResidual build_residual(const OrbitSolution& orbit, const Constraint& constraint);

struct ArclengthRow {
    Eigen::VectorXd tangent;  // already weighted
    Eigen::VectorXd point;
};

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 12;
    int max_halvings = 8;
};

struct NewtonResult {
    Eigen::VectorXd x;
    int iterations = 0;
    double norm = 0.0;
};

NewtonResult newton(const BvpProblem& problem, Eigen::VectorXd x0, const NewtonOptions& opt,
                    const ArclengthRow* row = nullptr);

OrbitSolution newton_solve(const OrbitSolution& initial, const BvpSpec& spec, const NewtonOptions& opt = {});
OrbitSolution newton_solve(const OrbitSolution& initial, const Constraint& constraint, double tol = 1e-10,
                           int max_iter = 12);

// Null vectors of the square Jacobian at x by inverse iteration (count = 1 or 2).
std::vector<Eigen::VectorXd> null_vectors(const BvpProblem& problem, const Eigen::VectorXd& x, int count,
                                          const ArclengthRow* row = nullptr);

// Local interpolation error estimate per interval.
Eigen::VectorXd local_error_estimate(const OrbitSolution& orbit);
Mesh equidistributed_mesh(const OrbitSolution& orbit, int ntst);
OrbitSolution resample(const OrbitSolution& orbit, const Mesh& mesh);
OrbitSolution remesh(const OrbitSolution& orbit, const BvpSpec& spec, const NewtonOptions& opt = {});
OrbitSolution remesh(const OrbitSolution& orbit);

// Time-reversed image under R1 or R2: u(t) -> R u(1 - t).
OrbitSolution apply_reversor(const OrbitSolution& orbit, int which);
// Phase shift by the breakpoint nearest to t0: u(t) -> u(t + t0').
OrbitSolution shift_to_breakpoint(const OrbitSolution& orbit, double t0);
// Uniform-mesh orbit built from samples of a callable over [0,1].
template <class Fn>
OrbitSolution orbit_from_function(const Mesh& mesh, Fn&& u, double period, const Params& p);

// Transfer matrices of the collocated variational equation, multiplied over one period.
Mat4 monodromy_collocation(const OrbitSolution& orbit);

// Gauss-Legendre nodes and weights on [0,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

template <class Fn>
OrbitSolution orbit_from_function(const Mesh& mesh, Fn&& u, double period, const Params& p) {
    OrbitSolution o;
    o.mesh = mesh;
    o.values.resize(4, mesh.nodes());
    for (int g = 0; g < mesh.nodes(); ++g) o.values.col(g) = u(mesh.node_time(g));
    o.period = period;
    o.params = p;
    o.energy = hamiltonian(o.start(), p);
    return o;
}

}  // namespace gnls
