#include "gnls/colloc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/SparseLU>

#include "gnls/errors.hpp"

namespace gnls {

namespace {

// Lagrange basis on equally spaced nodes l/ncol, l = 0..ncol.
struct Basis {
    int ncol = 0;
    std::vector<double> z, w;                 // Gauss nodes/weights on [0,1]
    std::vector<std::vector<double>> L, D;    // L[i][l], D[i][l] at Gauss node i

    explicit Basis(int m) : ncol(m) {
        gauss_legendre(m, z, w);
        L.assign(m, std::vector<double>(m + 1));
        D.assign(m, std::vector<double>(m + 1));
        for (int i = 0; i < m; ++i) values(z[i], L[i].data(), D[i].data());
    }

    void values(double s, double* l, double* d) const {
        const int m = ncol;
        for (int a = 0; a <= m; ++a) {
            const double ta = double(a) / m;
            double prod = 1.0, der = 0.0;
            for (int b = 0; b <= m; ++b) {
                if (b == a) continue;
                const double tb = double(b) / m;
                double term = 1.0 / (ta - tb);
                for (int q = 0; q <= m; ++q) {
                    if (q == a || q == b) continue;
                    term *= (s - double(q) / m) / (ta - double(q) / m);
                }
                der += term;
                prod *= (s - tb) / (ta - tb);
            }
            l[a] = prod;
            if (d) d[a] = der;
        }
    }
};

const Basis& basis(int ncol) {
    static std::mutex mtx;
    static std::map<int, Basis> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(ncol);
    if (it == cache.end()) it = cache.emplace(ncol, Basis(ncol)).first;
    return it->second;
}

int locate(const Mesh& m, double& t) {
    if (t < 0.0 || t > 1.0) t -= std::floor(t);
    auto it = std::upper_bound(m.breakpoints.begin(), m.breakpoints.end(), t);
    int j = int(it - m.breakpoints.begin()) - 1;
    return std::clamp(j, 0, m.ntst - 1);
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        nodes[n - 1 - i] = 0.5 * (x + 1.0);
        weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
}

Mesh Mesh::uniform(int ntst, int ncol) {
    Mesh m;
    m.ntst = ntst;
    m.ncol = ncol;
    m.breakpoints.resize(ntst + 1);
    for (int j = 0; j <= ntst; ++j) m.breakpoints[j] = double(j) / ntst;
    return m;
}

void Mesh::validate() const {
    if (ntst < 1) throw std::invalid_argument("ntst must be positive");
    if (ncol < 2 || ncol > 7) throw std::invalid_argument("ncol must lie in 2..7");
    if (int(breakpoints.size()) != ntst + 1) throw std::invalid_argument("breakpoint count mismatch");
    if (breakpoints.front() != 0.0 || breakpoints.back() != 1.0)
        throw std::invalid_argument("breakpoints must span [0,1]");
    for (int j = 0; j < ntst; ++j)
        if (!(breakpoints[j + 1] > breakpoints[j])) throw std::invalid_argument("breakpoints not increasing");
}

double Mesh::node_time(int g) const {
    if (g >= nodes() - 1) return 1.0;
    const int j = g / ncol, l = g % ncol;
    return breakpoints[j] + width(j) * double(l) / ncol;
}

bool Mesh::half_shift_compatible() const {
    if (ntst % 2) return false;
    const int h = ntst / 2;
    for (int j = 0; j <= h; ++j)
        if (std::abs(breakpoints[j + h] - breakpoints[j] - 0.5) > 1e-12) return false;
    return true;
}

const char* to_string(Symmetry s) {
    switch (s) {
        case Symmetry::Rstar: return "Rstar";
        case Symmetry::R1only: return "R1only";
        case Symmetry::R2only: return "R2only";
        case Symmetry::NonSymmetric: return "NonSymmetric";
        case Symmetry::Unclassified: return "Unclassified";
    }
    return "?";
}

State4 evaluate(const OrbitSolution& orbit, double t) {
    const Mesh& m = orbit.mesh;
    const int j = locate(m, t);
    const double s = (t - m.breakpoints[j]) / m.width(j);
    double l[8];
    basis(m.ncol).values(s, l, nullptr);
    State4 u = State4::Zero();
    for (int a = 0; a <= m.ncol; ++a) u += l[a] * orbit.values.col(j * m.ncol + a);
    return u;
}

State4 evaluate_derivative(const OrbitSolution& orbit, double t) {
    const Mesh& m = orbit.mesh;
    const int j = locate(m, t);
    const double h = m.width(j);
    const double s = (t - m.breakpoints[j]) / h;
    double l[8], d[8];
    basis(m.ncol).values(s, l, d);
    State4 u = State4::Zero();
    for (int a = 0; a <= m.ncol; ++a) u += d[a] / h * orbit.values.col(j * m.ncol + a);
    return u;
}

// ---------------------------------------------------------------------------

BvpProblem::BvpProblem(const OrbitSolution& reference, BvpSpec spec) : ref_(reference), spec_(std::move(spec)) {
    ref_.mesh.validate();
    int pins = 0;
    for (const Constraint& c : spec_.constraints) {
        if (c.kind == ConstraintKind::ArclengthFree) {
            if (arclength_) throw InconsistentConstraint("arclength row requested twice");
            arclength_ = true;
        } else {
            if (c.kind == ConstraintKind::FixBeta2 && !spec_.beta2_free)
                throw InconsistentConstraint("beta2 pinned but not an unknown");
            ++pins;
        }
    }
    const Mesh& m = ref_.mesh;
    n_unknowns_ = 4 * m.nodes() + 2 + (spec_.beta2_free ? 1 : 0);
    n_equations_ = 4 * m.ntst * m.ncol + 4 + 1 + pins + (arclength_ ? 1 : 0);
    if (n_unknowns_ != n_equations_)
        throw InconsistentConstraint("constraints leave " + std::to_string(n_unknowns_ - n_equations_) +
                                     " unknowns undetermined");
    if (spec_.enforce_half_shift && !m.half_shift_compatible())
        throw InconsistentConstraint("mesh does not support half-shift symmetry");
    set_reference(ref_);
    weights_ = Eigen::VectorXd::Ones(n_unknowns_);
    weights_.head(4 * m.nodes()).setConstant(1.0 / m.nodes());
}

void BvpProblem::set_reference(const OrbitSolution& ref) {
    const Mesh& m = ref_.mesh;
    if (ref.mesh.breakpoints != m.breakpoints || ref.mesh.ncol != m.ncol)
        throw InconsistentConstraint("reference orbit on a different mesh");
    ref_.values = ref.values;
    ref_.period = ref.period;
    const Basis& B = basis(m.ncol);
    ref_dot_.resize(4, m.ntst * m.ncol);
    for (int j = 0; j < m.ntst; ++j) {
        const double h = m.width(j);
        for (int i = 0; i < m.ncol; ++i) {
            State4 d = State4::Zero();
            for (int a = 0; a <= m.ncol; ++a) d += B.D[i][a] / h * ref_.values.col(j * m.ncol + a);
            ref_dot_.col(j * m.ncol + i) = d;
        }
    }
}

Eigen::VectorXd BvpProblem::pack(const OrbitSolution& o) const {
    Eigen::VectorXd x(n_unknowns_);
    const int n = 4 * mesh().nodes();
    if (o.values.cols() != mesh().nodes()) throw InconsistentConstraint("orbit mesh mismatch");
    x.head(n) = Eigen::Map<const Eigen::VectorXd>(o.values.data(), n);
    x[index_T()] = o.period;
    x[index_eps()] = o.eps;
    if (spec_.beta2_free) x[index_beta2()] = o.params.beta2;
    return x;
}

Params BvpProblem::params_of(const Eigen::VectorXd& x) const {
    Params p = ref_.params;
    if (spec_.beta2_free) p.beta2 = x[index_beta2()];
    return p;
}

OrbitSolution BvpProblem::unpack(const Eigen::VectorXd& x) const {
    OrbitSolution o;
    o.mesh = mesh();
    const int nn = mesh().nodes();
    o.values = Eigen::Map<const Eigen::Matrix<double, 4, Eigen::Dynamic>>(x.data(), 4, nn);
    o.period = x[index_T()];
    o.eps = x[index_eps()];
    o.params = params_of(x);
    o.energy = hamiltonian(o.start(), o.params);
    o.symmetry = ref_.symmetry;
    return o;
}

void BvpProblem::symmetrize(Eigen::VectorXd& x) const {
    if (!spec_.enforce_half_shift) return;
    const int nn = mesh().nodes();
    const int half = (nn - 1) / 2;
    Eigen::Map<Eigen::Matrix<double, 4, Eigen::Dynamic>> U(x.data(), 4, nn);
    for (int g = 0; g < half; ++g) {
        const State4 a = 0.5 * (U.col(g) - U.col(g + half));
        U.col(g) = a;
        U.col(g + half) = -a;
    }
    U.col(nn - 1) = U.col(0);
}

void BvpProblem::assemble(const Eigen::VectorXd& x, Eigen::VectorXd* F,
                          std::vector<Eigen::Triplet<double>>* trip) const {
    const Mesh& m = mesh();
    const Basis& B = basis(m.ncol);
    const int nn = m.nodes();
    const double T = x[index_T()];
    const double eps = x[index_eps()];
    const Params p = params_of(x);
    Eigen::Map<const Eigen::Matrix<double, 4, Eigen::Dynamic>> U(x.data(), 4, nn);
    const int iT = index_T(), iE = index_eps(), iB = index_beta2();

    if (F) F->setZero(n_equations_ - (arclength_ ? 1 : 0));
    int row = 0;
    for (int j = 0; j < m.ntst; ++j) {
        const double h = m.width(j);
        for (int i = 0; i < m.ncol; ++i, row += 4) {
            State4 u = State4::Zero(), du = State4::Zero();
            for (int a = 0; a <= m.ncol; ++a) {
                u += B.L[i][a] * U.col(j * m.ncol + a);
                du += B.D[i][a] / h * U.col(j * m.ncol + a);
            }
            const State4 g = grad_H(u, p);
            const State4 rhs = vector_field(u, p) + eps * g;
            if (F) F->segment<4>(row) = du - T * rhs;
            if (trip) {
                const Mat4 A = gnls::jacobian(u, p) + eps * hessian_H(u, p);
                for (int a = 0; a <= m.ncol; ++a) {
                    const int col = 4 * (j * m.ncol + a);
                    for (int r = 0; r < 4; ++r)
                        for (int c = 0; c < 4; ++c) {
                            double v = -T * B.L[i][a] * A(r, c);
                            if (r == c) v += B.D[i][a] / h;
                            if (v != 0.0) trip->emplace_back(row + r, col + c, v);
                        }
                }
                for (int r = 0; r < 4; ++r) {
                    trip->emplace_back(row + r, iT, -rhs[r]);
                    trip->emplace_back(row + r, iE, -T * g[r]);
                }
                if (spec_.beta2_free) {
                    const State4 db = dfield_dbeta2(u, p) + eps * dgradH_dbeta2(u, p);
                    for (int r = 0; r < 4; ++r)
                        if (db[r] != 0.0) trip->emplace_back(row + r, iB, -T * db[r]);
                }
            }
        }
    }
    // periodicity
    if (F) F->segment<4>(row) = U.col(nn - 1) - U.col(0);
    if (trip)
        for (int r = 0; r < 4; ++r) {
            trip->emplace_back(row + r, 4 * (nn - 1) + r, 1.0);
            trip->emplace_back(row + r, r, -1.0);
        }
    row += 4;
    // phase
    if (spec_.phase == PhaseKind::Integral) {
        double acc = 0.0;
        for (int j = 0; j < m.ntst; ++j) {
            const double h = m.width(j);
            for (int i = 0; i < m.ncol; ++i) {
                const State4 rd = ref_dot_.col(j * m.ncol + i);
                State4 du = State4::Zero();
                for (int a = 0; a <= m.ncol; ++a)
                    du += B.L[i][a] * (U.col(j * m.ncol + a) - ref_.values.col(j * m.ncol + a));
                acc += h * B.w[i] * du.dot(rd);
                if (trip)
                    for (int a = 0; a <= m.ncol; ++a)
                        for (int c = 0; c < 4; ++c)
                            trip->emplace_back(row, 4 * (j * m.ncol + a) + c, h * B.w[i] * B.L[i][a] * rd[c]);
            }
        }
        if (F) (*F)[row] = acc;
    } else {
        if (F) (*F)[row] = U(1, 0);
        if (trip) trip->emplace_back(row, 1, 1.0);
    }
    ++row;
    // pins
    for (const Constraint& c : spec_.constraints) {
        switch (c.kind) {
            case ConstraintKind::FixPeriod:
                if (F) (*F)[row] = T - c.target;
                if (trip) trip->emplace_back(row, iT, 1.0);
                ++row;
                break;
            case ConstraintKind::FixEnergy: {
                const State4 u0 = U.col(0);
                if (F) (*F)[row] = hamiltonian(u0, p) - c.target;
                if (trip) {
                    const State4 g = grad_H(u0, p);
                    for (int r = 0; r < 4; ++r) trip->emplace_back(row, r, g[r]);
                    if (spec_.beta2_free) trip->emplace_back(row, iB, dH_dbeta2(u0, p));
                }
                ++row;
                break;
            }
            case ConstraintKind::FixBeta2:
                if (F) (*F)[row] = x[iB] - c.target;
                if (trip) trip->emplace_back(row, iB, 1.0);
                ++row;
                break;
            case ConstraintKind::ArclengthFree:
                break;
        }
    }
}

Eigen::VectorXd BvpProblem::residual(const Eigen::VectorXd& x) const {
    Eigen::VectorXd F;
    assemble(x, &F, nullptr);
    return F;
}

Eigen::SparseMatrix<double> BvpProblem::jacobian(const Eigen::VectorXd& x) const {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(std::size_t(mesh().ntst) * mesh().ncol * (16 * (mesh().ncol + 1) + 12) + 8 * mesh().nodes());
    assemble(x, nullptr, &trip);
    Eigen::SparseMatrix<double> J(n_equations_ - (arclength_ ? 1 : 0), n_unknowns_);
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
}

BvpResidual build_residual(const OrbitSolution& orbit, const Constraint& constraint) {
    BvpSpec spec;
    spec.constraints = {constraint};
    spec.beta2_free = constraint.kind == ConstraintKind::FixBeta2;
    BvpProblem prob(orbit, spec);
    BvpResidual r;
    r.values = prob.residual(prob.pack(orbit));
    r.n_collocation = 4 * orbit.mesh.ntst * orbit.mesh.ncol;
    r.n_pins = constraint.kind == ConstraintKind::ArclengthFree ? 0 : 1;
    return r;
}

// ---------------------------------------------------------------------------

namespace {

Eigen::SparseMatrix<double> square_matrix(const BvpProblem& prob, const Eigen::VectorXd& x, const ArclengthRow* row) {
    Eigen::SparseMatrix<double> J = prob.jacobian(x);
    if (!prob.has_arclength_row()) return J;
    if (!row) throw InconsistentConstraint("arclength row missing");
    Eigen::SparseMatrix<double> K(J.rows() + 1, J.cols());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(J.nonZeros() + J.cols());
    for (int k = 0; k < J.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(J, k); it; ++it)
            trip.emplace_back(it.row(), it.col(), it.value());
    for (int c = 0; c < J.cols(); ++c)
        if (row->tangent[c] != 0.0) trip.emplace_back(J.rows(), c, row->tangent[c]);
    K.setFromTriplets(trip.begin(), trip.end());
    return K;
}

Eigen::VectorXd full_residual(const BvpProblem& prob, const Eigen::VectorXd& x, const ArclengthRow* row) {
    Eigen::VectorXd F = prob.residual(x);
    if (!prob.has_arclength_row()) return F;
    Eigen::VectorXd G(F.size() + 1);
    G.head(F.size()) = F;
    G[F.size()] = row->tangent.dot(x - row->point);
    return G;
}

}  // namespace

NewtonResult newton(const BvpProblem& prob, Eigen::VectorXd x, const NewtonOptions& opt, const ArclengthRow* row) {
    if (prob.has_arclength_row() && !row) throw InconsistentConstraint("arclength row missing");
    prob.symmetrize(x);
    Eigen::VectorXd F = full_residual(prob, x, row);
    double norm = F.lpNorm<Eigen::Infinity>();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    bool analyzed = false;
    for (int it = 0; it <= opt.max_iter; ++it) {
        if (!std::isfinite(norm)) break;
        if (norm <= opt.tol) return {x, it, norm};
        if (it == opt.max_iter) break;
        Eigen::SparseMatrix<double> J = square_matrix(prob, x, row);
        J.makeCompressed();
        if (!analyzed) {
            lu.analyzePattern(J);
            analyzed = true;
        }
        lu.factorize(J);
        if (lu.info() != Eigen::Success) throw SingularJacobian();
        Eigen::VectorXd dx = lu.solve(-F);
        if (lu.info() != Eigen::Success || !dx.allFinite()) throw SingularJacobian();
        double lambda = 1.0;
        Eigen::VectorXd best_x = x, best_F = F;
        double best = std::numeric_limits<double>::infinity();
        for (int h = 0; h <= opt.max_halvings; ++h, lambda *= 0.5) {
            Eigen::VectorXd xt = x + lambda * dx;
            prob.symmetrize(xt);
            Eigen::VectorXd Ft = full_residual(prob, xt, row);
            const double nt = Ft.lpNorm<Eigen::Infinity>();
            if (std::isfinite(nt) && nt < best) {
                best = nt;
                best_x = xt;
                best_F = Ft;
            }
            if (std::isfinite(nt) && nt < norm) break;
        }
        const double step = lambda * dx.lpNorm<Eigen::Infinity>();
        x = best_x;
        F = best_F;
        norm = best;
        // stagnation at rounding level
        if (step <= 1e-13 * (1.0 + x.lpNorm<Eigen::Infinity>()) && norm <= 1e3 * opt.tol) return {x, it + 1, norm};
    }
    throw NoConvergence(opt.max_iter, norm);
}

OrbitSolution newton_solve(const OrbitSolution& initial, const BvpSpec& spec, const NewtonOptions& opt) {
    BvpProblem prob(initial, spec);
    NewtonResult r = newton(prob, prob.pack(initial), opt);
    OrbitSolution o = prob.unpack(r.x);
    o.iterations = r.iterations;
    return o;
}

OrbitSolution newton_solve(const OrbitSolution& initial, const Constraint& constraint, double tol, int max_iter) {
    BvpSpec spec;
    spec.constraints = {constraint};
    NewtonOptions opt;
    opt.tol = tol;
    opt.max_iter = max_iter;
    return newton_solve(initial, spec, opt);
}

std::vector<Eigen::VectorXd> null_vectors(const BvpProblem& prob, const Eigen::VectorXd& x, int count,
                                          const ArclengthRow* row) {
    Eigen::SparseMatrix<double> J = square_matrix(prob, x, row);
    J.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(J);
    lu.factorize(J);
    if (lu.info() != Eigen::Success) {
        double scale = 0.0;
        for (int k = 0; k < J.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(J, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
        Eigen::SparseMatrix<double> I(J.rows(), J.cols());
        I.setIdentity();
        J += 1e-12 * scale * I;
        lu.factorize(J);
        if (lu.info() != Eigen::Success) throw SingularJacobian();
    }
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> nd;
    std::vector<Eigen::VectorXd> V(count);
    for (auto& v : V) {
        v.resize(J.cols());
        for (int i = 0; i < v.size(); ++i) v[i] = nd(rng);
    }
    for (int sweep = 0; sweep < 4; ++sweep) {
        for (int k = 0; k < count; ++k) {
            V[k] = lu.solve(V[k]);
            for (int q = 0; q < k; ++q) V[k] -= V[q].dot(V[k]) * V[q];
            V[k].normalize();
        }
    }
    return V;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd local_error_estimate(const OrbitSolution& orbit) {
    const Mesh& m = orbit.mesh;
    const int n = m.ntst, k = m.ncol;
    // ncol-th derivative per interval from the ncol-th forward difference of the nodes
    std::vector<State4> D(n);
    double fact = std::pow(double(k), k);
    for (int j = 0; j < n; ++j) {
        State4 d = State4::Zero();
        for (int a = 0; a <= k; ++a) {
            double binom = 1.0;
            for (int q = 0; q < a; ++q) binom = binom * (k - q) / (q + 1);
            const double sgn = ((k - a) % 2) ? -1.0 : 1.0;
            d += sgn * binom * orbit.values.col(j * k + a);
        }
        D[j] = d * fact / std::pow(m.width(j), k);
    }
    Eigen::VectorXd e(n);
    for (int j = 0; j < n; ++j) {
        const int jp = (j + 1) % n, jm = (j + n - 1) % n;
        const double right = (D[jp] - D[j]).cwiseAbs().maxCoeff() / (0.5 * (m.width(j) + m.width(jp)));
        const double left = (D[j] - D[jm]).cwiseAbs().maxCoeff() / (0.5 * (m.width(j) + m.width(jm)));
        e[j] = std::pow(m.width(j), k + 1) * 0.5 * (left + right);
    }
    return e;
}

Mesh equidistributed_mesh(const OrbitSolution& orbit, int ntst) {
    const Mesh& m = orbit.mesh;
    const Eigen::VectorXd e = local_error_estimate(orbit);
    const int k = m.ncol;
    std::vector<double> rho(m.ntst);
    double mean = 0.0;
    for (int j = 0; j < m.ntst; ++j) {
        // error density, e_j = (h rho)^(k+1)
        rho[j] = std::pow(std::max(e[j], 0.0), 1.0 / (k + 1)) / m.width(j);
        mean += rho[j] * m.width(j);
    }
    const bool half = m.half_shift_compatible() && ntst % 2 == 0;
    if (half) {
        const int h = m.ntst / 2;
        for (int j = 0; j < h; ++j) rho[j] = rho[j + h] = 0.5 * (rho[j] + rho[j + h]);
    }
    for (double& r : rho) r += 0.05 * mean + 1e-300;
    std::vector<double> cum(m.ntst + 1, 0.0);
    for (int j = 0; j < m.ntst; ++j) cum[j + 1] = cum[j] + rho[j] * m.width(j);

    auto invert = [&](double target) {
        auto it = std::lower_bound(cum.begin(), cum.end(), target);
        int j = std::clamp(int(it - cum.begin()) - 1, 0, m.ntst - 1);
        const double frac = (target - cum[j]) / (cum[j + 1] - cum[j]);
        return m.breakpoints[j] + frac * m.width(j);
    };
    Mesh out;
    out.ntst = ntst;
    out.ncol = k;
    out.breakpoints.resize(ntst + 1);
    out.breakpoints[0] = 0.0;
    out.breakpoints[ntst] = 1.0;
    if (half) {
        const int h = ntst / 2;
        const double total = cum[m.ntst / 2];
        for (int q = 1; q < h; ++q) out.breakpoints[q] = invert(total * q / h);
        out.breakpoints[h] = 0.5;
        for (int q = 1; q < h; ++q) out.breakpoints[q + h] = out.breakpoints[q] + 0.5;
    } else {
        for (int q = 1; q < ntst; ++q) out.breakpoints[q] = invert(cum.back() * q / ntst);
    }
    return out;
}

OrbitSolution resample(const OrbitSolution& orbit, const Mesh& mesh) {
    OrbitSolution o = orbit;
    o.mesh = mesh;
    o.values.resize(4, mesh.nodes());
    for (int g = 0; g < mesh.nodes(); ++g) o.values.col(g) = evaluate(orbit, mesh.node_time(g));
    o.values.col(mesh.nodes() - 1) = o.values.col(0);
    return o;
}

OrbitSolution remesh(const OrbitSolution& orbit, const BvpSpec& spec, const NewtonOptions& opt) {
    const Mesh m = equidistributed_mesh(orbit, orbit.mesh.ntst);
    OrbitSolution guess = resample(orbit, m);
    try {
        BvpSpec s = spec;
        if (s.enforce_half_shift && !m.half_shift_compatible()) s.enforce_half_shift = false;
        OrbitSolution out = newton_solve(guess, s, opt);
        out.symmetry = orbit.symmetry;
        return out;
    } catch (const Error&) {
        OrbitSolution o = orbit;
        o.remesh_failed = true;
        return o;
    }
}

OrbitSolution remesh(const OrbitSolution& orbit) {
    BvpSpec spec;
    spec.constraints = {Constraint::energy(orbit.energy)};
    return remesh(orbit, spec);
}

OrbitSolution apply_reversor(const OrbitSolution& orbit, int which) {
    OrbitSolution o = orbit;
    const Mesh& m = orbit.mesh;
    for (int j = 0; j <= m.ntst; ++j) o.mesh.breakpoints[j] = 1.0 - m.breakpoints[m.ntst - j];
    o.mesh.breakpoints.front() = 0.0;
    o.mesh.breakpoints.back() = 1.0;
    const int nn = m.nodes();
    for (int g = 0; g < nn; ++g) {
        const State4 u = orbit.values.col(nn - 1 - g);
        o.values.col(g) = which == 1 ? apply_R1(u) : apply_R2(u);
    }
    if (orbit.symmetry == Symmetry::R1only && which == 2) o.symmetry = Symmetry::R1only;
    if (orbit.symmetry == Symmetry::R2only && which == 1) o.symmetry = Symmetry::R2only;
    o.energy = hamiltonian(o.start(), o.params);
    return o;
}

OrbitSolution shift_to_breakpoint(const OrbitSolution& orbit, double t0) {
    const Mesh& m = orbit.mesh;
    t0 -= std::floor(t0);
    int best = 0;
    for (int j = 0; j <= m.ntst; ++j)
        if (std::abs(m.breakpoints[j] - t0) < std::abs(m.breakpoints[best] - t0)) best = j;
    if (best == m.ntst) best = 0;
    OrbitSolution o = orbit;
    const double s0 = m.breakpoints[best];
    for (int q = 0; q < m.ntst; ++q) {
        const int j = (best + q) % m.ntst;
        double b = m.breakpoints[j] - s0;
        if (b < 0.0) b += 1.0;
        o.mesh.breakpoints[q] = b;
        for (int a = 0; a < m.ncol; ++a) o.values.col(q * m.ncol + a) = orbit.values.col(j * m.ncol + a);
    }
    o.mesh.breakpoints[0] = 0.0;
    o.mesh.breakpoints[m.ntst] = 1.0;
    o.values.col(m.nodes() - 1) = o.values.col(0);
    o.energy = hamiltonian(o.start(), o.params);
    return o;
}

Mat4 monodromy_collocation(const OrbitSolution& orbit) {
    const Mesh& m = orbit.mesh;
    const Basis& B = basis(m.ncol);
    const int k = m.ncol;
    const double T = orbit.period;
    Mat4 M = Mat4::Identity();
    Eigen::MatrixXd K(4 * k, 4 * k), R(4 * k, 4);
    for (int j = 0; j < m.ntst; ++j) {
        const double h = m.width(j);
        K.setZero();
        R.setZero();
        for (int i = 0; i < k; ++i) {
            State4 u = State4::Zero();
            for (int a = 0; a <= k; ++a) u += B.L[i][a] * orbit.values.col(j * k + a);
            const Mat4 A = T * (jacobian(u, orbit.params) + orbit.eps * hessian_H(u, orbit.params));
            for (int a = 0; a <= k; ++a) {
                Mat4 blk = B.D[i][a] / h * Mat4::Identity() - B.L[i][a] * A;
                if (a == 0) R.block<4, 4>(4 * i, 0) = -blk;
                else K.block<4, 4>(4 * i, 4 * (a - 1)) = blk;
            }
        }
        const Eigen::MatrixXd V = K.partialPivLu().solve(R);
        M = V.bottomRows<4>() * M;
    }
    return M;
}

}  // namespace gnls
