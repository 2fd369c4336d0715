#include "gnls/seed.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "gnls/errors.hpp"

namespace gnls {

OrbitSolution seed_lyapunov_orbit(const State4& eq, const Params& p, double amplitude, const SeedOptions& opt) {
    if (!(amplitude > 0.0)) throw std::invalid_argument("seed amplitude must be positive");
    Eigen::EigenSolver<Mat4> es(jacobian(eq, p));
    int pick = -1;
    for (int i = 0; i < 4; ++i) {
        const auto l = es.eigenvalues()[i];
        if (l.imag() > 1e-8 && std::abs(l.real()) <= 1e-9 * (1.0 + std::abs(l))) {
            if (pick >= 0) throw NoImaginaryPair();
            pick = i;
        }
    }
    if (pick < 0) throw NoImaginaryPair();
    const double omega = es.eigenvalues()[pick].imag();
    Eigen::Vector4cd v = es.eigenvectors().col(pick);
    // rotate so that the first component is real: the seed starts on Sigma1
    const auto ph = std::polar(1.0, -std::arg(v[0]));
    v *= ph;
    v /= v.real().cwiseAbs().maxCoeff();
    const Mesh mesh = Mesh::uniform(opt.ntst, opt.ncol);
    auto u = [&](double s) {
        const std::complex<double> e = std::polar(1.0, 2.0 * M_PI * s);
        return State4(eq + amplitude * (v * e).real());
    };
    OrbitSolution guess = orbit_from_function(mesh, u, 2.0 * M_PI / omega, p);
    BvpSpec spec;
    spec.constraints = {Constraint::energy(hamiltonian(u(0.0), p))};
    NewtonOptions no;
    no.tol = opt.tol;
    OrbitSolution o = newton_solve(guess, spec, no);
    o.symmetry = Symmetry::R1only;
    return o;
}

ShootResult shoot_symmetric(const Params& p, double a, double c, double tau, double H_target, bool to_sigma2,
                            double box) {
    IntegratorTol tol;
    tol.box = box;
    // to_sigma2: u1 = u3 = 0 at tau; otherwise u2 = u4 = 0 at tau
    const int r0 = to_sigma2 ? 0 : 1, r1 = to_sigma2 ? 2 : 3;
    double last = 1e300;
    for (int it = 0; it < 40; ++it) {
        const State4 u0(a, 0.0, c, 0.0);
        const FlowJet jet = flow_variational(u0, tau, p, tol);
        const State4 f = vector_field(jet.u, p);
        const State4 g = grad_H(u0, p);
        Eigen::Vector3d F(jet.u[r0], jet.u[r1], hamiltonian(u0, p) - H_target);
        const double n = F.cwiseAbs().maxCoeff();
        if (n < 1e-13 || (n < 1e-10 && n >= 0.5 * last)) return {a, c, tau};
        last = n;
        Eigen::Matrix3d J;
        J << jet.phi(r0, 0), jet.phi(r0, 2), f[r0],
             jet.phi(r1, 0), jet.phi(r1, 2), f[r1],
             g[0], g[2], 0.0;
        const Eigen::Vector3d d = J.fullPivLu().solve(-F);
        double lam = 1.0;
        const double big = std::max({std::abs(d[0]), std::abs(d[1]), std::abs(d[2]) / std::max(tau, 1e-3)});
        if (big > 0.5) lam = 0.5 / big;
        a += lam * d[0];
        c += lam * d[1];
        tau += lam * d[2];
        if (!(tau > 0.0)) throw NoConvergence(it, n);
    }
    throw NoConvergence(40, last);
}

namespace {

OrbitSolution assemble_symmetric(const Params& p, const ShootResult& s, bool rstar, const SeedOptions& opt) {
    const double T = rstar ? 4.0 * s.tau : 2.0 * s.tau;
    const Mesh mesh = Mesh::uniform(opt.ntst, opt.ncol);
    // needed times on the integrated segment [0, tau]
    std::vector<double> need;
    auto fold = [&](double t) {
        // map physical time to (segment time, transform code)
        if (rstar) {
            const double h = 2.0 * s.tau;
            int sign = 1;
            if (t >= h) t -= h, sign = -1;
            if (t <= s.tau) return std::pair<double, int>(t, sign);
            return std::pair<double, int>(h - t, 2 * sign);
        }
        if (t <= s.tau) return std::pair<double, int>(t, 1);
        return std::pair<double, int>(T - t, 3);
    };
    for (int g = 0; g < mesh.nodes(); ++g) need.push_back(fold(mesh.node_time(g) * T).first);
    std::sort(need.begin(), need.end());
    need.erase(std::unique(need.begin(), need.end(), [](double x, double y) { return std::abs(x - y) < 1e-15; }),
               need.end());
    IntegratorTol tol;
    tol.box = opt.box;
    const State4 u0(s.u1, 0.0, s.u3, 0.0);
    const std::vector<State4> seg = flow_at(u0, need, p, tol);
    auto lookup = [&](double t) {
        auto it = std::lower_bound(need.begin(), need.end(), t - 1e-15);
        return seg[std::min<std::size_t>(it - need.begin(), seg.size() - 1)];
    };
    auto u = [&](double sfrac) {
        const auto [t, code] = fold(sfrac * T);
        const State4 q = lookup(t);
        switch (code) {
            case 1: return q;
            case -1: return State4(-q);
            case 2: return apply_R2(q);
            case -2: return State4(-apply_R2(q));
            default: return apply_R1(q);
        }
    };
    OrbitSolution guess = orbit_from_function(mesh, u, T, p);
    guess.values.col(mesh.nodes() - 1) = guess.values.col(0);
    BvpSpec spec;
    spec.constraints = {Constraint::energy(hamiltonian(u0, p))};
    spec.enforce_half_shift = rstar && mesh.half_shift_compatible();
    NewtonOptions no;
    no.tol = opt.tol;
    OrbitSolution o = newton_solve(guess, spec, no);
    o.symmetry = rstar ? Symmetry::Rstar : Symmetry::R1only;
    return o;
}

}  // namespace

OrbitSolution seed_rstar_orbit(const Params& p, double u1, double u3, double H_target, const SeedOptions& opt) {
    IntegratorTol tol;
    tol.box = opt.box;
    Crossing cr;
    const State4 u0(u1, 0.0, u3, 0.0);
    if (!first_crossing(u0, 1e-6, 200.0, [](const State4& u) { return u[0]; }, p, cr, tol))
        throw NoConvergence(0, std::abs(u1));
    const ShootResult s = shoot_symmetric(p, u1, u3, cr.t, H_target, true, opt.box);
    return assemble_symmetric(p, s, true, opt);
}

OrbitSolution seed_r1_orbit(const Params& p, double u1, double u3, double H_target, double tau_guess,
                            const SeedOptions& opt) {
    const ShootResult s = shoot_symmetric(p, u1, u3, tau_guess, H_target, false, opt.box);
    return assemble_symmetric(p, s, false, opt);
}

}  // namespace gnls
