#include "gnls/floquet.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "gnls/integrate.hpp"

namespace gnls {

const char* to_string(OrbitClass c) {
    switch (c) {
        case OrbitClass::Elliptic: return "Elliptic";
        case OrbitClass::HyperbolicOrientable: return "HyperbolicOrientable";
        case OrbitClass::HyperbolicNonOrientable: return "HyperbolicNonOrientable";
        case OrbitClass::Parabolic: return "Parabolic";
    }
    return "?";
}

MonodromyInfo monodromy_info(const OrbitSolution& orbit) {
    auto A = [&](double s) {
        const State4 u = evaluate(orbit, s);
        return Mat4(jacobian(u, orbit.params) + orbit.eps * hessian_H(u, orbit.params));
    };
    IntegratorTol tol;
    tol.abs = 1e-13;
    tol.rel = 1e-13;
    MonodromyInfo info;
    info.M = fundamental_matrix(A, orbit.period, tol, orbit.mesh.breakpoints);
    Eigen::JacobiSVD<Mat4> svd(info.M);
    const auto& sv = svd.singularValues();
    info.ill_conditioned = sv[3] <= 0.0 || sv[0] / sv[3] > 1e12;
    return info;
}

Mat4 monodromy(const OrbitSolution& orbit) { return monodromy_info(orbit).M; }

double block_angle(const Eigen::Matrix2d& B) {
    const double a = B(0, 0), b = B(0, 1), c = B(1, 0), d = B(1, 1);
    const double s2 = -b * c - 0.25 * (a - d) * (a - d);
    // orientation chosen so that the angle grows with beta2 on the zero-energy family
    const double s = std::sqrt(std::max(s2, 0.0));
    return std::atan2(c >= 0.0 ? s : -s, 0.5 * (a + d));
}

FloquetData nontrivial_multipliers(const Mat4& M, const State4& u0, const Params& p) {
    using cd = std::complex<double>;
    FloquetData out;
    const State4 f = vector_field(u0, p);
    const State4 g = grad_H(u0, p);
    const Mat4 J = poisson_matrix(p);
    const Mat4 Omega = J.inverse();

    Eigen::Matrix<double, 4, 2> F;
    F.col(0) = f.normalized();
    F.col(1) = g.normalized();
    const double cosang = std::abs(F.col(0).dot(F.col(1)));
    const bool ok = f.norm() > 1e-8 * (1.0 + u0.norm()) && g.norm() > 1e-8 * (1.0 + u0.norm()) && cosang < 1.0 - 1e-8;
    if (ok) {
        // orthonormal complement of span{f, grad H}
        Mat4 A = Mat4::Zero();
        A.leftCols<2>() = F;
        A.col(2) = State4(1, 0, 0, 0);
        A.col(3) = State4(0, 0, 1, 0);
        Eigen::HouseholderQR<Mat4> q2(A);
        Mat4 Q = q2.householderQ();
        Eigen::Matrix<double, 4, 2> W = Q.rightCols<2>();
        if (W.col(0).dot(Omega * W.col(1)) < 0.0) W.col(1) = -W.col(1);
        out.block = W.transpose() * M * W;
        const State4 fn = f.normalized(), gn = g.normalized();
        const double mf = fn.dot(M * fn);
        const double mn = gn.dot(M * gn);
        out.multipliers[0] = mf;
        out.multipliers[1] = mn;
    } else {
        out.deflation_fallback = true;
        Eigen::EigenSolver<Mat4> es(M);
        std::array<cd, 4> ev;
        for (int i = 0; i < 4; ++i) ev[i] = es.eigenvalues()[i];
        std::sort(ev.begin(), ev.end(), [](cd x, cd y) { return std::abs(x - 1.0) < std::abs(y - 1.0); });
        out.multipliers[0] = ev[0];
        out.multipliers[1] = ev[1];
        // represent the remaining pair by a 2x2 real block with the same spectrum
        const double tr = (ev[2] + ev[3]).real();
        const double a = 0.5 * tr;
        out.block << a, -1.0, 1.0 - a * a, a;
    }
    const Eigen::Matrix2d& B = out.block;
    const double t = B.trace();
    out.trace = t;
    // a touching trace (double -1 at alpha = 1/2) overshoots 2 by rounding only
    if (std::abs(t) <= 2.0 + 1e-6) {
        const double th = block_angle(B);
        double alpha = th / (2.0 * M_PI);
        alpha -= std::floor(alpha);
        if (alpha >= 1.0) alpha = 0.0;
        out.rotation_number = alpha;
        out.nontrivial_pair = {std::polar(1.0, th), std::polar(1.0, -th)};
        const double d1 = 2.0 * std::abs(std::sin(0.5 * th));
        const double dm1 = 2.0 * std::abs(std::cos(0.5 * th));
        out.orbit_class = (d1 <= 1e-5 || dm1 <= 1e-5) ? OrbitClass::Parabolic : OrbitClass::Elliptic;
    } else {
        const double disc = std::sqrt(0.25 * t * t - 1.0);
        const double big = 0.5 * t + (t > 0 ? disc : -disc);
        out.nontrivial_pair = {big, 1.0 / big};
        const double dist = std::abs(big - (t > 0 ? 1.0 : -1.0));
        if (dist <= 1e-5) out.orbit_class = OrbitClass::Parabolic;
        else out.orbit_class = t > 0 ? OrbitClass::HyperbolicOrientable : OrbitClass::HyperbolicNonOrientable;
    }
    out.multipliers[2] = out.nontrivial_pair[0];
    out.multipliers[3] = out.nontrivial_pair[1];
    return out;
}

FloquetData floquet(const OrbitSolution& orbit) {
    const MonodromyInfo mi = monodromy_info(orbit);
    FloquetData fd = nontrivial_multipliers(mi.M, orbit.start(), orbit.params);
    fd.ill_conditioned = mi.ill_conditioned;
    return fd;
}

}  // namespace gnls
