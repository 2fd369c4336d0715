#include "gnls/model.hpp"

#include <cmath>
#include <stdexcept>

namespace gnls {

void Params::validate() const {
    if (!std::isfinite(beta2) || !std::isfinite(beta4) || !std::isfinite(gamma) || !std::isfinite(mu))
        throw std::invalid_argument("parameters must be finite");
    if (beta4 == 0.0) throw std::invalid_argument("beta4 must be nonzero");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
}

State4 vector_field(const State4& u, const Params& p) {
    const double u1 = u[0];
    return {u[1], u[2], u[3], (24.0 / p.beta4) * (0.5 * p.beta2 * u[2] + p.mu * u1 - p.gamma * u1 * u1 * u1)};
}

double hamiltonian(const State4& u, const Params& p) {
    const double u1sq = u[0] * u[0];
    return u[1] * u[3] - 0.5 * u[2] * u[2] -
           (6.0 * p.beta2 * u[1] * u[1] - 6.0 * p.gamma * u1sq * u1sq + 12.0 * p.mu * u1sq) / p.beta4;
}

State4 grad_H(const State4& u, const Params& p) {
    const double u1 = u[0];
    return {-(-24.0 * p.gamma * u1 * u1 * u1 + 24.0 * p.mu * u1) / p.beta4,
            u[3] - 12.0 * p.beta2 * u[1] / p.beta4,
            -u[2],
            u[1]};
}

Mat4 jacobian(const State4& u, const Params& p) {
    Mat4 J = Mat4::Zero();
    J(0, 1) = 1.0;
    J(1, 2) = 1.0;
    J(2, 3) = 1.0;
    const double c = 24.0 / p.beta4;
    J(3, 0) = c * (p.mu - 3.0 * p.gamma * u[0] * u[0]);
    J(3, 2) = c * 0.5 * p.beta2;
    return J;
}

Mat4 hessian_H(const State4& u, const Params& p) {
    Mat4 Hs = Mat4::Zero();
    Hs(0, 0) = -(-72.0 * p.gamma * u[0] * u[0] + 24.0 * p.mu) / p.beta4;
    Hs(1, 1) = -12.0 * p.beta2 / p.beta4;
    Hs(1, 3) = 1.0;
    Hs(3, 1) = 1.0;
    Hs(2, 2) = -1.0;
    return Hs;
}

State4 dfield_dbeta2(const State4& u, const Params& p) {
    return {0.0, 0.0, 0.0, 12.0 * u[2] / p.beta4};
}

State4 dgradH_dbeta2(const State4& u, const Params& p) {
    return {0.0, -12.0 * u[1] / p.beta4, 0.0, 0.0};
}

double dH_dbeta2(const State4& u, const Params& p) { return -6.0 * u[1] * u[1] / p.beta4; }

Mat4 poisson_matrix(const Params& p) {
    const double c = 12.0 * p.beta2 / p.beta4;
    Mat4 J;
    J << 0, 0, 0, 1,
         0, 0, -1, 0,
         0, 1, 0, c,
         -1, 0, -c, 0;
    return J;
}

State4 apply_R1(const State4& u) { return {u[0], -u[1], u[2], -u[3]}; }
State4 apply_R2(const State4& u) { return {-u[0], u[1], -u[2], u[3]}; }

std::vector<State4> equilibria(const Params& p) {
    std::vector<State4> eq{State4::Zero()};
    const double r = p.mu / p.gamma;
    if (r > 0.0) {
        const double a = std::sqrt(r);
        eq.push_back({a, 0.0, 0.0, 0.0});
        eq.push_back({-a, 0.0, 0.0, 0.0});
    }
    return eq;
}

SpectrumClass classify_origin(const Params& p) {
    using cd = std::complex<double>;
    // lambda^4 - b lambda^2 - c = 0 with z = lambda^2
    const double b = 12.0 * p.beta2 / p.beta4;
    const double c = 24.0 * p.mu / p.beta4;
    const double disc = b * b + 4.0 * c;
    cd z1, z2;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        // avoid cancellation
        const double q = -0.5 * (-b + (b >= 0 ? -s : s));
        z1 = q;
        z2 = (q != 0.0) ? cd(-c / q) : cd(0.0);
    } else {
        const double s = std::sqrt(-disc);
        z1 = cd(0.5 * b, 0.5 * s);
        z2 = cd(0.5 * b, -0.5 * s);
    }
    const cd l1 = std::sqrt(z1), l2 = std::sqrt(z2);
    SpectrumClass out;
    out.eigenvalues = {l1, -l1, l2, -l2};

    auto tol = [](cd l) { return 1e-9 * (1.0 + std::abs(l)); };
    bool all_real = true, all_imag = true;
    for (const cd& l : out.eigenvalues) {
        if (std::abs(l.imag()) > tol(l)) all_real = false;
        if (std::abs(l.real()) > tol(l)) all_imag = false;
    }
    if (all_imag) {
        out.kind = SpectrumKind::ImaginaryQuadruple;
    } else if (all_real) {
        const bool dbl = std::abs(std::abs(l1) - std::abs(l2)) <= tol(l1);
        out.kind = dbl ? SpectrumKind::DoubleRealPair : SpectrumKind::RealQuadruple;
    } else {
        bool mixed = false;
        for (const cd& l : out.eigenvalues)
            if (std::abs(l.imag()) <= tol(l) || std::abs(l.real()) <= tol(l)) mixed = true;
        out.kind = mixed ? SpectrumKind::SaddleCenter : SpectrumKind::ComplexQuadruple;
    }
    return out;
}

const char* to_string(SpectrumKind k) {
    switch (k) {
        case SpectrumKind::RealQuadruple: return "RealQuadruple";
        case SpectrumKind::ComplexQuadruple: return "ComplexQuadruple";
        case SpectrumKind::ImaginaryQuadruple: return "ImaginaryQuadruple";
        case SpectrumKind::DoubleRealPair: return "DoubleRealPair";
        case SpectrumKind::SaddleCenter: return "SaddleCenter";
    }
    return "?";
}

}  // namespace gnls
