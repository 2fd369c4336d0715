#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace gnls {

using State4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

struct Params {
    double beta2 = 0.4;
    double beta4 = -1.0;
    double gamma = 1.0;
    double mu = 1.0;

    void validate() const;  // throws std::invalid_argument
    bool operator==(const Params&) const = default;
};

State4 vector_field(const State4& u, const Params& p);
double hamiltonian(const State4& u, const Params& p);
State4 grad_H(const State4& u, const Params& p);
Mat4 jacobian(const State4& u, const Params& p);
Mat4 hessian_H(const State4& u, const Params& p);

// derivatives with respect to beta2, used when beta2 is an unknown
State4 dfield_dbeta2(const State4& u, const Params& p);
State4 dgradH_dbeta2(const State4& u, const Params& p);
double dH_dbeta2(const State4& u, const Params& p);

// f = J grad H
Mat4 poisson_matrix(const Params& p);

State4 apply_R1(const State4& u);
State4 apply_R2(const State4& u);

std::vector<State4> equilibria(const Params& p);

enum class SpectrumKind { RealQuadruple, ComplexQuadruple, ImaginaryQuadruple, DoubleRealPair, SaddleCenter };

struct SpectrumClass {
    SpectrumKind kind;
    std::array<std::complex<double>, 4> eigenvalues;
};

SpectrumClass classify_origin(const Params& p);
const char* to_string(SpectrumKind k);

}  // namespace gnls
