#include "gnls/integrate.hpp"

#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "gnls/errors.hpp"

namespace gnls {

namespace odeint = boost::numeric::odeint;

namespace {

using S4 = std::array<double, 4>;
using S20 = std::array<double, 20>;

State4 to_state(const double* x) { return {x[0], x[1], x[2], x[3]}; }

void check_box(const double* x, double box) {
    for (int i = 0; i < 4; ++i)
        if (!std::isfinite(x[i]) || std::abs(x[i]) > box) throw SegmentLeavesBox();
}

template <class Stepper>
auto controlled(const IntegratorTol& tol) {
    return odeint::make_controlled(tol.abs, tol.rel, Stepper());
}

}  // namespace

State4 flow(const State4& u0, double t, const Params& p, const IntegratorTol& tol) {
    S4 x{u0[0], u0[1], u0[2], u0[3]};
    if (t == 0.0) return u0;
    auto rhs = [&](const S4& y, S4& dy, double) {
        const State4 f = vector_field(to_state(y.data()), p);
        for (int i = 0; i < 4; ++i) dy[i] = f[i];
    };
    auto obs = [&](const S4& y, double) { check_box(y.data(), tol.box); };
    odeint::integrate_adaptive(controlled<odeint::runge_kutta_fehlberg78<S4>>(tol), rhs, x, 0.0, t,
                               t / 200.0, obs);
    return to_state(x.data());
}

std::vector<State4> flow_at(const State4& u0, const std::vector<double>& times, const Params& p,
                            const IntegratorTol& tol) {
    std::vector<State4> out;
    out.reserve(times.size());
    if (times.empty()) return out;
    S4 x{u0[0], u0[1], u0[2], u0[3]};
    auto rhs = [&](const S4& y, S4& dy, double) {
        const State4 f = vector_field(to_state(y.data()), p);
        for (int i = 0; i < 4; ++i) dy[i] = f[i];
    };
    auto obs = [&](const S4& y, double) {
        check_box(y.data(), tol.box);
        out.push_back(to_state(y.data()));
    };
    const double span = std::max(times.back(), 1e-8);
    odeint::integrate_times(controlled<odeint::runge_kutta_fehlberg78<S4>>(tol), rhs, x, times.begin(),
                            times.end(), span / 200.0, obs);
    return out;
}

FlowJet flow_variational(const State4& u0, double t, const Params& p, const IntegratorTol& tol) {
    S20 x{};
    for (int i = 0; i < 4; ++i) x[i] = u0[i];
    for (int i = 0; i < 4; ++i) x[4 + 4 * i + i] = 1.0;  // column-major identity
    auto rhs = [&](const S20& y, S20& dy, double) {
        const State4 u = to_state(y.data());
        const State4 f = vector_field(u, p);
        const Mat4 A = jacobian(u, p);
        for (int i = 0; i < 4; ++i) dy[i] = f[i];
        Eigen::Map<const Mat4> V(y.data() + 4);
        Eigen::Map<Mat4> dV(dy.data() + 4);
        dV.noalias() = A * V;
    };
    auto obs = [&](const S20& y, double) { check_box(y.data(), tol.box); };
    if (t != 0.0)
        odeint::integrate_adaptive(controlled<odeint::runge_kutta_fehlberg78<S20>>(tol), rhs, x, 0.0, t,
                                   t / 200.0, obs);
    FlowJet jet;
    jet.u = to_state(x.data());
    jet.phi = Eigen::Map<const Mat4>(x.data() + 4);
    return jet;
}

Mat4 fundamental_matrix(const std::function<Mat4(double)>& A, double scale, const IntegratorTol& tol,
                        const std::vector<double>& breaks) {
    using S16 = std::array<double, 16>;
    S16 x{};
    for (int i = 0; i < 4; ++i) x[4 * i + i] = 1.0;
    auto rhs = [&](const S16& y, S16& dy, double s) {
        Eigen::Map<const Mat4> V(y.data());
        Eigen::Map<Mat4> dV(dy.data());
        dV.noalias() = scale * A(s) * V;
    };
    // integrate piecewise so that the stepper never straddles a breakpoint of A
    std::vector<double> knots{0.0};
    for (double b : breaks)
        if (b > knots.back() + 1e-14 && b < 1.0 - 1e-14) knots.push_back(b);
    knots.push_back(1.0);
    auto stepper = controlled<odeint::runge_kutta_fehlberg78<S16>>(tol);
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        const double h = knots[k + 1] - knots[k];
        odeint::integrate_adaptive(stepper, rhs, x, knots[k], knots[k + 1], h / 4.0);
    }
    return Eigen::Map<const Mat4>(x.data());
}

bool first_crossing(const State4& u0, double t_min, double t_max, const std::function<double(const State4&)>& g,
                    const Params& p, Crossing& out, const IntegratorTol& tol) {
    S4 x{u0[0], u0[1], u0[2], u0[3]};
    auto rhs = [&](const S4& y, S4& dy, double) {
        const State4 f = vector_field(to_state(y.data()), p);
        for (int i = 0; i < 4; ++i) dy[i] = f[i];
    };
    auto st = odeint::make_dense_output(tol.abs, tol.rel, odeint::runge_kutta_dopri5<S4>());
    st.initialize(x, 0.0, 1e-3);
    double gprev = g(u0);
    S4 tmp;
    while (st.current_time() < t_max) {
        st.do_step(rhs);
        check_box(st.current_state().data(), tol.box);
        const double t1 = st.current_time();
        const double g1 = g(to_state(st.current_state().data()));
        if (t1 > t_min && gprev != 0.0 && (g1 == 0.0 || (g1 > 0) != (gprev > 0))) {
            double a = std::max(st.previous_time(), t_min), b = t1;
            st.calc_state(a, tmp);
            double ga = g(to_state(tmp.data()));
            if ((ga > 0) == (g1 > 0)) a = st.previous_time(), ga = gprev;
            for (int it = 0; it < 100 && b - a > 1e-15 * std::max(1.0, b); ++it) {
                const double m = 0.5 * (a + b);
                st.calc_state(m, tmp);
                const double gm = g(to_state(tmp.data()));
                if ((gm > 0) == (ga > 0)) a = m, ga = gm;
                else b = m;
            }
            const double tc = 0.5 * (a + b);
            out.t = tc;
            out.u = flow(u0, tc, p, tol);
            return true;
        }
        gprev = g1;
    }
    return false;
}

}  // namespace gnls
