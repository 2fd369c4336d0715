#include "gnls/contin.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/SparseLU>

#include "gnls/errors.hpp"

namespace gnls {

const char* to_string(FamilyKind f) { return f == FamilyKind::EnergyFamily ? "EnergyFamily" : "Beta2Family"; }

const char* to_string(BifKind k) {
    switch (k) {
        case BifKind::SB: return "SB";
        case BifKind::PD: return "PD";
        case BifKind::SN: return "SN";
        case BifKind::Fold: return "Fold";
        case BifKind::Tk: return "Tk";
        case BifKind::Bk: return "Bk";
        case BifKind::BkHat: return "BkHat";
        case BifKind::CSB: return "CSB";
        case BifKind::CSN: return "CSN";
        case BifKind::CTk: return "CTk";
        case BifKind::CBk: return "CBk";
        case BifKind::CBkHat: return "CBkHat";
        case BifKind::Event: return "Event";
    }
    return "?";
}

Monitor monitor_energy(double H0) {
    return {"H", [H0](const OrbitSolution& o) { return o.energy - H0; }, BifKind::Event};
}

Monitor monitor_trace(double target, BifKind kind) {
    return {"trace", [target](const OrbitSolution& o) { return floquet(o).trace - target; }, kind};
}

Monitor monitor_rotation(int p, int k) {
    const double r = double(p) / k;
    return {"alpha-" + std::to_string(p) + "/" + std::to_string(k),
            [r](const OrbitSolution& o) {
                const FloquetData fd = floquet(o);
                if (!fd.rotation_number) return std::numeric_limits<double>::quiet_NaN();
                return *fd.rotation_number - r;
            },
            k <= 2 ? (k == 1 ? BifKind::SB : BifKind::BkHat) : (k <= 4 ? BifKind::Tk : BifKind::Bk), k, p};
}

Monitor monitor_beta2(double b0) {
    return {"beta2", [b0](const OrbitSolution& o) { return o.params.beta2 - b0; }, BifKind::Event};
}

Monitor monitor_period(double T0) {
    return {"T", [T0](const OrbitSolution& o) { return o.period - T0; }, BifKind::Event};
}

Monitor monitor_tangency(const State4& near, Contact kind) {
    if (kind == Contact::CubicTangency) {
        return {"cubic-contact",
                [near](const OrbitSolution& o) {
                    double best = std::numeric_limits<double>::infinity(), val = std::numeric_limits<double>::quiet_NaN();
                    for (const SigmaPoint& sp : sigma_intersections(o)) {
                        const double d = (sp.state - near).norm();
                        if (d < best) best = d, val = sp.state[2];
                    }
                    return val;
                },
                BifKind::Event};
    }
    return {"quadratic-contact",
            [near](const OrbitSolution& o) {
                const int n = 16 * o.mesh.ntst;
                double best = std::numeric_limits<double>::infinity(), val = std::numeric_limits<double>::quiet_NaN();
                State4 a = evaluate(o, 0.0);
                for (int i = 1; i <= n; ++i) {
                    const State4 b = evaluate(o, double(i) / n);
                    if ((a[2] > 0) != (b[2] > 0)) {
                        double lo = double(i - 1) / n, hi = double(i) / n, flo = a[2];
                        for (int it = 0; it < 50; ++it) {
                            const double mid = 0.5 * (lo + hi);
                            const double fm = evaluate(o, mid)[2];
                            if ((fm > 0) == (flo > 0)) lo = mid, flo = fm;
                            else hi = mid;
                        }
                        const State4 c = evaluate(o, 0.5 * (lo + hi));
                        const double d = (c - near).norm();
                        if (d < best) best = d, val = c[1];
                    }
                    a = b;
                }
                return val;
            },
            BifKind::Event};
}

BranchPoint describe(const OrbitSolution& o, bool with_floquet, bool with_sections) {
    BranchPoint bp;
    bp.beta2 = o.params.beta2;
    bp.H = o.energy;
    bp.T = o.period;
    bp.eps = o.eps;
    bp.max_u = o.max_abs();
    bp.iterations = o.iterations;
    if (with_floquet) bp.floquet = floquet(o);
    if (with_sections) {
        bp.sigma = sigma_intersections(o);
        try {
            bp.loops = count_loops(o);
        } catch (const DegenerateProjection&) {
            bp.loops = -1;
        }
    }
    return bp;
}

namespace {

double wnorm(const Eigen::VectorXd& v, const Eigen::VectorXd& w) { return std::sqrt((w.array() * v.array().square()).sum()); }

double free_scalar_rate(const BvpProblem& prob, const Eigen::VectorXd& x, const Eigen::VectorXd& v, FamilyKind fam) {
    if (fam == FamilyKind::Beta2Family) return v[prob.index_beta2()];
    const Params p = prob.params_of(x);
    const State4 u0 = x.head<4>();
    return grad_H(u0, p).dot(v.head<4>());
}

// Predictor-corrector engine on one mesh.
struct Tracer {
    BvpProblem prob;
    Eigen::VectorXd x, v;
    NewtonOptions opt;

    Tracer(const OrbitSolution& o, const BvpSpec& spec, const NewtonOptions& no) : prob(o, spec), x(prob.pack(o)), opt(no) {}

    // Corrected point at arclength offset s along v from x.
    bool solve_at(double s, Eigen::VectorXd& y, int& iters) {
        ArclengthRow row;
        row.tangent = prob.weights().cwiseProduct(v);
        row.point = x + s * v;
        try {
            NewtonResult r = newton(prob, row.point, opt, &row);
            y = r.x;
            iters = r.iterations;
            return true;
        } catch (const Error&) {
            return false;
        }
    }

    void initial_tangent(FamilyKind fam, int direction) {
        Eigen::SparseMatrix<double> J = prob.jacobian(x);
        const int n = prob.n_unknowns();
        std::mt19937_64 rng(7);
        std::normal_distribution<double> nd;
        Eigen::VectorXd r(n);
        for (int i = 0; i < n; ++i) r[i] = nd(rng) * prob.weights()[i];
        std::vector<Eigen::Triplet<double>> trip;
        for (int k = 0; k < J.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(J, k); it; ++it)
                trip.emplace_back(it.row(), it.col(), it.value());
        for (int c = 0; c < n; ++c) trip.emplace_back(J.rows(), c, r[c]);
        Eigen::SparseMatrix<double> K(n, n);
        K.setFromTriplets(trip.begin(), trip.end());
        K.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.analyzePattern(K);
        lu.factorize(K);
        if (lu.info() != Eigen::Success) throw SingularJacobian();
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e[n - 1] = 1.0;
        v = lu.solve(e);
        v /= wnorm(v, prob.weights());
        double rate = free_scalar_rate(prob, x, v, fam);
        if (std::abs(rate) < 1e-12) rate = v[prob.index_T()];
        if ((rate > 0) != (direction > 0)) v = -v;
    }

    void secant(const Eigen::VectorXd& xn) {
        Eigen::VectorXd d = xn - x;
        const double nrm = wnorm(d, prob.weights());
        if (nrm > 0.0) v = d / nrm;
    }
};

BvpSpec family_spec(FamilyKind fam, double H0, bool half_shift) {
    BvpSpec s;
    s.enforce_half_shift = half_shift;
    if (fam == FamilyKind::Beta2Family) {
        s.beta2_free = true;
        s.constraints = {Constraint::energy(H0), Constraint::arclength()};
    } else {
        s.constraints = {Constraint::arclength()};
    }
    return s;
}

BvpSpec pinned_spec(const BvpSpec& fam, const OrbitSolution& o, bool half_shift) {
    BvpSpec s;
    s.enforce_half_shift = half_shift;
    s.beta2_free = fam.beta2_free;
    if (fam.beta2_free) s.constraints = {fam.constraints.front(), Constraint::beta2(o.params.beta2)};
    else s.constraints = {Constraint::energy(o.energy)};
    return s;
}

double energy_drift(const OrbitSolution& o) {
    double d = 0.0;
    for (int j = 0; j < o.mesh.ntst; ++j) {
        const double t = o.mesh.breakpoints[j] + 0.5 * o.mesh.width(j) / o.mesh.ncol;
        d = std::max(d, std::abs(hamiltonian(evaluate(o, t), o.params) - o.energy));
    }
    return d;
}

Eigen::VectorXd resample_vector(const BvpProblem& from, const Eigen::VectorXd& v, const BvpProblem& to) {
    OrbitSolution tmp = from.unpack(v);
    tmp.params = from.params_of(v);
    OrbitSolution r = resample(tmp, to.mesh());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(to.n_unknowns());
    const int n = 4 * to.mesh().nodes();
    out.head(n) = Eigen::Map<const Eigen::VectorXd>(r.values.data(), n);
    out.tail(out.size() - n) = v.tail(v.size() - 4 * from.mesh().nodes());
    return out;
}

double circ_dist(double a, double b) {
    double d = std::abs(a - b);
    d -= std::floor(d);
    return std::min(d, 1.0 - d);
}

// Root of the monitor on the segment s in (0, ds) from the tracer's current point.
bool refine_segment(Tracer& tr, const Monitor& mon, double ds, double g0, double g1, Eigen::VectorXd& out) {
    double a = 0.0, b = ds, ga = g0, gb = g1;
    int failed_secant = 0, refinements = 0;
    int side = 0;
    Eigen::VectorXd y;
    int iters = 0;
    while (refinements < 60) {
        double s;
        if (failed_secant >= 5) s = 0.5 * (a + b);
        else {
            s = b - gb * (b - a) / (gb - ga);
            if (!(s > a && s < b)) s = 0.5 * (a + b);
        }
        ++refinements;
        if (!tr.solve_at(s, y, iters)) {
            s = 0.5 * (a + b);
            if (!tr.solve_at(s, y, iters)) {
                if (refinements >= 20) throw LostBracket();
                ++failed_secant;
                continue;
            }
        }
        const OrbitSolution o = tr.prob.unpack(y);
        const double g = mon.fn(o);
        if (!std::isfinite(g)) throw LostBracket();
        if (std::abs(g) <= 1e-8) {
            out = y;
            return true;
        }
        if (b - a <= 1e-13 * std::max(1.0, ds)) {
            // a collapsed bracket with a large monitor value is a jump, not a root
            if (std::abs(g) > 1e-6) throw LostBracket();
            out = y;
            return true;
        }
        const double width = b - a;
        if ((g > 0) == (ga > 0)) {
            a = s, ga = g;
            if (side == -1) gb *= 0.5;  // Illinois modification
            side = -1;
        } else {
            b = s, gb = g;
            if (side == 1) ga *= 0.5;
            side = 1;
        }
        if (b - a > 0.5 * width) ++failed_secant;
    }
    throw LostBracket();
}

struct ReplayState {
    Tracer tracer;
    int point;
};

}  // namespace

double Branch::scalar(int i) const {
    return family == FamilyKind::Beta2Family ? points[i].beta2 : points[i].H;
}

namespace {

// Tracer positioned at chain point i (event points are not on the chain).
Tracer replay_to(const Branch& br, int i) {
    int snap = -1;
    for (int k = 0; k < int(br.snapshots.size()); ++k) {
        const Snapshot& s = br.snapshots[k];
        if (s.point <= i && br.points[s.point].event < 0 && s.tangent.size() > 0) {
            if (snap < 0 || s.point >= br.snapshots[snap].point) snap = k;
        }
    }
    if (snap < 0) throw std::logic_error("branch has no usable snapshot");
    const Snapshot& s = br.snapshots[snap];
    BvpSpec spec = br.spec;
    spec.enforce_half_shift = spec.enforce_half_shift && s.orbit.mesh.half_shift_compatible();
    NewtonOptions no;
    no.tol = br.ctl.newton_tol;
    no.max_iter = br.ctl.newton_max_iter;
    Tracer tr(s.orbit, spec, no);
    tr.v = s.tangent;
    for (int j = s.point + 1; j <= i; ++j) {
        if (br.points[j].event >= 0) continue;
        tr.prob.set_reference(tr.prob.unpack(tr.x));
        Eigen::VectorXd y;
        int it = 0;
        if (!tr.solve_at(br.points[j].ds, y, it)) throw NoConvergence(it, 0.0);
        tr.secant(y);
        tr.x = y;
    }
    tr.prob.set_reference(tr.prob.unpack(tr.x));
    return tr;
}

}  // namespace

OrbitSolution Branch::orbit_at(int i) const {
    if (i < 0 || i >= int(points.size())) throw std::out_of_range("branch point index");
    if (points[i].snapshot >= 0) return snapshots[points[i].snapshot].orbit;
    if (points[i].event >= 0) return events[points[i].event].orbit;
    Tracer tr = replay_to(*this, i);
    OrbitSolution o = tr.prob.unpack(tr.x);
    return o;
}

Branch extend_branch(const OrbitSolution& start, FamilyKind family, const StepControl& ctl) {
    if (!(ctl.ds_min <= ctl.ds_init && ctl.ds_init <= ctl.ds_max)) throw std::invalid_argument("step bounds");
    Branch br;
    br.family = family;
    br.direction = ctl.direction;
    br.ctl = ctl;
    br.pinned_energy = start.energy;
    const bool half = ctl.symmetric && start.symmetry == Symmetry::Rstar && start.mesh.half_shift_compatible();
    br.spec = family_spec(family, start.energy, half);

    NewtonOptions no;
    no.tol = ctl.newton_tol;
    no.max_iter = ctl.newton_max_iter;
    Tracer tr(start, br.spec, no);
    // converge the start on its own terms
    {
        OrbitSolution s0 = newton_solve(start, pinned_spec(br.spec, start, half), no);
        s0.symmetry = start.symmetry;
        tr = Tracer(s0, br.spec, no);
    }
    tr.initial_tangent(family, ctl.direction);

    auto record = [&](const OrbitSolution& o, double s, double ds) {
        BranchPoint bp = describe(o, ctl.floquet, ctl.sections);
        bp.s = s;
        bp.ds = ds;
        return bp;
    };
    auto add_snapshot = [&](const OrbitSolution& o, const Eigen::VectorXd& tangent, int point) {
        br.snapshots.push_back({point, o, tangent});
        return int(br.snapshots.size()) - 1;
    };

    OrbitSolution cur = tr.prob.unpack(tr.x);
    cur.symmetry = start.symmetry;
    br.points.push_back(record(cur, 0.0, 0.0));
    br.points.back().snapshot = add_snapshot(cur, tr.v, 0);
    std::vector<double> gprev;
    for (const Monitor& m : ctl.events) gprev.push_back(m.fn(cur));

    double ds = ctl.ds_init, s = 0.0;
    int successes = 0, accepted = 0;
    for (int step = 0; step < ctl.max_steps; ++step) {
        tr.prob.set_reference(cur);
        Eigen::VectorXd y;
        int iters = 0;
        bool ok = tr.solve_at(ds, y, iters);
        OrbitSolution nxt;
        BranchPoint bp;
        if (ok) {
            nxt = tr.prob.unpack(y);
            nxt.symmetry = start.symmetry;
            nxt.iterations = iters;
            if (std::abs(nxt.eps) > 1e-10) ok = false;
        }
        if (ok) {
            bp = record(nxt, s + ds, ds);
            const BranchPoint& last = br.points.back();
            // hyperbolic ends count as alpha 0 (trace > 2) or 1/2 (trace < -2)
            auto alpha = [](const FloquetData& f) {
                return f.rotation_number ? *f.rotation_number : (f.trace > 0 ? 0.0 : 0.5);
            };
            if (bp.floquet && last.floquet && (bp.floquet->rotation_number || last.floquet->rotation_number) &&
                circ_dist(alpha(*bp.floquet), alpha(*last.floquet)) > ctl.max_alpha_jump && ds > ctl.ds_min * 2)
                ok = false;
        }
        if (!ok) {
            ds *= 0.5;
            successes = 0;
            if (ds < ctl.ds_min) {
                if (accepted == 0) throw ImmediateFailure();
                br.stalled = true;
                br.stop_reason = "StallAtMinStep";
                return br;
            }
            continue;
        }
        // events on the segment
        std::vector<double> gnew;
        for (const Monitor& m : ctl.events) gnew.push_back(m.fn(nxt));
        for (std::size_t k = 0; k < ctl.events.size(); ++k) {
            const double g0 = gprev[k], g1 = gnew[k];
            if (!std::isfinite(g0) || !std::isfinite(g1) || g0 == 0.0 || (g0 > 0) == (g1 > 0)) continue;
            Eigen::VectorXd ye;
            try {
                refine_segment(tr, ctl.events[k], ds, g0, g1, ye);
            } catch (const LostBracket&) {
                continue;
            }
            OrbitSolution eo = tr.prob.unpack(ye);
            eo.symmetry = start.symmetry;
            BifurcationPoint ev;
            ev.kind = ctl.events[k].kind;
            ev.label = ctl.events[k].name;
            if (ctl.events[k].k > 0) ev.k = ctl.events[k].k, ev.p = ctl.events[k].p;
            ev.beta2 = eo.params.beta2;
            ev.energy = eo.energy;
            ev.orbit = eo;
            ev.floquet = floquet(eo);
            ev.family = family;
            const double se = s + tr.prob.weights().cwiseProduct(tr.v).dot(ye - tr.x);
            ev.s = se;
            br.events.push_back(ev);
            BranchPoint ep = record(eo, se, 0.0);
            ep.event = int(br.events.size()) - 1;
            br.points.push_back(ep);
        }
        std::sort(br.points.end() - std::count_if(br.points.begin(), br.points.end(),
                                                  [&](const BranchPoint& p) { return p.s > s && p.event >= 0; }),
                  br.points.end(), [](const BranchPoint& a, const BranchPoint& b) { return a.s < b.s; });
        gprev = gnew;

        tr.secant(y);
        tr.x = y;
        cur = nxt;
        s += ds;
        ++accepted;
        br.points.push_back(bp);
        const int idx = int(br.points.size()) - 1;

        bool snap = accepted % ctl.snapshot_every == 0;
        if (ctl.remesh_every > 0 && accepted % ctl.remesh_every == 0) {
            int ntst = cur.mesh.ntst;
            if (energy_drift(cur) > 1e-9 * (1.0 + std::abs(cur.energy)) && 2 * ntst <= ctl.ntst_max) ntst *= 2;
            const Mesh m = equidistributed_mesh(cur, ntst);
            const bool h2 = half && m.half_shift_compatible();
            try {
                OrbitSolution rm = newton_solve(resample(cur, m), pinned_spec(br.spec, cur, h2), no);
                rm.symmetry = start.symmetry;
                BvpSpec fs = br.spec;
                fs.enforce_half_shift = h2;
                Tracer nt(rm, fs, no);
                nt.v = resample_vector(tr.prob, tr.v, nt.prob);
                nt.v /= wnorm(nt.v, nt.prob.weights());
                tr = std::move(nt);
                cur = rm;
                snap = true;
            } catch (const Error&) {
                // keep the old mesh
            }
        }
        if (snap) br.points[idx].snapshot = add_snapshot(cur, tr.v, idx);

        if (successes >= 2) ds = std::min(ds * 1.3, ctl.ds_max), successes = 0;
        else ++successes;

        if (cur.period > ctl.T_max) { br.stop_reason = "T_max"; break; }
        if (cur.max_abs() > ctl.box) { br.stop_reason = "box"; break; }
        if (cur.energy < ctl.H_min || cur.energy > ctl.H_max) { br.stop_reason = "energy window"; break; }
        if (cur.params.beta2 < ctl.beta2_min || cur.params.beta2 > ctl.beta2_max) {
            br.stop_reason = "parameter window";
            break;
        }
        if (ctl.stop && ctl.stop(cur)) { br.stop_reason = "predicate"; break; }
    }
    if (br.stop_reason.empty()) br.stop_reason = "max_steps";
    if (br.points.back().snapshot < 0) br.points.back().snapshot = add_snapshot(cur, tr.v, int(br.points.size()) - 1);
    return br;
}

OrbitSolution locate_event(Branch& br, const Monitor& test, int which) {
    if (which < 0 || which + 1 >= int(br.points.size())) throw std::out_of_range("bracket index");
    int c = which;
    while (c > 0 && br.points[c].event >= 0) --c;
    int c2 = which + 1;
    while (c2 < int(br.points.size()) && br.points[c2].event >= 0) ++c2;
    if (c2 >= int(br.points.size())) throw std::invalid_argument("no chain point after bracket");
    Tracer tr = replay_to(br, c);
    const OrbitSolution oa = tr.prob.unpack(tr.x);
    Eigen::VectorXd yb;
    int it = 0;
    if (!tr.solve_at(br.points[c2].ds, yb, it)) throw LostBracket();
    const double g0 = test.fn(oa), g1 = test.fn(tr.prob.unpack(yb));
    if (!(std::isfinite(g0) && std::isfinite(g1)) || (g0 > 0) == (g1 > 0))
        throw std::invalid_argument("monitor does not change sign on the bracket");
    Eigen::VectorXd y;
    refine_segment(tr, test, br.points[c2].ds, g0, g1, y);
    OrbitSolution o = tr.prob.unpack(y);
    o.symmetry = oa.symmetry;
    BifurcationPoint ev;
    ev.kind = test.kind;
    ev.label = test.name;
    if (test.k > 0) ev.k = test.k, ev.p = test.p;
    ev.beta2 = o.params.beta2;
    ev.energy = o.energy;
    ev.orbit = o;
    ev.floquet = floquet(o);
    ev.family = br.family;
    ev.s = br.points[c].s + tr.prob.weights().cwiseProduct(tr.v).dot(y - tr.x);
    br.events.push_back(ev);
    BranchPoint bp = describe(o, br.ctl.floquet, br.ctl.sections);
    bp.s = ev.s;
    bp.event = int(br.events.size()) - 1;
    auto pos = std::upper_bound(br.points.begin(), br.points.end(), bp.s,
                                [](double s, const BranchPoint& p) { return s < p.s; });
    br.points.insert(pos, bp);
    std::sort(br.events.begin(), br.events.end(),
              [](const BifurcationPoint& a, const BifurcationPoint& b) { return a.s < b.s; });
    for (BranchPoint& p : br.points)
        if (p.event >= 0)
            for (int k = 0; k < int(br.events.size()); ++k)
                if (br.events[k].s == p.s) p.event = k;
    return o;
}

std::vector<OrbitSolution> fold_points(const Branch& br) {
    std::vector<OrbitSolution> out;
    std::vector<int> chain;
    for (int i = 0; i < int(br.points.size()); ++i)
        if (br.points[i].event < 0) chain.push_back(i);
    if (chain.size() < 3) return out;
    for (std::size_t q = 1; q + 1 < chain.size(); ++q) {
        const double a = br.scalar(chain[q - 1]), b = br.scalar(chain[q]), c = br.scalar(chain[q + 1]);
        if ((b - a) * (c - b) >= 0.0) continue;
        const double sign = (b > a) ? 1.0 : -1.0;  // maximum when increasing first
        Tracer tr = replay_to(br, chain[q - 1]);
        const double span = br.points[chain[q]].ds + br.points[chain[q + 1]].ds;
        auto value = [&](double s, Eigen::VectorXd& y) {
            int it = 0;
            if (!tr.solve_at(s, y, it)) return std::numeric_limits<double>::quiet_NaN();
            const OrbitSolution o = tr.prob.unpack(y);
            return -sign * (br.family == FamilyKind::Beta2Family ? o.params.beta2 : o.energy);
        };
        // golden section with parabolic steps (Brent minimization)
        const double gr = 0.3819660112501051;
        double lo = 0.0, hi = span;
        double x = br.points[chain[q]].ds, w = x, v = x;
        Eigen::VectorXd yx, yt;
        double fx = value(x, yx), fw = fx, fv = fx;
        if (!std::isfinite(fx)) continue;
        double d = 0.0, e = 0.0;
        for (int it = 0; it < 60; ++it) {
            const double xm = 0.5 * (lo + hi);
            const double tol1 = 1e-9 * span + 1e-12;
            if (std::abs(x - xm) <= 2.0 * tol1 - 0.5 * (hi - lo)) break;
            bool golden = true;
            if (std::abs(e) > tol1) {
                double r = (x - w) * (fx - fv), qq = (x - v) * (fx - fw);
                double p = (x - v) * qq - (x - w) * r;
                qq = 2.0 * (qq - r);
                if (qq > 0) p = -p;
                qq = std::abs(qq);
                const double etemp = e;
                e = d;
                if (!(std::abs(p) >= std::abs(0.5 * qq * etemp) || p <= qq * (lo - x) || p >= qq * (hi - x))) {
                    d = p / qq;
                    golden = false;
                }
            }
            if (golden) {
                e = (x >= xm) ? lo - x : hi - x;
                d = gr * e;
            }
            const double u = std::abs(d) >= tol1 ? x + d : x + (d > 0 ? tol1 : -tol1);
            const double fu = value(u, yt);
            if (!std::isfinite(fu)) break;
            if (fu <= fx) {
                if (u >= x) lo = x; else hi = x;
                v = w, fv = fw, w = x, fw = fx, x = u, fx = fu;
                yx = yt;
            } else {
                if (u < x) lo = u; else hi = u;
                if (fu <= fw || w == x) v = w, fv = fw, w = u, fw = fu;
                else if (fu <= fv || v == x || v == w) v = u, fv = fu;
            }
        }
        OrbitSolution o = tr.prob.unpack(yx);
        o.symmetry = br.snapshots.front().orbit.symmetry;
        out.push_back(o);
    }
    return out;
}

}  // namespace gnls
