#include "gnls/branching.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <cmath>
#include <numbers>

#include "gnls/errors.hpp"

namespace gnls {

OrbitSolution k_cover(const OrbitSolution& orbit, int k, bool refine) {
    if (k < 1) throw std::invalid_argument("k_cover needs k >= 1");
    if (k == 1) return orbit;
    const Mesh& m = orbit.mesh;
    OrbitSolution c = orbit;
    c.mesh.ntst = k * m.ntst;
    c.mesh.breakpoints.assign(c.mesh.ntst + 1, 0.0);
    for (int q = 0; q < k; ++q)
        for (int j = 0; j < m.ntst; ++j) c.mesh.breakpoints[q * m.ntst + j] = (q + m.breakpoints[j]) / k;
    c.mesh.breakpoints.back() = 1.0;
    const int per = m.ntst * m.ncol;
    c.values.resize(4, c.mesh.nodes());
    for (int q = 0; q < k; ++q) c.values.middleCols(q * per, per) = orbit.values.leftCols(per);
    c.values.col(k * per) = orbit.values.col(per);
    c.period = k * orbit.period;
    if (!refine) return c;
    try {
        NewtonOptions no;
        no.max_iter = 6;
        BvpSpec s;
        s.constraints = {Constraint::energy(orbit.energy)};
        OrbitSolution r = newton_solve(c, s, no);
        r.symmetry = orbit.symmetry;
        return r;
    } catch (const Error&) {
        return c;  // exact at resonance, where the cover problem is singular
    }
}

namespace {

double plane_dist2(const State4& u, int which) {
    return which == 1 ? u[1] * u[1] + u[3] * u[3] : u[0] * u[0] + u[2] * u[2];
}

// Minimum over t of the squared distance to Sigma_which, with the minimizing phase.
std::pair<double, double> plane_min(const OrbitSolution& o, int which) {
    const int n = 16 * o.mesh.ntst;
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = plane_dist2(evaluate(o, double(i) / n), which);
    double best = std::numeric_limits<double>::infinity(), tbest = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = d[(i + n - 1) % n], b = d[i], c = d[(i + 1) % n];
        if (!(b <= a && b <= c)) continue;
        double lo = double(i - 1) / n, hi = double(i + 1) / n;
        const double g = 0.6180339887498949;
        double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        double f1 = plane_dist2(evaluate(o, x1), which), f2 = plane_dist2(evaluate(o, x2), which);
        for (int it = 0; it < 60; ++it) {
            if (f1 < f2) hi = x2, x2 = x1, f2 = f1, x1 = hi - g * (hi - lo), f1 = plane_dist2(evaluate(o, x1), which);
            else lo = x1, x1 = x2, f1 = f2, x2 = lo + g * (hi - lo), f2 = plane_dist2(evaluate(o, x2), which);
        }
        const double f = std::min(f1, f2);
        if (f < best) best = f, tbest = f1 < f2 ? x1 : x2;
    }
    tbest -= std::floor(tbest);
    return {best, tbest};
}

double seg_dist(const State4& p, const State4& a, const State4& b) {
    const State4 ab = b - a;
    const double L = ab.squaredNorm();
    double t = L > 0 ? (p - a).dot(ab) / L : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (p - a - t * ab).norm();
}

double directed(const std::vector<State4>& A, const std::vector<State4>& B) {
    double h = 0.0;
    const int n = int(B.size());
    for (const State4& p : A) {
        double m = std::numeric_limits<double>::infinity();
        for (int j = 0; j < n; ++j) m = std::min(m, (p - B[j]).squaredNorm());
        m = std::sqrt(m);
        if (m <= h) continue;
        // refine against the polyline near the closest samples
        double best = m;
        for (int j = 0; j < n; ++j)
            if ((p - B[j]).norm() <= m + 1e-12) {
                best = std::min(best, seg_dist(p, B[j], B[(j + 1) % n]));
                best = std::min(best, seg_dist(p, B[(j + n - 1) % n], B[j]));
            }
        h = std::max(h, best);
    }
    return h;
}

}  // namespace

double sigma_plane_distance(const OrbitSolution& orbit, int which) { return std::sqrt(plane_min(orbit, which).first); }

Symmetry classify_symmetry(const OrbitSolution& orbit, double tol) {
    const double scale = 1.0 + orbit.max_abs();
    const bool r1 = sigma_plane_distance(orbit, 1) <= tol * scale;
    const bool r2 = sigma_plane_distance(orbit, 2) <= tol * scale;
    if (r1 && r2) return Symmetry::Rstar;
    if (r1) return Symmetry::R1only;
    if (r2) return Symmetry::R2only;
    return Symmetry::NonSymmetric;
}

double hausdorff(const OrbitSolution& a, const OrbitSolution& b, int samples) {
    std::vector<State4> A(samples), B(samples);
    for (int i = 0; i < samples; ++i) {
        A[i] = evaluate(a, double(i) / samples);
        B[i] = evaluate(b, double(i) / samples);
    }
    return std::max(directed(A, B), directed(B, A));
}

// ---------------------------------------------------------------------------

namespace {

BvpSpec family_spec_for(const BifurcationPoint& bp, bool half) {
    BvpSpec s;
    s.enforce_half_shift = half;
    if (bp.family == FamilyKind::Beta2Family) {
        s.beta2_free = true;
        s.constraints = {Constraint::energy(bp.orbit.energy), Constraint::arclength()};
    } else {
        s.constraints = {Constraint::arclength()};
    }
    return s;
}

// Node part of v reflected by the reversor about phase s0: (S v)(t) = R v(2 s0 - t).
Eigen::VectorXd reflect(const BvpProblem& P, const Eigen::VectorXd& v, int which, double s0) {
    OrbitSolution d = P.unpack(v);
    Eigen::VectorXd out = v;
    const int nn = P.mesh().nodes();
    for (int g = 0; g < nn; ++g) {
        const State4 w = evaluate(d, 2.0 * s0 - P.mesh().node_time(g));
        out.segment<4>(4 * g) = which == 1 ? apply_R1(w) : apply_R2(w);
    }
    out[P.index_eps()] = -v[P.index_eps()];
    return out;
}

// Distance of an orbit from its own shift by 1/k of the period; zero for k-covers.
double cover_defect(const OrbitSolution& o, int k) {
    const int n = 400 * k;
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = double(i) / n;
        d = std::max(d, (evaluate(o, t + 1.0 / k) - evaluate(o, t)).cwiseAbs().maxCoeff());
    }
    return d;
}

// smallest sup-distance over the 1/k shifts, both orbits on the same cover mesh
double shift_distance(const OrbitSolution& a, const OrbitSolution& b, int k) {
    const int n = 200 * k;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) {
        double d = 0.0;
        for (int i = 0; i < n && d < best; ++i) {
            const double t = double(i) / n;
            d = std::max(d, (evaluate(a, t + double(j) / k) - evaluate(b, t)).cwiseAbs().maxCoeff());
        }
        best = std::min(best, d);
    }
    return best;
}

struct Candidate {
    Eigen::VectorXd dir;  // in the square problem's layout
    std::string origin;
};

std::vector<Candidate> symmetric_candidates(const BvpProblem& P, const std::vector<Eigen::VectorXd>& ker,
                                            const OrbitSolution& parent, int k) {
    std::vector<Candidate> out;
    if (ker.size() == 1) {
        out.push_back({ker[0], "kernel+"});
        out.push_back({-ker[0], "kernel-"});
        return out;
    }
    const Eigen::VectorXd& W = P.weights();
    auto ip = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (W.array() * a.array() * b.array()).sum(); };
    Eigen::Matrix2d G;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) G(i, j) = ip(ker[i], ker[j]);
    for (int which : {1, 2}) {
        const double t0 = plane_min(parent, which).second;
        for (int half = 0; half < 2; ++half) {
            const double s0 = (t0 + 0.5 * half) / k;
            Eigen::Matrix2d A;
            for (int j = 0; j < 2; ++j) {
                const Eigen::VectorXd r = reflect(P, ker[j], which, s0);
                Eigen::Vector2d b(ip(ker[0], r), ip(ker[1], r));
                A.col(j) = G.ldlt().solve(b);
            }
            Eigen::EigenSolver<Eigen::Matrix2d> es(A);
            int best = 0;
            for (int q = 1; q < 2; ++q)
                if (std::abs(es.eigenvalues()[q] - 1.0) < std::abs(es.eigenvalues()[best] - 1.0)) best = q;
            const Eigen::Vector2d c = es.eigenvectors().col(best).real();
            Eigen::VectorXd d = c[0] * ker[0] + c[1] * ker[1];
            const std::string tag = std::string(which == 1 ? "R1" : "R2") + (half ? "@half" : "@0");
            out.push_back({d, tag + "+"});
            out.push_back({-d, tag + "-"});
        }
    }
    return out;
}

SwitchResult switch_core(const BifurcationPoint& bp, int k, int p, const SwitchOptions& opt) {
    SwitchResult res;
    res.k = k;
    res.p = p;
    const OrbitSolution& parent = bp.orbit;
    const OrbitSolution cover = k_cover(parent, k);
    const double umax = cover.max_abs();

    BvpSpec sq;
    sq.constraints = {Constraint::energy(cover.energy)};
    BvpProblem P(cover, sq);
    const Eigen::VectorXd xs = P.pack(cover);
    const std::vector<Eigen::VectorXd> ker = null_vectors(P, xs, k == 1 ? 1 : 2);
    const std::vector<Candidate> cands = symmetric_candidates(P, ker, parent, k);

    BvpProblem F(cover, family_spec_for(bp, false));
    const Eigen::VectorXd x0 = F.pack(cover);
    NewtonOptions no;
    no.tol = opt.ctl.newton_tol;
    no.max_iter = 12;
    const double parent_scalar = bp.family == FamilyKind::Beta2Family ? parent.params.beta2 : parent.energy;

    // all candidates at one amplitude, the largest that leaves the parent
    std::vector<double> ladder = opt.amplitudes;
    std::sort(ladder.begin(), ladder.end(), std::greater<>());
    for (double a : ladder) {
        const double amp = a * umax;
        for (const Candidate& c : cands) {
            Eigen::VectorXd d = Eigen::VectorXd::Zero(F.n_unknowns());
            d.head(P.n_unknowns()) = c.dir;
            d /= d.head(4 * F.mesh().nodes()).cwiseAbs().maxCoeff();
            ArclengthRow row;
            row.tangent = F.weights().cwiseProduct(d);
            row.point = x0 + amp * d;
            OrbitSolution child;
            try {
                child = F.unpack(newton(F, row.point, no, &row).x);
            } catch (const Error&) {
                continue;
            }
            if (std::abs(child.eps) > 1e-8) continue;
            if (hausdorff(child, parent, 600) < 0.25 * amp) continue;  // fell back onto the parent
            if (k > 1 && cover_defect(child, k) < 0.1 * amp) continue;  // another member of the parent family
            bool seen = false;
            for (const SwitchedFamily& f : res.families)
                if (shift_distance(f.first, child, k) < 0.05 * amp) seen = true;
            if (seen) continue;
            child.symmetry = classify_symmetry(child);
            SwitchedFamily fam;
            fam.first = child;
            fam.symmetry = child.symmetry;
            fam.amplitude = amp;
            fam.origin = c.origin;
            res.families.push_back(std::move(fam));
        }
        if (!res.families.empty()) break;
    }
    if (res.families.empty()) throw NoBifurcatingSolution();

    // a broken-symmetry child and its image under the other reversor form a pair;
    // complete a pair when only one member converged
    if (k > 1) {
        for (Symmetry sy : {Symmetry::R1only, Symmetry::R2only}) {
            int n = 0, at = -1;
            for (std::size_t i = 0; i < res.families.size(); ++i)
                if (res.families[i].symmetry == sy) ++n, at = int(i);
            if (n != 1) continue;
            SwitchedFamily img = res.families[at];
            img.first = apply_reversor(img.first, sy == Symmetry::R1only ? 2 : 1);
            img.origin += " image";
            res.families.push_back(std::move(img));
        }
    }

    for (SwitchedFamily& fam : res.families) {
        OrbitSolution last = fam.first;
        if (opt.follow_steps > 0) {
            StepControl ctl = opt.ctl;
            ctl.max_steps = opt.follow_steps;
            const double sc = bp.family == FamilyKind::Beta2Family ? fam.first.params.beta2 : fam.first.energy;
            ctl.direction = sc >= parent_scalar ? 1 : -1;
            try {
                fam.branch = extend_branch(fam.first, bp.family, ctl);
                last = fam.branch.orbit_at(int(fam.branch.points.size()) - 1);
            } catch (const Error&) {
            }
        }
        fam.stability = floquet(last).orbit_class;
        fam.distance_from_parent = hausdorff(last, parent, 1000);
        fam.last = last;
    }

    // a transcritical crossing: the two sides are one family
    if (k >= 3 && k <= 4 && res.families.size() == 2 && res.families[0].symmetry == Symmetry::Rstar &&
        res.families[1].symmetry == Symmetry::Rstar) {
        auto side = [&](const OrbitSolution& o) {
            return (bp.family == FamilyKind::Beta2Family ? o.params.beta2 : o.energy) - parent_scalar;
        };
        if (side(res.families[0].first) * side(res.families[1].first) < 0.0) res.families.pop_back();
    }

    bool any_star = false, any_broken = false;
    for (const SwitchedFamily& f : res.families) {
        any_star |= f.symmetry == Symmetry::Rstar;
        any_broken |= f.symmetry == Symmetry::R1only || f.symmetry == Symmetry::R2only;
    }
    if (k == 1) res.kind = BifKind::SB;
    else if (any_star) res.kind = k <= 4 ? BifKind::Tk : BifKind::Bk;
    else if (any_broken) res.kind = BifKind::BkHat;
    const std::size_t limit = res.kind == BifKind::BkHat ? 4 : res.kind == BifKind::Tk ? 1 : 2;
    res.wrong_multiplicity = res.families.size() > limit;
    return res;
}

}  // namespace

SwitchResult switch_branch_sb(const BifurcationPoint& sb, const SwitchOptions& opt) {
    SwitchResult r = switch_core(sb, 1, 0, opt);
    // keep one symmetry-broken family and add its R2 image
    std::vector<SwitchedFamily> keep;
    for (SwitchedFamily& f : r.families)
        if (f.symmetry == Symmetry::R1only || f.symmetry == Symmetry::R2only) {
            keep.push_back(std::move(f));
            break;
        }
    if (keep.empty()) throw NoBifurcatingSolution();
    SwitchedFamily img = keep.front();
    img.first = apply_reversor(keep.front().first, 2);
    img.last = apply_reversor(keep.front().last, 2);
    img.origin = "R2 image";
    if (!keep.front().branch.points.empty()) {
        Branch b = keep.front().branch;
        for (Snapshot& s : b.snapshots) s.orbit = apply_reversor(s.orbit, 2), s.tangent.resize(0);
        for (BifurcationPoint& e : b.events) e.orbit = apply_reversor(e.orbit, 2);
        img.branch = std::move(b);
    }
    keep.push_back(std::move(img));
    r.families = std::move(keep);
    r.wrong_multiplicity = false;
    return r;
}

SwitchResult switch_branch_periodk(const BifurcationPoint& res, int k, int p, const SwitchOptions& opt) {
    if (k < 2) throw std::invalid_argument("period-k switching needs k >= 2");
    return switch_core(res, k, p, opt);
}

// ---------------------------------------------------------------------------

double bif_condition(const OrbitSolution& orbit, BifKind kind, int k, int p) {
    const FloquetData fd = floquet(orbit);
    if (kind == BifKind::PD) return fd.trace + 2.0;
    if (k <= 1 || kind == BifKind::SB || kind == BifKind::SN) return fd.trace - 2.0;
    if (!fd.rotation_number) return std::numeric_limits<double>::quiet_NaN();
    double d = *fd.rotation_number - double(p) / k;
    return d - std::round(d);
}

BifKind degenerate_kind(BifKind kind) {
    switch (kind) {
        case BifKind::SB: return BifKind::CSB;
        case BifKind::SN: return BifKind::CSN;
        case BifKind::Tk: return BifKind::CTk;
        case BifKind::Bk: return BifKind::CBk;
        case BifKind::BkHat: return BifKind::CBkHat;
        default: return BifKind::Fold;
    }
}

namespace {

class CurveSolver {
public:
    CurveSolver(const BifurcationPoint& seed)
        : kind_(seed.kind), k_(seed.k.value_or(1)), p_(seed.p.value_or(0)), warm_(seed.orbit) {
        half_ = seed.orbit.symmetry == Symmetry::Rstar;
        no_.tol = 1e-10;
        no_.max_iter = 10;
    }

    double sigma_of(const OrbitSolution& o) const { return o.energy; }

    bool solve(double b, double s, OrbitSolution& out, double& G) {
        OrbitSolution init = warm_;
        init.params.beta2 = b;
        BvpSpec spec;
        spec.constraints = {Constraint::energy(s)};
        spec.enforce_half_shift = half_ && init.mesh.half_shift_compatible();
        try {
            out = newton_solve(init, spec, no_);
        } catch (const Error&) {
            return false;
        }
        if (std::abs(out.eps) > 1e-8) return false;
        out.symmetry = warm_.symmetry;
        G = bif_condition(out, kind_, k_, p_);
        return std::isfinite(G);
    }

    bool gradient(double b, double s, Eigen::Vector2d& g) {
        const double hb = 1e-6, hs = 1e-6 * std::max(1.0, std::abs(s));
        OrbitSolution o;
        double gp, gm, sp, sm;
        if (!solve(b + hb, s, o, gp) || !solve(b - hb, s, o, gm)) return false;
        if (!solve(b, s + hs, o, sp) || !solve(b, s - hs, o, sm)) return false;
        g = {(gp - gm) / (2 * hb), (sp - sm) / (2 * hs)};
        return true;
    }

    // Corrector on the line t . (y - yp) = 0.
    bool correct(Eigen::Vector2d y, const Eigen::Vector2d& yp, const Eigen::Vector2d& t, Eigen::Vector2d& yout,
                 OrbitSolution& orbit, double tol) {
        Eigen::Vector2d g;
        if (!gradient(y[0], y[1], g)) return false;
        for (int it = 0; it < 10; ++it) {
            double G;
            if (!solve(y[0], y[1], orbit, G)) return false;
            if (std::abs(G) <= tol && it > 0) {
                yout = y;
                return true;
            }
            Eigen::Matrix2d A;
            A << g[0], g[1], t[0], t[1];
            const Eigen::Vector2d r(G, t.dot(y - yp));
            const Eigen::Vector2d dy = A.partialPivLu().solve(-r);
            if (!dy.allFinite()) return false;
            y += dy;
            if (std::abs(G) <= tol && dy.norm() < 1e-12) {
                yout = y;
                return solve(y[0], y[1], orbit, G);
            }
            if (it == 4 && !gradient(y[0], y[1], g)) return false;
        }
        return false;
    }

    // beta2 with G(beta2, s) = 0 near b0.
    bool solve_beta2(double b0, double s, double& b, OrbitSolution& orbit, double tol) {
        b = b0;
        double G, Gp;
        const double h = 1e-6;
        for (int it = 0; it < 20; ++it) {
            if (!solve(b, s, orbit, G)) return false;
            if (std::abs(G) <= tol) return true;
            OrbitSolution tmp;
            if (!solve(b + h, s, tmp, Gp)) return false;
            const double d = (Gp - G) / h;
            if (d == 0.0) return false;
            const double db = -G / d;
            b += db;
            // the trace is only known to a few ulps of the monodromy; stop on a negligible step
            if (std::abs(db) < 1e-11 * (1.0 + std::abs(b)) && std::abs(G) < 1e-6) return solve(b, s, orbit, G);
        }
        return false;
    }

    void set_warm(const OrbitSolution& o) { warm_ = o; }

    void maybe_remesh() {
        BvpSpec spec;
        spec.constraints = {Constraint::energy(warm_.energy)};
        spec.enforce_half_shift = half_ && warm_.mesh.half_shift_compatible();
        OrbitSolution r = remesh(warm_, spec, no_);
        if (!r.remesh_failed) {
            r.symmetry = warm_.symmetry;
            warm_ = r;
        }
    }

private:
    BifKind kind_;
    int k_, p_;
    bool half_ = false;
    OrbitSolution warm_;
    NewtonOptions no_;
};

BifurcationPoint make_point(const OrbitSolution& o, BifKind kind, const BifurcationPoint& seed) {
    BifurcationPoint bp;
    bp.kind = kind;
    bp.beta2 = o.params.beta2;
    bp.energy = o.energy;
    bp.k = seed.k;
    bp.p = seed.p;
    bp.orbit = o;
    bp.floquet = floquet(o);
    bp.family = seed.family;
    bp.label = to_string(kind);
    return bp;
}


// Saddle-node points are folds of the orbit surface over beta2, so G = 0 cannot be solved for
// beta2 at fixed energy. Each curve point is the beta2-extremum of the family at fixed H.
class FoldTracker {
public:
    explicit FoldTracker(const OrbitSolution& seed) : warm_(seed) {
        half_ = seed.symmetry == Symmetry::Rstar;
        side_ = exists(seed, seed.params.beta2 - 1e-5) ? -1 : 1;
    }

    // side on which the two merging orbits exist: -1 below the fold in beta2
    int side() const { return side_; }

    bool fold_at(double H, double bguess, OrbitSolution& out) {
        OrbitSolution start;
        bool ok = false;
        for (double delta : {4e-4, 1.5e-3, 5e-3}) {
            OrbitSolution init = warm_;
            init.params.beta2 = bguess + side_ * delta;
            if (solve_energy(init, H, start)) {
                ok = true;
                break;
            }
        }
        if (!ok) return false;
        StepControl c;
        c.floquet = false;
        c.sections = false;
        c.ds_init = 2e-3;
        c.ds_max = 2e-2;
        c.max_steps = 80;
        c.direction = -side_;
        c.symmetric = half_;
        c.snapshot_every = 1;
        const double b_start = start.params.beta2;
        double extreme = b_start;
        c.stop = [&](const OrbitSolution& o) {
            const double b = o.params.beta2;
            if (side_ * (b - extreme) < 0) extreme = b;
            return side_ * (b - extreme) > 0.5 * std::abs(b_start - extreme) + 1e-5;
        };
        Branch br;
        try {
            br = extend_branch(start, FamilyKind::Beta2Family, c);
        } catch (const Error&) {
            return false;
        }
        const auto folds = fold_points(br);
        if (folds.empty()) return false;
        out = folds.front();
        for (const auto& f : folds)
            if (std::abs(f.params.beta2 - bguess) < std::abs(out.params.beta2 - bguess)) out = f;
        out.symmetry = warm_.symmetry;
        warm_ = out;
        return true;
    }

private:
    bool solve_energy(const OrbitSolution& init, double H, OrbitSolution& out) const {
        BvpSpec spec;
        spec.constraints = {Constraint::energy(H)};
        spec.enforce_half_shift = half_ && init.mesh.half_shift_compatible();
        try {
            out = newton_solve(init, spec);
        } catch (const Error&) {
            return false;
        }
        out.symmetry = warm_.symmetry;
        return std::abs(out.eps) < 1e-8;
    }

    bool exists(const OrbitSolution& o, double b) const {
        OrbitSolution init = o, tmp;
        init.params.beta2 = b;
        return solve_energy(init, o.energy, tmp);
    }

    OrbitSolution warm_;
    bool half_ = false;
    int side_ = 1;
};

BifCurve trace_fold_curve(const BifurcationPoint& seed, double beta2_lo, double beta2_hi, const BifCurveOptions& opt) {
    BifCurve curve;
    curve.kind = seed.kind;
    curve.k = 1;
    FoldTracker ft(seed.orbit);
    OrbitSolution o;
    if (!ft.fold_at(seed.orbit.energy, seed.orbit.params.beta2, o)) throw SeedNotOnCurve();
    curve.points.push_back(make_point(o, seed.kind, seed));
    if (std::abs(o.energy) < 1e-9) {
        curve.zero_crossings.push_back(o.params.beta2);
        curve.zero_points.push_back(curve.points.back());
    }
    std::vector<double> hs{o.energy}, bs{o.params.beta2};
    double dH = opt.direction * opt.ds_max;
    int after_fold = -1;
    for (int step = 0; step < opt.max_steps; ++step) {
        const int n = int(hs.size());
        double H = hs.back() + dH;
        double bg = bs.back();
        if (n >= 2) bg += (bs[n - 1] - bs[n - 2]) / (hs[n - 1] - hs[n - 2]) * dH;
        OrbitSolution on;
        if (!ft.fold_at(H, bg, on)) {
            dH *= 0.5;
            if (std::abs(dH) < opt.ds_min) {
                curve.stop_reason = "StallAtMinStep";
                return curve;
            }
            continue;
        }
        const double Hprev = hs.back();
        curve.points.push_back(make_point(on, seed.kind, seed));
        hs.push_back(on.energy);
        bs.push_back(on.params.beta2);
        const int m = int(hs.size());

        // extremum of beta2 along the curve
        if (m >= 3 && (bs[m - 2] - bs[m - 3]) * (bs[m - 1] - bs[m - 2]) < 0) {
            double a0 = hs[m - 3], a1 = hs[m - 2], a2 = hs[m - 1];
            double f0 = bs[m - 3], f1 = bs[m - 2], f2 = bs[m - 1];
            OrbitSolution of;
            for (int it = 0; it < 4; ++it) {
                const double d1 = (f1 - f0) / (a1 - a0), d2 = (f2 - f1) / (a2 - a1);
                const double c2 = (d2 - d1) / (a2 - a0);
                if (c2 == 0.0) break;
                const double hstar = 0.5 * (a0 + a1) - d1 / (2.0 * c2);
                const double bguess = f0 + d1 * (hstar - a0) + c2 * (hstar - a0) * (hstar - a1);
                OrbitSolution t;
                if (!ft.fold_at(hstar, bguess, t)) break;
                of = t;
                // replace the farthest of the three
                double* fa = &a0;
                double* ff = &f0;
                if (std::abs(a1 - hstar) > std::abs(*fa - hstar)) fa = &a1, ff = &f1;
                if (std::abs(a2 - hstar) > std::abs(*fa - hstar)) fa = &a2, ff = &f2;
                *fa = t.energy;
                *ff = t.params.beta2;
                if (std::max({a0, a1, a2}) - std::min({a0, a1, a2}) < 1e-7) break;
            }
            if (of.mesh.ntst > 0) {
                curve.folds.push_back(make_point(of, degenerate_kind(seed.kind), seed));
                if (after_fold < 0) after_fold = 0;
            }
        }
        // H = 0 crossing, secant in H on the fold position
        if (std::abs(Hprev) > 1e-9 && (Hprev > 0) != (on.energy > 0)) {
            OrbitSolution oz;
            const double lam = Hprev / (Hprev - on.energy);
            if (ft.fold_at(0.0, bs[m - 2] + lam * (bs[m - 1] - bs[m - 2]), oz)) {
                curve.zero_crossings.push_back(oz.params.beta2);
                curve.zero_points.push_back(make_point(oz, seed.kind, seed));
            }
            ft.fold_at(on.energy, on.params.beta2, oz);
        }
        if (after_fold >= 0 && opt.points_after_fold >= 0 && ++after_fold > opt.points_after_fold) {
            curve.stop_reason = "fold";
            return curve;
        }
        if (on.params.beta2 < beta2_lo || on.params.beta2 > beta2_hi) {
            curve.stop_reason = "parameter window";
            return curve;
        }
        if (on.energy < opt.H_min || on.energy > opt.H_max) {
            curve.stop_reason = "energy window";
            return curve;
        }
    }
    curve.stop_reason = "max_steps";
    return curve;
}

}  // namespace

BifCurve continue_bif_point(const BifurcationPoint& seed, double beta2_lo, double beta2_hi, const BifCurveOptions& opt) {
    if (!(beta2_lo < beta2_hi)) throw std::invalid_argument("beta2 window");
    BifCurve curve;
    curve.kind = seed.kind;
    curve.k = seed.k.value_or(1);
    curve.p = seed.p.value_or(0);
    if (seed.kind == BifKind::SN) return trace_fold_curve(seed, beta2_lo, beta2_hi, opt);
    CurveSolver cs(seed);

    // seed on the curve
    OrbitSolution o;
    double b0;
    {
        double G;
        if (!cs.solve(seed.orbit.params.beta2, cs.sigma_of(seed.orbit), o, G) || std::abs(G) > 1e-5)
            throw SeedNotOnCurve();
        cs.set_warm(o);
        if (!cs.solve_beta2(seed.orbit.params.beta2, cs.sigma_of(seed.orbit), b0, o, opt.tol)) throw SeedNotOnCurve();
        cs.set_warm(o);
    }
    Eigen::Vector2d y(o.params.beta2, cs.sigma_of(o));
    curve.points.push_back(make_point(o, seed.kind, seed));
    if (std::abs(o.energy) < 1e-9) {
        curve.zero_crossings.push_back(o.params.beta2);
        curve.zero_points.push_back(curve.points.back());
    }

    Eigen::Vector2d g;
    if (!cs.gradient(y[0], y[1], g)) throw SeedNotOnCurve();
    Eigen::Vector2d t(-g[1], g[0]);
    t.normalize();
    if (t[1] * opt.direction < 0) t = -t;

    std::vector<Eigen::Vector2d> ys{y}, ts{t};
    double ds = opt.ds_init;
    int successes = 0, after_fold = -1;
    for (int step = 0; step < opt.max_steps; ++step) {
        const Eigen::Vector2d yp = y + ds * t;
        Eigen::Vector2d yn;
        OrbitSolution on;
        if (!cs.correct(yp, yp, t, yn, on, opt.tol)) {
            ds *= 0.5;
            successes = 0;
            if (ds < opt.ds_min) {
                curve.stop_reason = "StallAtMinStep";
                return curve;
            }
            continue;
        }
        Eigen::Vector2d gn;
        cs.set_warm(on);
        if (!cs.gradient(yn[0], yn[1], gn)) {
            ds *= 0.5;
            if (ds < opt.ds_min) {
                curve.stop_reason = "StallAtMinStep";
                return curve;
            }
            continue;
        }
        Eigen::Vector2d tn(-gn[1], gn[0]);
        tn.normalize();
        if (tn.dot(t) < 0) tn = -tn;

        const double Hprev = curve.points.back().energy;
        curve.points.push_back(make_point(on, seed.kind, seed));
        ys.push_back(yn);
        ts.push_back(tn);
        const int n = int(ys.size());

        // fold in beta2: the curve tangent's beta2 component changes sign
        if (n >= 3 && (t[0] > 0) != (tn[0] > 0)) {
            Eigen::Vector2d a = ys[n - 3], b = ys[n - 2], c = ys[n - 1];
            double s_star = b[1], b_star = b[0];
            OrbitSolution of;
            for (int it = 0; it < 4; ++it) {
                // beta2 as a parabola in the curve parameter through three points
                const double x0 = a[1], x1 = b[1], x2 = c[1];
                const double d1 = (b[0] - a[0]) / (x1 - x0), d2 = (c[0] - b[0]) / (x2 - x1);
                const double c2 = (d2 - d1) / (x2 - x0);
                if (c2 == 0.0) break;
                s_star = 0.5 * (x0 + x1) - d1 / (2.0 * c2);
                const double bguess = a[0] + d1 * (s_star - x0) + c2 * (s_star - x0) * (s_star - x1);
                if (!cs.solve_beta2(bguess, s_star, b_star, of, opt.tol)) break;
                // replace the point farthest from the estimate
                Eigen::Vector2d ne(b_star, s_star);
                Eigen::Vector2d* far = &a;
                for (Eigen::Vector2d* q : {&a, &b, &c})
                    if (std::abs((*q)[1] - s_star) > std::abs((*far)[1] - s_star)) far = q;
                *far = ne;
                if (std::abs(x0 - x2) < 1e-9) break;
            }
            if (of.mesh.ntst > 0) {
                BifurcationPoint fp = make_point(of, degenerate_kind(seed.kind), seed);
                curve.folds.push_back(fp);
                if (after_fold < 0) after_fold = 0;
            }
            cs.set_warm(on);
        }
        // H = 0 crossing
        if (std::abs(Hprev) > 1e-9 && (Hprev > 0) != (on.energy > 0)) {
            double bz;
            OrbitSolution oz;
            const double lam = Hprev / (Hprev - on.energy);
            const bool ok = cs.solve_beta2(ys[n - 2][0] + lam * (yn[0] - ys[n - 2][0]), 0.0, bz, oz, opt.tol);
            if (ok) {
                curve.zero_crossings.push_back(oz.params.beta2);
                curve.zero_points.push_back(make_point(oz, seed.kind, seed));
            }
            cs.set_warm(on);
        }
        y = yn;
        t = tn;
        if (step % 10 == 9) cs.maybe_remesh();

        if (after_fold >= 0 && opt.points_after_fold >= 0 && ++after_fold > opt.points_after_fold) {
            curve.stop_reason = "fold";
            return curve;
        }
        if (y[0] < beta2_lo || y[0] > beta2_hi) {
            curve.stop_reason = "parameter window";
            return curve;
        }
        if (on.energy < opt.H_min || on.energy > opt.H_max) {
            curve.stop_reason = "energy window";
            return curve;
        }
        if (++successes >= 3) ds = std::min(ds * 1.3, opt.ds_max), successes = 0;
    }
    curve.stop_reason = "max_steps";
    return curve;
}

}  // namespace gnls
