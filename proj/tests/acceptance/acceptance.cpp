#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gnls/branching.hpp"
#include "gnls/drivers.hpp"
#include "gnls/errors.hpp"
#include "gnls/floquet.hpp"
#include "gnls/rotation.hpp"
#include "gnls/sections.hpp"
#include "gnls/seed.hpp"

using namespace gnls;

namespace {

struct Report {
    std::ostringstream notes;
    bool ok = true;
    std::vector<std::string> failed;
    void check(bool cond, const std::string& what) {
        notes << (cond ? "  ok   " : "  FAIL ") << what << "\n";
        ok = ok && cond;
        if (!cond) failed.push_back(what);
    }
    void near(double got, double want, double tol, const std::string& what) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s = %.9g (want %.9g, tol %.1e)", what.c_str(), got, want, tol);
        check(std::abs(got - want) <= tol, buf);
    }
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

const OrbitSolution& gamma_star() {
    static const OrbitSolution o = seed_rstar_orbit(Params{}, 1.0261, -3.4592, 0.0);
    return o;
}

// S* energy family at beta2 = 0.4 with the zero-energy events, up to T = 20
const Branch& s_star() {
    static const Branch b = [] {
        StepControl c;
        c.T_max = 20.0;
        c.events = {monitor_energy(0.0)};
        return extend_branch(gamma_star(), FamilyKind::EnergyFamily, c);
    }();
    return b;
}

double extreme_H(const Branch& br, bool maximum) {
    double best = maximum ? -1e300 : 1e300;
    for (const BranchPoint& p : br.points) best = maximum ? std::max(best, p.H) : std::min(best, p.H);
    for (const OrbitSolution& f : fold_points(br)) best = maximum ? std::max(best, f.energy) : std::min(best, f.energy);
    return best;
}

Branch s1_plus(double T_max) {
    State4 ep = State4::Zero();
    for (const State4& e : equilibria(Params{}))
        if (e[0] > 0.1) ep = e;
    StepControl c;
    c.direction = -1;
    c.T_max = T_max;
    c.events = {monitor_energy(0.0)};
    return extend_branch(seed_lyapunov_orbit(ep, Params{}, 1e-3), FamilyKind::EnergyFamily, c);
}

void criterion1(Report& r) {
    Params p;
    p.beta2 = 0.4;
    const SpectrumKind below = classify_origin(p).kind;
    double lo = 0.4, hi = 1.2;
    while (hi - lo > 1e-14) {
        p.beta2 = 0.5 * (lo + hi);
        (classify_origin(p).kind == below ? lo : hi) = p.beta2;
    }
    r.near(0.5 * (lo + hi), std::sqrt(2.0 / 3.0), 1e-9, "origin spectrum boundary");
}

void criterion2(Report& r) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> d(-3.0, 3.0), b(-1.5, 1.5);
    double rev = 0.0, ham = 0.0, div = 0.0;
    for (int i = 0; i < 20000; ++i) {
        Params p;
        p.beta2 = b(rng);
        const State4 u(d(rng), d(rng), d(rng), d(rng));
        const State4 f = vector_field(u, p);
        const double s = 1.0 + f.norm();
        rev = std::max(rev, (vector_field(apply_R1(u), p) + apply_R1(f)).norm() / s);
        rev = std::max(rev, (vector_field(apply_R2(u), p) + apply_R2(f)).norm() / s);
        ham = std::max(ham, std::abs(grad_H(u, p).dot(f)) / (s * (1.0 + grad_H(u, p).norm())));
        div = std::max(div, std::abs(jacobian(u, p).trace()));
    }
    r.check(rev <= 1e-10, "reversibility defect " + fmt(rev) + " on 20000 points");
    r.check(ham <= 1e-10, "<grad H, f> " + fmt(ham));
    r.check(div <= 1e-10, "tr Df " + fmt(div));
}

void criterion3(Report& r) {
    r.near(extreme_H(s_star(), true), 3.3, 0.1, "max H on S*");
    const Branch s1 = s1_plus(20.0);
    r.near(extreme_H(s1, false), -7.4, 0.1, "min H on S1+");
    if (s1.events.empty()) {
        r.check(false, "no zero-energy orbit on S1+");
        return;
    }
    const OrbitSolution g1 = s1.events.front().orbit;
    BvpSpec spec;
    spec.constraints = {Constraint::energy(0.0)};
    const OrbitSolution g1m = newton_solve(apply_reversor(g1, 2), spec);
    r.check(g1m.iterations <= 2, "R2 image of Gamma1+ re-converges in " + std::to_string(g1m.iterations) + " Newton steps");
    r.check(classify_symmetry(g1m) == Symmetry::R1only, "image is R1-symmetric");
}

void criterion4(Report& r) {
    const Branch& br = s_star();
    std::vector<int> loops;
    std::vector<OrbitSolution> zeros;
    for (std::size_t i = 0; i < br.points.size() && loops.size() < 5; ++i) {
        if (br.points[i].event < 0) continue;
        const OrbitSolution o = br.orbit_at(int(i));
        int l = -1;
        try {
            l = count_loops(o);
        } catch (const DegenerateProjection&) {
            for (int j = int(i) - 1; j >= 0 && l < 0; --j) l = br.points[j].event < 0 ? br.points[j].loops : -1;
        }
        loops.push_back(l);
        zeros.push_back(o);
    }
    std::string ls;
    for (int l : loops) ls += std::to_string(l) + " ";
    r.check(loops == std::vector<int>{1, 1, 3, 3, 5}, "loop counts of the first five zero-energy orbits: " + ls);
    if (zeros.size() >= 2) {
        int quad = 0, off = 0;
        for (const SigmaPoint& s : sigma_intersections(zeros[1]))
            if (s.contact == Contact::QuadraticTangency) ++quad, off += !s.on_sigma1;
        r.check(quad == 2 && off == 2, "second zero-energy orbit: " + std::to_string(quad) + " quadratic tangencies, " +
                                           std::to_string(off) + " off Sigma1");
    }

    // first change of the Sigma count along S1+ and the contact that causes it
    Branch s1 = s1_plus(6.5);
    int prev = -1, at = -1;
    for (int i = 0; i < int(s1.points.size()); ++i) {
        if (s1.points[i].event >= 0) continue;
        const int n = int(s1.points[i].sigma.size());
        if (prev >= 0 && n != prev) {
            at = i;
            break;
        }
        prev = n;
    }
    if (at < 0) {
        r.check(false, "no tangency on S1+ up to T = 6.5");
        return;
    }
    int before = at - 1;
    while (before > 0 && s1.points[before].event >= 0) --before;
    const std::vector<SigmaPoint> sp = sigma_intersections(s1.orbit_at(before));
    const SigmaPoint* near = nullptr;
    for (const SigmaPoint& s : sp)
        if (s.on_sigma1 && (!near || std::abs(s.state[2]) < std::abs(near->state[2]))) near = &s;
    if (!near) {
        r.check(false, "no Sigma1 point before the tangency");
        return;
    }
    const OrbitSolution tg = locate_event(s1, monitor_tangency(near->state, Contact::CubicTangency), before);
    bool cubic_on = false;
    for (const SigmaPoint& s : sigma_intersections(tg)) cubic_on |= s.contact == Contact::CubicTangency && s.on_sigma1;
    r.check(cubic_on, "first tangency on S1+ (T = " + fmt(tg.period) + ", H = " + fmt(tg.energy) + ") is cubic on Sigma1");
}

void criterion5(Report& r) {
    BifurcationSpec s;
    s.kind = "SB";
    s.beta2_hi = 0.605;
    const BifurcationPoint sb = find_bifurcation_seed(Params{}, s);
    r.near(sb.beta2, 0.60064, 2e-3, "SB on the zero-energy R* family");
    s.kind = "PD";
    s.beta2_lo = 0.55;
    const BifurcationPoint pd = find_bifurcation_seed(Params{}, s);
    r.near(pd.beta2, 0.58373, 2e-3, "PD on the zero-energy R1 family");
    for (const BifurcationPoint* b : {&sb, &pd}) {
        std::complex<double> prod = 1.0;
        for (const auto& z : b->floquet.multipliers) prod *= z;
        r.check(std::abs(prod - 1.0) <= 1e-6, "multiplier product at " + std::string(to_string(b->kind)) + " differs from 1 by " +
                                                   fmt(std::abs(prod - 1.0)));
    }
}

void criterion6(Report& r) {
    auto curve = [](const BifurcationSpec& s, const BifCurveOptions& o) {
        return continue_bif_point(find_bifurcation_seed(Params{}, s), s.beta2_lo, s.beta2_hi, o);
    };
    auto fold_check = [&](const BifCurve& c, const char* name, double b, double H) {
        if (c.folds.empty()) {
            r.check(false, std::string(name) + ": no fold (" + c.stop_reason + ")");
            return;
        }
        r.near(c.folds.front().beta2, b, 2e-3, std::string(name) + " beta2");
        r.near(c.folds.front().energy, H, 5e-3, std::string(name) + " H");
    };
    auto zero_check = [&](const BifCurve& c, const char* name, double b) {
        double best = std::numeric_limits<double>::quiet_NaN();
        for (double z : c.zero_crossings)
            if (!(std::abs(best - b) <= std::abs(z - b))) best = z;
        r.near(best, b, 2e-3, std::string(name) + " zero crossing");
    };
    BifurcationSpec s;
    BifCurveOptions o;
    s.kind = "SB";
    s.beta2_hi = 0.605;
    fold_check(curve(s, o), "CSB", 0.60052, 0.1652);
    s.kind = "T";
    s.k = 3;
    s.p = 1;
    s.beta2_hi = 0.65;
    const BifCurve t3 = curve(s, o);
    fold_check(t3, "CT3", 0.6397, 0.1245);
    s.kind = "B";
    s.k = 5;
    s.p = 3;
    s.beta2_hi = 0.73;
    const BifCurve b5 = curve(s, o);
    fold_check(b5, "CB5", 0.720485, 0.057063);
    zero_check(b5, "B5", 0.720559);
    s.kind = "SN";
    s.beta2_lo = 0.6;
    s.beta2_hi = 0.7;
    BifCurveOptions so;
    so.ds_max = 0.01;
    so.H_min = -0.3;
    so.H_max = 0.5;
    so.points_after_fold = 3;
    const BifCurve sn = curve(s, so);
    if (sn.folds.empty()) r.check(false, "CSN: no extremum (" + sn.stop_reason + ")");
    else r.near(sn.folds.front().beta2, 0.648969, 2e-3, "CSN beta2");
    zero_check(sn, "SN", 0.649089);
}

void criterion7(Report& r) {
    RunConfig cfg;
    cfg.k_max = 13;
    cfg.table1.curves = false;
    const Table1Result t = compute_table1(cfg);
    struct Want {
        const char* label;
        double beta2;
        int p, k;
    };
    const std::vector<Want> want = {{"SB", 0.60064, 0, 1},       {"T3", 0.639829, 1, 3},     {"B5", 0.720559, 3, 5},
                                    {"B7", 0.760154, 5, 7},      {"B9", 0.780195, 7, 9},     {"B11", 0.791361, 9, 11},
                                    {"B13", 0.798140, 11, 13},   {"BHAT2", 0.68667, 1, 2},   {"BHAT3", 0.743907, 2, 3},
                                    {"BHAT4", 0.771728, 3, 4},   {"BHAT5", 0.786516, 4, 5},  {"BHAT6", 0.795141, 5, 6},
                                    {"BHAT7", 0.800559, 6, 7}};
    int matched = 0;
    for (const Want& w : want) {
        const Table1Row* row = nullptr;
        for (const Table1Row& x : t.rows)
            if (x.predicted == w.label) row = &x;
        if (!row) {
            r.check(false, std::string(w.label) + " missing");
            continue;
        }
        const bool ok = std::abs(row->beta2_crossing - w.beta2) <= 2e-3 && row->p == w.p && row->k == w.k &&
                        row->label == w.label && row->error.empty();
        matched += ok;
        r.check(ok, std::string(w.label) + " beta2 = " + fmt(row->beta2_crossing) + " (" + fmt(w.beta2) + "), alpha = " +
                        std::to_string(row->p) + "/" + std::to_string(row->k) + ", classified " + row->label);
    }
    int pattern = 0;
    for (const Table1Row& x : t.rows) pattern += x.pattern_ok;
    r.check(pattern == int(t.rows.size()), "rotation-number pattern holds on " + std::to_string(pattern) + " of " +
                                               std::to_string(t.rows.size()) + " computed rows");
    r.check(t.interleaving_ok, "B and BHAT sequences interleave monotonically");
    r.check(matched == 13, std::to_string(matched) + " of 13 table values reproduced (" + fmt(t.seconds) + " s)");
}

void criterion8(Report& r) {
    // primitive S* orbits stop near T = 42 (the family snakes into a homoclinic limit); longer
    // periods are covered by k-fold covers of those orbits
    StepControl c;
    c.T_max = 40.0;
    c.floquet = false;
    c.sections = false;
    c.snapshot_every = 1;
    const Branch br = extend_branch(gamma_star(), FamilyKind::EnergyFamily, c);
    auto nearest = [&](double T) {
        int best = -1;
        for (int i = 0; i < int(br.points.size()); ++i)
            if (br.points[i].event < 0 && (best < 0 || std::abs(br.points[i].T - T) < std::abs(br.points[best].T - T)))
                best = i;
        return best;
    };
    std::vector<OrbitSolution> orbits;
    for (int q = 0; q < 12; ++q) orbits.push_back(br.orbit_at(nearest(5.0 * std::pow(8.0, q / 11.0))));
    for (int q = 0; q < 8; ++q) {
        const double target = 45.0 * std::pow(150.0 / 45.0, q / 7.0);
        const int k = int(std::ceil(target / 38.0));
        orbits.push_back(k_cover(br.orbit_at(nearest(target / k)), k, false));
    }
    double worst = 0.0, tmin = 1e9, tmax = 0.0;
    for (const OrbitSolution& o : orbits) {
        const Mat4 a = monodromy_collocation(o), b = monodromy(o);
        worst = std::max(worst, (a - b).norm() / b.norm());
        tmin = std::min(tmin, o.period);
        tmax = std::max(tmax, o.period);
    }
    r.check(orbits.size() == 20, std::to_string(orbits.size()) + " orbits with T in [" + fmt(tmin) + ", " + fmt(tmax) + "]");
    r.check(tmin <= 5.5 && tmax >= 140.0, "period range covers [5, 150]");
    r.check(worst <= 1e-5, "collocation vs variational monodromy, worst relative difference " + fmt(worst));

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> d(-2.0, 2.0), b(-1.5, 1.5);
    double jerr = 0.0, gerr = 0.0;
    const double h = 1e-6;
    for (int i = 0; i < 1000; ++i) {
        Params p;
        p.beta2 = b(rng);
        const State4 u(d(rng), d(rng), d(rng), d(rng));
        const Mat4 J = jacobian(u, p);
        const State4 g = grad_H(u, p);
        for (int j = 0; j < 4; ++j) {
            State4 e = State4::Zero();
            e[j] = h;
            const State4 col = (vector_field(u + e, p) - vector_field(u - e, p)) / (2 * h);
            jerr = std::max(jerr, (col - J.col(j)).cwiseAbs().maxCoeff() / (1 + J.col(j).norm()));
            gerr = std::max(gerr, std::abs((hamiltonian(u + e, p) - hamiltonian(u - e, p)) / (2 * h) - g[j]) / (1 + std::abs(g[j])));
        }
    }
    r.check(jerr <= 1e-6, "Jacobian vs finite differences on 1000 points: " + fmt(jerr));
    r.check(gerr <= 1e-6, "grad H vs finite differences on 1000 points: " + fmt(gerr));
}

void criterion9(Report& r) {
    SwitchOptions so;
    so.follow_steps = 12;
    auto distances = [&](const SwitchResult& s, const char* name) {
        for (const SwitchedFamily& f : s.families)
            r.check(f.distance_from_parent >= 1e-3, std::string(name) + " child (" + to_string(f.symmetry) + ", " +
                                                        to_string(f.stability) + ") at distance " + fmt(f.distance_from_parent));
    };
    {
        Params p;
        p.beta2 = 0.61;
        const OrbitSolution g = gamma_star_at(p, 0.0);
        StepControl e;
        e.sections = false;
        e.direction = -1;
        e.H_min = -10.0;
        e.events = {monitor_trace(2.0, BifKind::SB)};
        const Branch eb = extend_branch(g, FamilyKind::EnergyFamily, e);
        if (eb.events.empty()) {
            r.check(false, "no SB point on the beta2 = 0.61 energy family");
        } else {
            const SwitchResult s = switch_branch_sb(eb.events.front(), so);
            bool r1 = s.families.size() == 2;
            for (const SwitchedFamily& f : s.families) r1 = r1 && f.symmetry == Symmetry::R1only;
            r.check(r1, "SB-l (H = " + fmt(eb.events.front().energy) + "): two R1-only families");
            distances(s, "SB-l");
        }
    }
    auto periodk = [&](const char* kind, int k, int p, double hi) {
        BifurcationSpec s;
        s.kind = kind;
        s.k = k;
        s.p = p;
        s.beta2_hi = hi;
        return switch_branch_periodk(find_bifurcation_seed(Params{}, s), k, p, so);
    };
    {
        const SwitchResult s = periodk("B", 5, 3, 0.73);
        int star = 0, ell = 0, hyp = 0;
        for (const SwitchedFamily& f : s.families) {
            star += f.symmetry == Symmetry::Rstar;
            ell += f.stability == OrbitClass::Elliptic;
            hyp += f.stability == OrbitClass::HyperbolicOrientable || f.stability == OrbitClass::HyperbolicNonOrientable;
        }
        r.check(s.kind == BifKind::Bk && s.families.size() == 2 && star == 2 && ell == 1 && hyp == 1,
                "B5: elliptic and hyperbolic R* pair");
        distances(s, "B5");
    }
    {
        const SwitchResult s = periodk("BHAT", 2, 1, 0.70);
        int r1 = 0, r2 = 0;
        for (const SwitchedFamily& f : s.families) {
            r1 += f.symmetry == Symmetry::R1only;
            r2 += f.symmetry == Symmetry::R2only;
        }
        r.check(s.kind == BifKind::BkHat && r1 == 2 && r2 == 2, "BHAT2: an R1-pair and an R2-pair");
        distances(s, "BHAT2");
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::setvbuf(stdout, nullptr, _IONBF, 0);
    // --expect-fail=N:prefix tolerates failing sub-checks of criterion N whose text starts with prefix
    std::map<int, std::vector<std::string>> expected;
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a.rfind("--expect-fail=", 0) == 0) {
            const std::string v = a.substr(14);
            const auto colon = v.find(':');
            expected[std::stoi(v.substr(0, colon))].push_back(colon == std::string::npos ? "" : v.substr(colon + 1));
        } else if (a.rfind("--only=", 0) == 0) {
            only.insert(std::stoi(a.substr(7)));
        }
    }
    const std::vector<std::function<void(Report&)>> crit = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                            criterion6, criterion7, criterion8, criterion9};
    int unexpected = 0;
    for (int n = 1; n <= int(crit.size()); ++n) {
        if (!only.empty() && !only.count(n)) continue;
        Report r;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            crit[n - 1](r);
        } catch (const std::exception& e) {
            r.check(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool known = !r.ok;
        for (const std::string& f : r.failed) {
            bool match = false;
            for (const std::string& pre : expected[n]) match |= f.rfind(pre, 0) == 0;
            known = known && match;
        }
        std::printf("CRITERION %d: %s (%.1f s)%s\n%s", n, r.ok ? "PASS" : "FAIL", secs, known ? " [known failure]" : "",
                    r.notes.str().c_str());
        if (!r.ok && !known) ++unexpected;
    }
    return unexpected == 0 ? 0 : 1;
}
