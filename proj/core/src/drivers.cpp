#include "gnls/drivers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "gnls/errors.hpp"
#include "gnls/floquet.hpp"
#include "gnls/pool.hpp"
#include "gnls/rotation.hpp"
#include "gnls/sections.hpp"
#include "gnls/seed.hpp"

namespace gnls {

namespace {

const Params kReference{};  // beta2 = 0.4 and the fixed coefficients

bool default_coefficients(const Params& p) {
    return p.beta4 == kReference.beta4 && p.gamma == kReference.gamma && p.mu == kReference.mu;
}

StepControl quiet_control() {
    StepControl c;
    c.floquet = false;
    c.sections = false;
    return c;
}

// First event of a monitor along a family started at `o`, trying the given direction first.
OrbitSolution follow_to(const OrbitSolution& o, FamilyKind fam, const Monitor& m, int direction, StepControl c) {
    c.events = {m};
    c.direction = direction;
    const double g0 = m.fn(o);
    const auto fn = m.fn;
    c.stop = [g0, fn](const OrbitSolution& x) {
        const double g = fn(x);
        return std::isfinite(g) && (g > 0) != (g0 > 0);
    };
    Branch b = extend_branch(o, fam, c);
    if (b.events.empty()) throw Error("no '" + m.name + "' event (" + b.stop_reason + ")");
    return b.events.front().orbit;
}

std::string label_of(BifKind kind, int k) {
    switch (kind) {
        case BifKind::SB: return "SB";
        case BifKind::Tk: return "T" + std::to_string(k);
        case BifKind::Bk: return "B" + std::to_string(k);
        case BifKind::BkHat: return "BHAT" + std::to_string(k);
        default: return to_string(kind);
    }
}

Cell opt_cell(const std::optional<double>& x) {
    if (x) return *x;
    return std::numeric_limits<double>::quiet_NaN();
}

std::string class_name(const std::optional<FloquetData>& f) { return f ? to_string(f->orbit_class) : ""; }

Table branch_table(const Branch& br, const std::string& name) {
    Table t{name,
            {{"s", "pseudo-arclength"},
             {"beta2", "parameter beta2"},
             {"H", "energy"},
             {"T", "period"},
             {"eps", "energy-gradient unfolding parameter"},
             {"max_abs_u", "max over the orbit of max_i |u_i|"},
             {"loops", "loops of (u1,u2) around 0, -1 if degenerate"},
             {"class", "Floquet class"},
             {"trace", "trace of the nontrivial 2x2 monodromy block"},
             {"alpha", "rotation number in [0,1), nan if not elliptic"},
             {"sigma_points", "intersections with u2 = 0"},
             {"event", "event label for located points"}},
            {}};
    for (const BranchPoint& p : br.points) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const double tr = p.floquet ? p.floquet->trace : nan;
        const double al = p.floquet && p.floquet->rotation_number ? *p.floquet->rotation_number : nan;
        t.add({p.s, p.beta2, p.H, p.T, p.eps, p.max_u, (long long)p.loops, class_name(p.floquet), tr, al,
               (long long)p.sigma.size(), p.event >= 0 ? br.events[p.event].label : std::string()});
    }
    return t;
}

Table events_table(const Branch& br, const std::string& name) {
    Table t{name,
            {{"label", "monitor name"},
             {"kind", "bifurcation kind"},
             {"beta2", "parameter beta2"},
             {"H", "energy"},
             {"T", "period"},
             {"k", "resonance order, 0 if none"},
             {"p", "resonance numerator, 0 if none"},
             {"class", "Floquet class"},
             {"trace", "trace of the nontrivial block"}},
            {}};
    for (const BifurcationPoint& e : br.events)
        t.add({e.label, std::string(to_string(e.kind)), e.beta2, e.energy, e.orbit.period, (long long)e.k.value_or(0),
               (long long)e.p.value_or(0), std::string(to_string(e.floquet.orbit_class)), e.floquet.trace});
    return t;
}

ResultRecord start_record(const RunConfig& cfg) {
    ResultRecord r;
    r.config = cfg;
    r.git_describe = build_git_describe();
    r.started = utc_now();
    return r;
}

}  // namespace

OrbitSolution gamma_star_at(const Params& p, double H) {
    if (!default_coefficients(p)) throw Error("gamma_star needs beta4 = -1, gamma = 1, mu = 1; use an rstar seed");
    OrbitSolution o = seed_rstar_orbit(kReference, 1.0261, -3.4592, 0.0);
    if (std::abs(p.beta2 - kReference.beta2) > 1e-14) {
        StepControl c = quiet_control();
        c.beta2_min = std::min(p.beta2, kReference.beta2) - 0.05;
        c.beta2_max = std::max(p.beta2, kReference.beta2) + 0.05;
        o = follow_to(o, FamilyKind::Beta2Family, monitor_beta2(p.beta2), p.beta2 > kReference.beta2 ? 1 : -1, c);
        o.params.beta2 = p.beta2;
    }
    if (H != 0.0) {
        StepControl c = quiet_control();
        c.H_min = std::min(H, 0.0) - 1.0;
        c.H_max = std::max(H, 0.0) + 1.0;
        o = follow_to(o, FamilyKind::EnergyFamily, monitor_energy(H), H > 0 ? 1 : -1, c);
    }
    return o;
}

OrbitSolution gamma1_at(const Params& p, double H, int equilibrium) {
    State4 eq = State4::Zero();
    bool found = false;
    for (const State4& e : equilibria(p))
        if (e[0] * equilibrium > 1e-8) eq = e, found = true;
    if (!found) throw Error("no equilibrium E" + std::string(equilibrium > 0 ? "+" : "-"));
    OrbitSolution o = seed_lyapunov_orbit(eq, p, 1e-3);
    StepControl c = quiet_control();
    c.T_max = 50.0;
    const double He = hamiltonian(eq, p);
    return follow_to(o, FamilyKind::EnergyFamily, monitor_energy(H), H > He ? 1 : -1, c);
}

OrbitSolution build_seed(const RunConfig& cfg) {
    const SeedSpec& s = cfg.seed;
    SeedOptions so;
    so.ntst = s.ntst;
    if (s.kind == "gamma_star") return gamma_star_at(cfg.params, s.H);
    if (s.kind == "gamma1") return gamma1_at(cfg.params, s.H, s.equilibrium);
    if (s.kind == "rstar") return seed_rstar_orbit(cfg.params, s.u1, s.u3, s.H, so);
    if (s.kind == "r1") return seed_r1_orbit(cfg.params, s.u1, s.u3, s.H, s.tau, so);
    if (s.kind == "lyapunov") {
        for (const State4& e : equilibria(cfg.params))
            if (e[0] * s.equilibrium > 1e-8) return seed_lyapunov_orbit(e, cfg.params, s.amplitude, so);
        throw Error("no equilibrium for the lyapunov seed");
    }
    throw std::invalid_argument("unknown seed kind '" + s.kind + "'");
}

BifurcationPoint find_bifurcation_seed(const Params& p, const BifurcationSpec& spec) {
    Params p0 = p;
    p0.beta2 = kReference.beta2;
    const OrbitSolution g = gamma_star_at(p0, 0.0);
    StepControl c = quiet_control();
    c.floquet = true;
    c.beta2_max = spec.beta2_hi;
    const std::string& kind = spec.kind;
    if (kind == "SB" || kind == "PD") {
        c.events = {monitor_trace(2.0, BifKind::SB)};
        Branch b = extend_branch(g, FamilyKind::Beta2Family, c);
        if (b.events.empty()) throw Error("no SB point on the zero-energy family");
        BifurcationPoint sb = b.events.front();
        sb.kind = BifKind::SB;
        if (kind == "SB") return sb;
        SwitchOptions so;
        so.follow_steps = 0;
        const SwitchResult r = switch_branch_sb(sb, so);
        const OrbitSolution& child = r.families.front().first;
        StepControl d = quiet_control();
        d.floquet = true;
        d.beta2_min = spec.beta2_lo;
        d.beta2_max = sb.beta2 + 1e-3;
        d.direction = child.params.beta2 < sb.beta2 ? -1 : 1;
        d.events = {monitor_trace(-2.0, BifKind::PD)};
        Branch pb = extend_branch(child, FamilyKind::Beta2Family, d);
        if (pb.events.empty()) throw Error("no PD point on the R1 family");
        BifurcationPoint pd = pb.events.front();
        pd.kind = BifKind::PD;
        return pd;
    }
    if (kind == "SN") {
        // 3-loop zero-energy orbit on the energy family just above T3, then its fold over beta2
        Params pt = p;
        pt.beta2 = 0.64;
        const OrbitSolution gt = gamma_star_at(pt, 0.0);
        StepControl e = quiet_control();
        e.T_max = 14.0;
        e.events = {monitor_energy(0.0)};
        Branch fb = extend_branch(gt, FamilyKind::EnergyFamily, e);
        OrbitSolution tri;
        bool have = false;
        for (const BifurcationPoint& ev : fb.events) {
            int loops = -1;
            try {
                loops = count_loops(ev.orbit);
            } catch (const Error&) {
            }
            if (loops == 3) {
                tri = ev.orbit;
                have = true;
                break;
            }
        }
        if (!have) throw Error("no 3-loop zero-energy orbit at beta2 = 0.64");
        StepControl b = quiet_control();
        b.beta2_min = 0.62;
        b.beta2_max = 0.66;
        b.max_steps = 200;
        b.ds_max = 0.05;
        Branch bb = extend_branch(tri, FamilyKind::Beta2Family, b);
        const std::vector<OrbitSolution> folds = fold_points(bb);
        if (folds.empty()) throw Error("the 3-loop family has no fold over beta2");
        BifurcationPoint sn;
        sn.kind = BifKind::SN;
        sn.orbit = folds.front();
        sn.orbit.symmetry = Symmetry::Rstar;
        sn.beta2 = sn.orbit.params.beta2;
        sn.energy = sn.orbit.energy;
        sn.floquet = floquet(sn.orbit);
        sn.family = FamilyKind::Beta2Family;
        sn.label = "SN";
        return sn;
    }
    BifKind bk;
    if (kind == "T") bk = BifKind::Tk;
    else if (kind == "B") bk = BifKind::Bk;
    else if (kind == "BHAT") bk = BifKind::BkHat;
    else throw std::invalid_argument("unknown bifurcation kind '" + kind + "'");
    int pp = spec.p;
    if (bk == BifKind::Tk && pp == 0) pp = 1;
    if (spec.k < 2 || pp < 1 || pp >= spec.k) throw std::invalid_argument("resonance needs 0 < p < k, k >= 2");
    c.events = {monitor_rotation(pp, spec.k)};
    Branch b = extend_branch(g, FamilyKind::Beta2Family, c);
    if (b.events.empty()) throw Error("no alpha = p/k crossing below beta2_hi");
    BifurcationPoint r = b.events.front();
    r.kind = bk;
    return r;
}

bool check_interleaving(const std::vector<Table1Row>& rows) {
    std::map<int, double> odd, hat;  // k -> beta2
    for (const Table1Row& r : rows) {
        if (!r.error.empty()) continue;
        if (r.k >= 3 && r.k % 2 == 1 && r.p == r.k - 2) odd[r.k] = r.beta2_crossing;
        if (r.k >= 2 && r.p == r.k - 1) hat[r.k] = r.beta2_crossing;
    }
    auto monotone = [](const std::map<int, double>& m) {
        double prev = -1e300;
        for (const auto& [k, b] : m) {
            if (b <= prev) return false;
            prev = b;
        }
        return true;
    };
    if (odd.empty() || hat.empty() || !monotone(odd) || !monotone(hat)) return false;
    for (const auto& [k, b] : hat) {
        const int below = 2 * k - 1, above = 2 * k + 1;  // B_{2m+1} < BHAT_{m+1} < B_{2m+3}
        if (auto it = odd.find(below); it != odd.end() && !(it->second < b)) return false;
        if (auto it = odd.find(above); it != odd.end() && !(b < it->second)) return false;
    }
    return true;
}

Table1Result compute_table1(const RunConfig& cfg, EventLog* log) {
    const auto t0 = std::chrono::steady_clock::now();
    Table1Result out;
    Params p = cfg.params;
    p.beta2 = cfg.table1.beta2_start;
    const OrbitSolution g = gamma_star_at(p, 0.0);
    StepControl c;
    c.sections = false;
    c.beta2_max = cfg.table1.beta2_end;
    c.events = {monitor_trace(2.0, BifKind::SB)};
    Branch br = extend_branch(g, FamilyKind::Beta2Family, c);
    if (log) log->emit("table1.branch", {{"points", (long long)br.points.size()}, {"stop", br.stop_reason}});
    out.resonances = resonance_events(br, cfg.k_max);

    std::vector<BifurcationPoint> seeds;
    std::vector<Table1Row> rows;
    for (const BifurcationPoint& e : br.events)
        if (e.kind == BifKind::SB && e.label.rfind("trace", 0) == 0) {
            Table1Row r;
            r.label = r.predicted = "SB";
            r.beta2_crossing = e.beta2;
            rows.push_back(r);
            seeds.push_back(e);
            break;
        }
    for (const BifurcationPoint& e : out.resonances) {
        const int k = *e.k, q = *e.p;
        const bool odd_row = k % 2 == 1 && q == k - 2;
        const bool hat_row = q == k - 1;
        if (!odd_row && !hat_row) continue;
        Table1Row r;
        r.k = k;
        r.p = q;
        r.alpha = double(q) / k;
        r.beta2_crossing = e.beta2;
        r.predicted = hat_row ? label_of(BifKind::BkHat, k) : label_of(k <= 4 ? BifKind::Tk : BifKind::Bk, k);
        rows.push_back(r);
        seeds.push_back(e);
    }

    parallel_for(int(rows.size()), effective_workers(cfg), [&](int i) {
        Table1Row& r = rows[i];
        BifurcationPoint seed = seeds[i];
        try {
            SwitchOptions so;
            so.follow_steps = cfg.bifurcation.follow_steps;
            const SwitchResult sr = r.k == 1 ? switch_branch_sb(seed, so) : switch_branch_periodk(seed, r.k, r.p, so);
            r.label = label_of(sr.kind, r.k);
            r.families = int(sr.families.size());
            r.wrong_multiplicity = sr.wrong_multiplicity;
            r.pattern_ok = r.label == r.predicted && !sr.wrong_multiplicity;
            seed.kind = sr.kind;
            if (cfg.table1.curves) {
                BifCurveOptions bo;
                bo.ds_max = cfg.bifurcation.ds_max;
                bo.H_min = cfg.bifurcation.H_min;
                bo.H_max = cfg.bifurcation.H_max;
                const BifCurve cv = continue_bif_point(seed, cfg.bifurcation.beta2_lo, cfg.bifurcation.beta2_hi, bo);
                if (!cv.folds.empty()) {
                    r.beta2_degenerate = cv.folds.front().beta2;
                    r.H_degenerate = cv.folds.front().energy;
                }
                for (double z : cv.zero_crossings)
                    if (!r.beta2_curve_zero || std::abs(z - r.beta2_crossing) < std::abs(*r.beta2_curve_zero - r.beta2_crossing))
                        r.beta2_curve_zero = z;
            }
        } catch (const std::exception& ex) {
            r.error = ex.what();
            if (r.label.empty()) r.label = r.predicted;
        }
        if (log)
            log->emit("table1.row", {{"label", r.label},
                                     {"k", (long long)r.k},
                                     {"p", (long long)r.p},
                                     {"beta2", r.beta2_crossing},
                                     {"error", r.error}});
    });
    out.rows = std::move(rows);
    out.interleaving_ok = check_interleaving(out.rows);
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

ResultRecord run_table1(const RunConfig& cfg, EventLog& log) {
    ResultRecord rec = start_record(cfg);
    const Table1Result res = compute_table1(cfg, &log);
    Table t{"table1",
            {{"kind", "classified bifurcation (SB, Tk, Bk, BHATk)"},
             {"predicted", "kind expected from the rotation number pattern"},
             {"k", "period multiple"},
             {"p", "rotation numerator"},
             {"alpha", "rotation number p/k"},
             {"beta2_crossing", "beta2 of the crossing on the zero-energy Gamma* family"},
             {"beta2_curve_zero", "beta2 where the bifurcation curve meets H = 0"},
             {"beta2_degenerate", "beta2 of the fold of the bifurcation curve"},
             {"H_degenerate", "energy of the fold of the bifurcation curve"},
             {"families", "bifurcating families found"},
             {"pattern_ok", "1 if classified kind and multiplicity match the pattern"},
             {"error", "failure message, empty on success"}},
            {}};
    for (const Table1Row& r : res.rows) {
        t.add({r.label, r.predicted, (long long)r.k, (long long)r.p, r.alpha, r.beta2_crossing, opt_cell(r.beta2_curve_zero),
               opt_cell(r.beta2_degenerate), opt_cell(r.H_degenerate), (long long)r.families, (long long)r.pattern_ok, r.error});
        ++rec.rows_total;
        if (!r.error.empty()) ++rec.rows_failed;
        if (r.error.empty() && !r.pattern_ok) rec.warnings.push_back("pattern violation at " + r.predicted);
    }
    if (!res.interleaving_ok) rec.warnings.push_back("B and BHAT sequences do not interleave monotonically");
    Table rz{"resonances",
             {{"p", "rotation numerator"}, {"k", "rotation denominator"}, {"beta2", "crossing on the zero-energy Gamma* family"}},
             {}};
    for (const BifurcationPoint& e : res.resonances) rz.add({(long long)*e.p, (long long)*e.k, e.beta2});
    rec.tables = {std::move(t), std::move(rz)};
    log.emit("table1.done", {{"rows", (long long)res.rows.size()},
                             {"interleaving_ok", (long long)res.interleaving_ok},
                             {"seconds", res.seconds}});
    rec.finished = utc_now();
    return rec;
}

ResultRecord run_equilibria(const RunConfig& cfg, EventLog& log) {
    ResultRecord rec = start_record(cfg);
    const Params& p = cfg.params;
    Table t{"equilibria",
            {{"index", "0-based"}, {"u1", ""}, {"u2", ""}, {"u3", ""}, {"u4", ""}, {"H", "energy"}},
            {}};
    for (int j = 0; j < 4; ++j) {
        t.columns.push_back({"re" + std::to_string(j), "real part of eigenvalue of Df"});
        t.columns.push_back({"im" + std::to_string(j), "imaginary part of eigenvalue of Df"});
    }
    const std::vector<State4> eqs = equilibria(p);
    for (std::size_t i = 0; i < eqs.size(); ++i) {
        const State4& e = eqs[i];
        Eigen::EigenSolver<Mat4> es(jacobian(e, p));
        std::vector<Cell> row{(long long)i, e[0], e[1], e[2], e[3], hamiltonian(e, p)};
        std::vector<std::complex<double>> ev(4);
        for (int j = 0; j < 4; ++j) ev[j] = es.eigenvalues()[j];
        std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
        for (const auto& z : ev) row.push_back(z.real()), row.push_back(z.imag());
        t.add(std::move(row));
    }
    const SpectrumClass sc = classify_origin(p);
    const double b2 = -2.0 * p.beta4 * p.mu / 3.0;
    Table o{"origin",
            {{"kind", "spectrum of the linearization at 0"},
             {"boundary_beta2", "|beta2| where the origin spectrum changes type, nan if none"}},
            {}};
    o.add({std::string(to_string(sc.kind)), b2 > 0 ? std::sqrt(b2) : std::numeric_limits<double>::quiet_NaN()});
    rec.tables = {std::move(t), std::move(o)};
    rec.rows_total = 1;
    log.emit("equilibria.done", {{"count", (long long)eqs.size()}, {"origin", std::string(to_string(sc.kind))}});
    rec.finished = utc_now();
    return rec;
}

namespace {

Table summary_table(const OrbitSolution& o, const std::string& name) {
    Table t{name,
            {{"beta2", "parameter"},
             {"H", "energy"},
             {"T", "period"},
             {"eps", "unfolding parameter"},
             {"symmetry", "reversibility class"},
             {"loops", "loops of (u1,u2) around 0, -1 if degenerate"},
             {"sigma_points", "intersections with u2 = 0"},
             {"class", "Floquet class"},
             {"trace", "trace of the nontrivial block"},
             {"alpha", "rotation number, nan if not elliptic"}},
            {}};
    int loops = -1;
    try {
        loops = count_loops(o);
    } catch (const Error&) {
    }
    const FloquetData fd = floquet(o);
    const Symmetry sy = o.symmetry == Symmetry::Unclassified ? classify_symmetry(o) : o.symmetry;
    t.add({o.params.beta2, o.energy, o.period, o.eps, std::string(to_string(sy)), (long long)loops,
           (long long)sigma_intersections(o).size(), std::string(to_string(fd.orbit_class)), fd.trace,
           fd.rotation_number ? *fd.rotation_number : std::numeric_limits<double>::quiet_NaN()});
    return t;
}

}  // namespace

ResultRecord run_find_orbit(const RunConfig& cfg, EventLog& log) {
    ResultRecord rec = start_record(cfg);
    const OrbitSolution o = build_seed(cfg);
    Table pts{"orbit",
              {{"t", "phase in [0,1], physical time t*T"},
               {"u1", ""},
               {"u2", ""},
               {"u3", ""},
               {"u4", ""},
               {"H", "energy at the node"}},
              {}};
    for (int g = 0; g < o.mesh.nodes(); ++g) {
        const State4 u = o.node(g);
        pts.add({o.mesh.node_time(g), u[0], u[1], u[2], u[3], hamiltonian(u, o.params)});
    }
    Table sig{"sigma",
              {{"t", "phase"}, {"u1", ""}, {"u3", ""}, {"u4", ""}, {"contact", "crossing type"}, {"on_sigma1", "1 if u2 = u4 = 0"}},
              {}};
    for (const SigmaPoint& s : sigma_intersections(o))
        sig.add({s.t, s.state[0], s.state[2], s.state[3], std::string(to_string(s.contact)), (long long)s.on_sigma1});
    rec.tables = {summary_table(o, "summary"), std::move(pts), std::move(sig)};
    rec.rows_total = 1;
    log.emit("find-orbit.done", {{"T", o.period}, {"H", o.energy}});
    rec.finished = utc_now();
    return rec;
}

ResultRecord run_floquet(const RunConfig& cfg, EventLog& log) {
    ResultRecord rec = start_record(cfg);
    const OrbitSolution o = build_seed(cfg);
    const FloquetData fd = floquet(o);
    Table m{"multipliers",
            {{"index", "trivial pair first"}, {"re", ""}, {"im", ""}, {"abs", "modulus"}},
            {}};
    std::complex<double> prod = 1.0;
    for (int i = 0; i < 4; ++i) {
        const auto z = fd.multipliers[i];
        prod *= z;
        m.add({(long long)i, z.real(), z.imag(), std::abs(z)});
    }
    Table s{"floquet",
            {{"class", "Floquet class"},
             {"trace", "trace of the nontrivial block"},
             {"alpha", "rotation number, nan if not elliptic"},
             {"product_re", "real part of the product of all multipliers"},
             {"product_im", "imaginary part of the product"},
             {"ill_conditioned", "1 if the monodromy is ill conditioned"},
             {"deflation_fallback", "1 if the trivial pair was removed by eigenvalue proximity"}},
            {}};
    s.add({std::string(to_string(fd.orbit_class)), fd.trace,
           fd.rotation_number ? *fd.rotation_number : std::numeric_limits<double>::quiet_NaN(), prod.real(), prod.imag(),
           (long long)fd.ill_conditioned, (long long)fd.deflation_fallback});
    rec.tables = {summary_table(o, "summary"), std::move(m), std::move(s)};
    rec.rows_total = 1;
    if (fd.ill_conditioned) rec.warnings.push_back("monodromy ill conditioned");
    log.emit("floquet.done", {{"class", std::string(to_string(fd.orbit_class))}, {"trace", fd.trace}});
    rec.finished = utc_now();
    return rec;
}

ResultRecord run_continue(const RunConfig& cfg, EventLog& log) {
    ResultRecord rec = start_record(cfg);
    const OrbitSolution o = build_seed(cfg);
    Branch br = extend_branch(o, cfg.continuation.family, cfg.continuation.step_control());
    if (cfg.continuation.family == FamilyKind::Beta2Family && cfg.continuation.floquet) resonance_events(br, cfg.k_max);
    rec.tables = {branch_table(br, "branch"), events_table(br, "events")};
    rec.rows_total = 1;
    if (br.stalled) {
        rec.rows_failed = 1;
        rec.warnings.push_back("continuation stalled: " + br.stop_reason);
    }
    log.emit("continue.done",
             {{"points", (long long)br.points.size()}, {"events", (long long)br.events.size()}, {"stop", br.stop_reason}});
    rec.finished = utc_now();
    return rec;
}

ResultRecord run_surface(const RunConfig& cfg, EventLog& log) {
    ResultRecord rec = start_record(cfg);
    const OrbitSolution o = build_seed(cfg);
    ContinuationSpec cs = cfg.continuation;
    cs.family = FamilyKind::EnergyFamily;
    cs.sections = true;
    Branch br = extend_branch(o, FamilyKind::EnergyFamily, cs.step_control());
    std::vector<FamilyMember> fam;
    for (const BranchPoint& p : br.points)
        if (p.event < 0) fam.push_back({p.s, p.H, p.sigma});
    const std::vector<IntersectionSet> sets = family_intersection_set(fam);
    Table ch{"chains",
             {{"label", "intersection chain"}, {"member", "index of the family member"}, {"u1", ""}, {"u4", ""}, {"H", "energy"}},
             {}};
    Table tg{"tangencies",
             {{"label", "chain opened at the event"},
              {"s", "family arclength"},
              {"t", "phase on the orbit"},
              {"contact", "tangency type"},
              {"on_sigma1", "1 if u2 = u4 = 0"},
              {"u1", ""},
              {"u4", ""}},
             {}};
    int ambiguous = 0;
    for (const IntersectionSet& s : sets) {
        ambiguous += s.ambiguous;
        for (const ChainPoint& p : s.points) ch.add({s.label, (long long)p.member, p.u1, p.u4, p.H});
        for (const auto& [sv, sp] : s.tangency_events)
            tg.add({s.label, sv, sp.t, std::string(to_string(sp.contact)), (long long)sp.on_sigma1, sp.state[0], sp.state[3]});
    }
    rec.tables = {branch_table(br, "monitor"), events_table(br, "events"), std::move(ch), std::move(tg)};
    rec.rows_total = 1;
    if (ambiguous) rec.warnings.push_back(std::to_string(ambiguous) + " chains with ambiguous matches");
    if (br.stalled) {
        rec.rows_failed = 1;
        rec.warnings.push_back("continuation stalled: " + br.stop_reason);
    }
    log.emit("surface.done", {{"points", (long long)br.points.size()}, {"chains", (long long)sets.size()}, {"stop", br.stop_reason}});
    rec.finished = utc_now();
    return rec;
}

ResultRecord run_bif_curve(const RunConfig& cfg, EventLog& log) {
    ResultRecord rec = start_record(cfg);
    const BifurcationPoint seed = find_bifurcation_seed(cfg.params, cfg.bifurcation);
    log.emit("bif-curve.seed", {{"kind", std::string(to_string(seed.kind))}, {"beta2", seed.beta2}, {"H", seed.energy}});
    BifCurveOptions bo;
    bo.ds_max = cfg.bifurcation.ds_max;
    bo.H_min = cfg.bifurcation.H_min;
    bo.H_max = cfg.bifurcation.H_max;
    const BifCurve cv = continue_bif_point(seed, cfg.bifurcation.beta2_lo, cfg.bifurcation.beta2_hi, bo);
    Table pts{"curve",
              {{"beta2", "parameter"}, {"H", "energy"}, {"T", "period"}, {"trace", "trace of the nontrivial block"}},
              {}};
    for (const BifurcationPoint& p : cv.points) pts.add({p.beta2, p.energy, p.orbit.period, p.floquet.trace});
    Table deg{"degenerate", {{"kind", "degenerate point"}, {"beta2", "parameter"}, {"H", "energy"}}, {}};
    for (const BifurcationPoint& f : cv.folds) deg.add({std::string(to_string(f.kind)), f.beta2, f.energy});
    Table z{"zero_crossings", {{"beta2", "parameter where the curve meets H = 0"}}, {}};
    for (double b : cv.zero_crossings) z.add({b});
    rec.tables = {std::move(pts), std::move(deg), std::move(z)};
    rec.rows_total = 1;
    if (cv.points.empty()) {
        rec.rows_failed = 1;
        rec.warnings.push_back("empty curve: " + cv.stop_reason);
    }
    log.emit("bif-curve.done", {{"points", (long long)cv.points.size()}, {"stop", cv.stop_reason}});
    rec.finished = utc_now();
    return rec;
}

ResultRecord run_experiment(const RunConfig& cfg, EventLog& log) {
    switch (cfg.experiment) {
        case Experiment::Equilibria: return run_equilibria(cfg, log);
        case Experiment::FindOrbit: return run_find_orbit(cfg, log);
        case Experiment::Continue: return run_continue(cfg, log);
        case Experiment::Floquet: return run_floquet(cfg, log);
        case Experiment::Surface: return run_surface(cfg, log);
        case Experiment::BifCurve: return run_bif_curve(cfg, log);
        case Experiment::Table1: return run_table1(cfg, log);
    }
    throw std::invalid_argument("experiment");
}

int exit_code(const ResultRecord& rec) {
    if (rec.rows_failed == 0) return 0;
    if (rec.config.experiment == Experiment::Table1)
        return rec.rows_failed * 5 > rec.rows_total ? 2 : 0;
    return 2;
}

}  // namespace gnls
