#include "gnls/sections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gnls/errors.hpp"

namespace gnls {

const char* to_string(Contact c) {
    switch (c) {
        case Contact::Transversal: return "Transversal";
        case Contact::QuadraticTangency: return "QuadraticTangency";
        case Contact::CubicTangency: return "CubicTangency";
    }
    return "?";
}

namespace {

// root of component k of u (or of its derivative when deriv) in [a, b] with a sign change
double refine_root(const OrbitSolution& o, int k, bool deriv, double a, double b) {
    auto g = [&](double t) { return deriv ? evaluate_derivative(o, t)[k] : evaluate(o, t)[k]; };
    double ga = g(a), gb = g(b);
    if (ga == 0.0) return a;
    if (gb == 0.0) return b;
    for (int it = 0; it < 200; ++it) {
        double m = b - gb * (b - a) / (gb - ga);
        if (!(m > a && m < b) || it % 3 == 2) m = 0.5 * (a + b);
        const double gm = g(m);
        if (gm == 0.0) return m;
        if ((gm > 0) == (ga > 0)) a = m, ga = gm;
        else b = m, gb = gm;
        if (b - a < 1e-16) break;
    }
    return std::abs(ga) < std::abs(gb) ? a : b;
}

struct Feature {
    double t;
    bool root;   // otherwise a critical point of u2
    bool small;  // critical point with |u2| below tolerance
};

SigmaPoint make_point(const OrbitSolution& o, double t) {
    SigmaPoint sp;
    sp.t = t - std::floor(t);
    if (sp.t >= 1.0) sp.t = 0.0;
    sp.state = evaluate(o, sp.t);
    sp.energy = hamiltonian(sp.state, o.params);
    return sp;
}

void classify(SigmaPoint& sp, const Params& p, double tol) {
    const State4& u = sp.state;
    const double third = vector_field(u, p)[3];
    if (std::abs(u[2]) > tol) sp.contact = Contact::Transversal;
    else if (std::abs(u[3]) > tol) sp.contact = Contact::QuadraticTangency;
    else sp.contact = std::abs(third) > tol ? Contact::CubicTangency : Contact::QuadraticTangency;
    sp.on_sigma1 = std::abs(u[1]) <= 1e-8 && std::abs(u[3]) <= 1e-8;
}

}  // namespace

std::vector<SigmaPoint> sigma_intersections(const OrbitSolution& o) {
    const Mesh& m = o.mesh;
    const int per = 8;
    std::vector<double> ts;
    for (int j = 0; j < m.ntst; ++j)
        for (int q = 0; q < per; ++q) ts.push_back(m.breakpoints[j] + m.width(j) * q / per);
    const int n = int(ts.size());
    std::vector<State4> us(n);
    for (int i = 0; i < n; ++i) us[i] = evaluate(o, ts[i]);
    const double scale = 1.0 + o.max_abs();
    const double tol = 1e-6 * scale;

    std::vector<Feature> feats;
    for (int i = 0; i < n; ++i) {
        const int i1 = (i + 1) % n;
        const double a = ts[i], b = (i1 == 0) ? 1.0 : ts[i1];
        if (us[i][1] == 0.0) feats.push_back({a, true, false});
        else if (us[i1][1] != 0.0 && (us[i][1] > 0) != (us[i1][1] > 0))
            feats.push_back({refine_root(o, 1, false, a, b), true, false});
        if (us[i][2] != 0.0 && us[i1][2] != 0.0 && (us[i][2] > 0) != (us[i1][2] > 0)) {
            // u2' = T u3 up to a positive factor
            const double tc = refine_root(o, 2, false, a, b);
            feats.push_back({tc, false, std::abs(evaluate(o, tc)[1]) <= tol});
        }
    }
    std::sort(feats.begin(), feats.end(), [](const Feature& x, const Feature& y) { return x.t < y.t; });
    std::vector<SigmaPoint> out;
    const int nf = int(feats.size());
    if (nf == 0) return out;

    // rotate so that the sweep starts just after a separator (large critical point) if any
    int start = 0;
    for (int i = 0; i < nf; ++i)
        if (!feats[i].root && !feats[i].small) {
            start = (i + 1) % nf;
            break;
        }
    std::vector<Feature> seq;
    for (int q = 0; q < nf; ++q) seq.push_back(feats[(start + q) % nf]);

    std::vector<Feature> run;
    auto flush = [&]() {
        if (run.empty()) return;
        std::vector<const Feature*> roots, smalls;
        for (const Feature& f : run) (f.root ? roots : smalls).push_back(&f);
        if (smalls.empty()) {
            for (const Feature* r : roots) {
                SigmaPoint sp = make_point(o, r->t);
                classify(sp, o.params, tol);
                out.push_back(sp);
            }
        } else if (roots.size() % 2 == 0) {
            const Feature* best = smalls.front();
            for (const Feature* c : smalls)
                if (std::abs(evaluate(o, c->t)[1]) < std::abs(evaluate(o, best->t)[1])) best = c;
            SigmaPoint sp = make_point(o, best->t);
            classify(sp, o.params, tol);
            if (sp.contact == Contact::Transversal) sp.contact = Contact::QuadraticTangency;
            out.push_back(sp);
        } else {
            const Feature* best = roots.front();
            for (const Feature* r : roots)
                if (std::abs(evaluate(o, r->t)[2]) < std::abs(evaluate(o, best->t)[2])) best = r;
            double tb = best->t;
            if (std::abs(evaluate(o, tb)[2]) <= tol) {
                // near-triple root of u2: pin the inflection, u2'' = T^2 u4
                const double h = 2.0 / m.ntst;
                const double a = tb - h, b = tb + h;
                const double ga = evaluate(o, a)[3], gb = evaluate(o, b)[3];
                if (ga != 0.0 && gb != 0.0 && (ga > 0) != (gb > 0)) {
                    const double ti = refine_root(o, 3, false, a, b);
                    if (std::abs(evaluate(o, ti)[1]) <= std::abs(evaluate(o, tb)[1]) + 1e-12 * scale) tb = ti;
                }
            }
            SigmaPoint sp = make_point(o, tb);
            classify(sp, o.params, tol);
            out.push_back(sp);
        }
        run.clear();
    };
    for (const Feature& f : seq) {
        if (!f.root && !f.small) {
            flush();
            continue;
        }
        // a root separated from the current run by no small critical point starts its own run
        if (f.root && !run.empty()) {
            bool has_small = std::any_of(run.begin(), run.end(), [](const Feature& x) { return !x.root; });
            if (!has_small || run.back().root) flush();
        }
        run.push_back(f);
    }
    flush();
    std::sort(out.begin(), out.end(), [](const SigmaPoint& a, const SigmaPoint& b) { return a.t < b.t; });
    return out;
}

double winding_number(const OrbitSolution& o) {
    const double eps = 1e-8;
    auto proj = [&](double t) {
        const State4 u = evaluate(o, t);
        return std::pair<double, double>(u[0], u[1]);
    };
    auto angle = [](std::pair<double, double> p) { return std::atan2(p.second, p.first); };
    auto radius = [](std::pair<double, double> p) { return std::hypot(p.first, p.second); };
    double total = 0.0;
    // recursive subdivision keeps each increment small
    auto rec = [&](auto&& self, double a, double b, std::pair<double, double> pa, std::pair<double, double> pb,
                   int depth) -> void {
        double d = angle(pb) - angle(pa);
        if (d > M_PI) d -= 2.0 * M_PI;
        if (d < -M_PI) d += 2.0 * M_PI;
        if (std::abs(d) <= 0.3 || depth > 60) {
            if (depth > 60) throw DegenerateProjection();
            total += d;
            return;
        }
        const double m = 0.5 * (a + b);
        const auto pm = proj(m);
        if (radius(pm) <= eps) throw DegenerateProjection();
        self(self, a, m, pa, pm, depth + 1);
        self(self, m, b, pm, pb, depth + 1);
    };
    const Mesh& m = o.mesh;
    std::vector<double> ts;
    for (int j = 0; j < m.ntst; ++j)
        for (int q = 0; q < 4; ++q) ts.push_back(m.breakpoints[j] + m.width(j) * q / 4);
    ts.push_back(1.0);
    std::vector<std::pair<double, double>> ps;
    for (double t : ts) {
        ps.push_back(proj(t));
        if (radius(ps.back()) <= eps) throw DegenerateProjection();
    }
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) rec(rec, ts[i], ts[i + 1], ps[i], ps[i + 1], 0);
    return total / (2.0 * M_PI);
}

int count_loops(const OrbitSolution& o) {
    const double w = winding_number(o);
    const double r = std::round(w);
    if (std::abs(w - r) > 0.1) throw DegenerateProjection();
    return int(std::abs(r));
}

std::vector<IntersectionSet> family_intersection_set(const std::vector<FamilyMember>& family,
                                                     const ChainPolicy& policy) {
    std::vector<IntersectionSet> chains;
    struct Active {
        int chain;
        SigmaPoint last;
    };
    std::vector<Active> active;
    int next_label = 1;
    auto dist = [](const SigmaPoint& a, const SigmaPoint& b) {
        double dt = std::abs(a.t - b.t);
        dt = std::min(dt, 1.0 - dt);
        return std::sqrt(std::pow(a.state[0] - b.state[0], 2) + std::pow(a.state[3] - b.state[3], 2) + dt * dt);
    };
    auto open_chains = [&](std::vector<int> idx, const FamilyMember& mem, int mi) {
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            const auto& pa = mem.points[a].state;
            const auto& pb = mem.points[b].state;
            if (pa[0] != pb[0]) return pa[0] < pb[0];
            return pa[3] < pb[3];
        });
        for (int i : idx) {
            IntersectionSet set;
            set.label = policy.prefix + "_" + std::to_string(next_label++);
            const SigmaPoint& sp = mem.points[i];
            set.points.push_back({sp.state[0], sp.state[3], mem.H, mi});
            if (sp.contact != Contact::Transversal) set.tangency_events.emplace_back(mem.s, sp);
            chains.push_back(set);
            active.push_back({int(chains.size()) - 1, sp});
        }
    };
    for (int mi = 0; mi < int(family.size()); ++mi) {
        const FamilyMember& mem = family[mi];
        const int np = int(mem.points.size());
        if (mi == 0) {
            std::vector<int> idx(np);
            std::iota(idx.begin(), idx.end(), 0);
            open_chains(idx, mem, mi);
            continue;
        }
        // greedy matching by smallest distance, deterministic tie order
        struct Cand {
            double d;
            int a, p;
        };
        std::vector<Cand> cands;
        for (int a = 0; a < int(active.size()); ++a)
            for (int p = 0; p < np; ++p) {
                const double d = dist(active[a].last, mem.points[p]);
                if (d <= policy.max_jump) cands.push_back({d, a, p});
            }
        std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
            if (x.d != y.d) return x.d < y.d;
            if (x.a != y.a) return x.a < y.a;
            return x.p < y.p;
        });
        std::vector<int> amatch(active.size(), -1), pmatch(np, -1);
        for (const Cand& c : cands) {
            if (amatch[c.a] >= 0 || pmatch[c.p] >= 0) continue;
            amatch[c.a] = c.p;
            pmatch[c.p] = c.a;
            // ambiguity: another free point almost as close
            for (const Cand& o : cands)
                if (o.a == c.a && o.p != c.p && pmatch[o.p] < 0 && o.d <= 2.0 * c.d && c.d > 1e-12)
                    chains[active[c.a].chain].ambiguous = true;
        }
        std::vector<Active> next;
        for (int a = 0; a < int(active.size()); ++a) {
            if (amatch[a] < 0) continue;
            const SigmaPoint& sp = mem.points[amatch[a]];
            IntersectionSet& set = chains[active[a].chain];
            set.points.push_back({sp.state[0], sp.state[3], mem.H, mi});
            if (sp.contact != Contact::Transversal) set.tangency_events.emplace_back(mem.s, sp);
            next.push_back({active[a].chain, sp});
        }
        active = next;
        std::vector<int> born;
        for (int p = 0; p < np; ++p)
            if (pmatch[p] < 0) born.push_back(p);
        open_chains(born, mem, mi);
    }
    return chains;
}

}  // namespace gnls
