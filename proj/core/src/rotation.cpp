#include "gnls/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gnls {

std::vector<RotationSample> rotation_number_along(const Branch& br) {
    std::vector<RotationSample> out;
    bool prev_elliptic = false;
    for (int i = 0; i < int(br.points.size()); ++i) {
        const BranchPoint& p = br.points[i];
        if (p.event >= 0) continue;
        const bool ell = p.floquet && p.floquet->rotation_number;
        if (!ell) {
            if (prev_elliptic && !out.empty()) out.back().edge = true;
            prev_elliptic = false;
            continue;
        }
        RotationSample s;
        s.point = i;
        s.scalar = br.scalar(i);
        s.alpha = *p.floquet->rotation_number;
        if (prev_elliptic) s.alpha += std::round(out.back().alpha - s.alpha);
        else s.edge = i > 0;
        out.push_back(s);
        prev_elliptic = true;
    }
    return out;
}

std::vector<BifurcationPoint> resonance_events(Branch& br, int k_max) {
    struct Bracket {
        int left;
        int p, k;
    };
    const std::vector<RotationSample> rs = rotation_number_along(br);
    std::vector<Bracket> todo;
    for (std::size_t q = 0; q + 1 < rs.size(); ++q) {
        if (rs[q + 1].point != rs[q].point + 1) {
            // only event points may sit between consecutive samples
            bool gap = false;
            for (int j = rs[q].point + 1; j < rs[q + 1].point; ++j) gap |= br.points[j].event < 0;
            if (gap) continue;
        }
        const double a0 = rs[q].alpha, a1 = rs[q + 1].alpha;
        const double lo = std::min(a0, a1), hi = std::max(a0, a1);
        for (int k = 2; k <= k_max; ++k)
            for (int p = 1; p < k; ++p) {
                if (std::gcd(p, k) != 1) continue;
                const double r = double(p) / k;
                // the monitor works modulo 1, so only crossings inside one sheet are located
                const double m = std::floor(lo);
                if (std::floor(hi) != m) continue;
                if (lo - m < r && r <= hi - m) todo.push_back({rs[q].point, p, k});
            }
    }
    // locate from the back so earlier bracket indices stay valid
    std::stable_sort(todo.begin(), todo.end(), [](const Bracket& a, const Bracket& b) { return a.left > b.left; });
    std::vector<BifurcationPoint> out;
    for (const Bracket& b : todo) {
        const Monitor m = monitor_rotation(b.p, b.k);
        int right = b.left + 1;
        while (right < int(br.points.size()) && br.points[right].event >= 0) ++right;
        bool known = false;
        for (int j = b.left + 1; j < right; ++j)
            if (br.events[br.points[j].event].label == m.name) {
                out.push_back(br.events[br.points[j].event]);
                known = true;
            }
        if (known) continue;
        OrbitSolution o;
        try {
            o = locate_event(br, m, b.left);
        } catch (const std::exception&) {
            continue;
        }
        for (const BifurcationPoint& e : br.events)
            if (e.label == m.name && e.beta2 == o.params.beta2 && e.energy == o.energy) out.push_back(e);
    }
    std::sort(out.begin(), out.end(), [](const BifurcationPoint& a, const BifurcationPoint& b) { return a.s < b.s; });
    return out;
}

}  // namespace gnls
