#pragma once

#include <string>
#include <vector>

#include "gnls/colloc.hpp"

namespace gnls {

enum class Contact { Transversal, QuadraticTangency, CubicTangency };
const char* to_string(Contact c);

struct SigmaPoint {
    double t = 0.0;
    State4 state = State4::Zero();
    Contact contact = Contact::Transversal;
    bool on_sigma1 = false;
    double energy = 0.0;
};

std::vector<SigmaPoint> sigma_intersections(const OrbitSolution& orbit);

// Loops of the (u1, u2) projection around the origin (absolute winding number).
int count_loops(const OrbitSolution& orbit);
// Signed winding; throws DegenerateProjection near the origin.
double winding_number(const OrbitSolution& orbit);

struct FamilyMember {
    double s = 0.0;  // family arclength
    double H = 0.0;
    std::vector<SigmaPoint> points;
};

struct ChainPoint {
    double u1, u4, H;
    int member;
};

struct IntersectionSet {
    std::string label;
    std::vector<ChainPoint> points;
    std::vector<std::pair<double, SigmaPoint>> tangency_events;
    bool ambiguous = false;
};

struct ChainPolicy {
    std::string prefix = "S";
    double max_jump = 0.5;  // continuity threshold in (u1, u4, t)
};

std::vector<IntersectionSet> family_intersection_set(const std::vector<FamilyMember>& family,
                                                     const ChainPolicy& policy = {});

}  // namespace gnls
