#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unital/budget.hpp"
#include "unital/incidence.hpp"

namespace unital {

// A set of q^3+1 points of a plane of order q^2 meeting every line in 1 or
// q+1 points.
struct Unital {
  PlanePtr plane;
  int q = 0;
  std::vector<int> points;  // sorted
};

// q with plane order q^2. Throws Error(NotSquareOrder).
int unital_parameter(const ProjectivePlane& plane);

struct UnitalCheck {
  bool ok = false;
  // First line meeting the set badly, or -1 when the failure is the size
  // or the labels.
  int line = -1;
  int meets = 0;
  std::string diagnostic;
};

// Throws Error(NotSquareOrder) before looking at pts.
UnitalCheck check_unital(const ProjectivePlane& plane, const std::vector<int>& pts);
bool is_unital(const ProjectivePlane& plane, const std::vector<int>& pts, std::string* diagnostic = nullptr);

// Throws Error(InvalidArgument) with the diagnostic if pts is not a unital.
Unital make_unital(PlanePtr plane, std::vector<int> pts);

// Lines meeting the unital in q+1 points, resp. in one point; increasing.
std::vector<int> secant_lines(const Unital& u);
std::vector<int> tangent_lines(const Unital& u);

// Blocks are the secant intersections in line order, with unital points
// renumbered 0..q^3 in increasing order.
IncidenceStructure design_from_unital(const Unital& u);

// The tangent lines as a unital of the dual plane.
Unital dual_unital(const Unital& u);

struct EmbedResult {
  // map[x] is the plane point carrying design point x.
  std::optional<std::vector<int>> map;
  // The search space was exhausted (no embedding exists) rather than cut
  // off by the budget.
  bool complete = false;
  std::uint64_t nodes = 0;
};

// Looks for an injection of the points of a 2-(q^3+1,q+1,1) design into a
// plane of order q^2 sending blocks into lines; the image is then a unital.
// Any witness is checked from scratch before it is returned. Throws
// Error(InvalidArgument) if d has the wrong parameters.
EmbedResult embed_design_in_plane(const IncidenceStructure& d, const ProjectivePlane& plane,
                                  const SearchBudget& budget);

}  // namespace unital
