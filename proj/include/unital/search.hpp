#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "unital/analytics.hpp"
#include "unital/autom.hpp"
#include "unital/budget.hpp"
#include "unital/permgroup.hpp"
#include "unital/unitals.hpp"

namespace unital {

struct FoundUnital {
  Unital unital;
  Certificate certificate;  // of the unital's design
  // The H-orbits whose union is the unital, as indices into orbits(H).
  std::vector<int> orbits;
};

struct OrbitUnionSearch {
  std::vector<FoundUnital> found;  // sorted by certificate
  bool budget_exhausted = false;
  std::uint64_t nodes = 0;
};

// Unitals of the plane that are unions of orbits of h, one per design
// isomorphism class. Depth-first over the orbits by decreasing size; a
// branch dies once a line meets the union in more than q+1 points, or can
// no longer reach 1 or q+1, or the remaining orbit sizes cannot sum to the
// missing count. budget.max_nodes bounds the nodes visited.
OrbitUnionSearch search_orbit_unions(const PlanePtr& plane, const Subgroup& h, const SearchBudget& budget);

struct PlaneSearchHit {
  Unital unital;
  DesignReport report;
  std::vector<Permutation> subgroup_generators;
  std::size_t subgroup_order = 0;
};

struct PlaneSearch {
  std::vector<PlaneSearchHit> hits;  // sorted by design certificate
  bool budget_exhausted = false;
  std::uint64_t seed = 0;
  std::size_t subgroups_searched = 0;
};

// Subgroups of each order (found by enumerate_small_subgroups under the
// budget's seed) fed to search_orbit_unions; hits are deduplicated across
// subgroups by design certificate and analyzed. budget.wall_clock_ms bounds
// the whole run, budget.max_nodes each orbit-union search.
PlaneSearch search_plane(const PlanePtr& plane, const std::set<int>& orders, const SearchBudget& budget);

}  // namespace unital
