#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unital/autom.hpp"
#include "unital/incidence.hpp"
#include "unital/permgroup.hpp"
#include "unital/unitals.hpp"

namespace unital {

// Rank over GF(p) by row reduction. Throws Error(NotPrime).
int p_rank(const ZeroOneMatrix& m, int p);

// Number of sets of pairwise disjoint blocks covering every point exactly
// once. Throws Error(NonUniformBlocks) or Error(NotDivisible) when no such
// set can have the right shape.
std::uint64_t parallel_classes(const IncidenceStructure& d);
// The classes themselves as sorted block index lists, in search order.
std::vector<std::vector<int>> list_parallel_classes(const IncidenceStructure& d);

struct DesignReport {
  std::string plane;
  std::string unital_id;
  // Collineations of the plane fixing the unital, and automorphisms of the
  // abstract design.
  BigInt stabilizer_order = 0;
  BigInt design_aut_order = 0;
  int p_rank_5 = 0;
  std::uint64_t parallel_classes = 0;
  std::uint64_t dual_parallel_classes = 0;
  Certificate certificate;       // design of the unital
  Certificate dual_certificate;  // design of the dual unital
  // "<plane>^T.<id>" of a report whose dual design is isomorphic to this
  // design; filled by match_partners.
  std::optional<std::string> isomorphic_partner;

  bool orders_agree() const { return stabilizer_order == design_aut_order; }
};

DesignReport analyze(const Unital& u, std::string unital_id = {});

// Sets isomorphic_partner on every report whose certificate equals the dual
// certificate of some report (itself included). Earliest match wins.
void match_partners(std::vector<DesignReport>& reports);

// Distinct certificates among the designs and, unless include_duals is
// false, the dual designs.
std::size_t count_distinct_designs(const std::vector<DesignReport>& reports, bool include_duals = true);

}  // namespace unital
