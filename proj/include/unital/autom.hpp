#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unital/incidence.hpp"
#include "unital/permgroup.hpp"

namespace unital {

// Vertex colors on the point-block incidence graph: entries 0..v-1 are the
// points, v..v+b-1 the blocks. Points and blocks never share a color and the
// colors used are exactly 0..k-1.
class Coloring {
public:
  Coloring() = default;
  // Throws Error(InvalidArgument) if the vector has the wrong length, a
  // color is shared between a point and a block, or the range has gaps.
  Coloring(const IncidenceStructure& s, std::vector<int> color);

  // Points 0, blocks 1.
  static Coloring uniform(const IncidenceStructure& s);
  // Points in pts share one color; then the other points, then blocks.
  // With pts empty this is the uniform coloring.
  static Coloring marked_points(const IncidenceStructure& s, const std::vector<int>& pts);

  const std::vector<int>& colors() const { return color_; }
  int operator[](int vertex) const { return color_[vertex]; }
  int num_colors() const { return num_colors_; }

  friend bool operator==(const Coloring&, const Coloring&) = default;

private:
  std::vector<int> color_;
  int num_colors_ = 0;
};

// Coarsest equitable coloring refining c. Colors are numbered by the
// position of their cell in the refined ordered partition, so the result
// does not depend on how s is labeled.
Coloring refine(const IncidenceStructure& s, const Coloring& c);

struct Certificate {
  std::vector<std::uint8_t> bytes;

  std::string hex() const;
  static Certificate from_hex(const std::string& hex);

  friend bool operator==(const Certificate&, const Certificate&) = default;
  friend auto operator<=>(const Certificate&, const Certificate&) = default;
};

inline constexpr std::uint8_t kCertificateVersion = 1;

struct CanonicalResult {
  Certificate certificate;
  // canonical_point[p] is the position of point p in the canonical order;
  // likewise for blocks.
  std::vector<int> canonical_point;
  std::vector<int> canonical_block;
  // Color-preserving automorphisms as point permutations.
  std::vector<Permutation> generators;
  // Group order read off the search tree.
  BigInt order = 1;
  std::uint64_t nodes = 0;
  // Extra invariants that took part: bit 0 the quadrangle count on the
  // points of a partial linear space, bit 1 the non-Fano quadrangle count
  // used inside the search on projective planes.
  std::uint8_t invariants = 0;
};

struct CanonicalOptions {
  // Also compute the canonical labeling and certificate. Without it the
  // search only collects automorphisms.
  bool canonical = true;
  // Apply the extra invariants above where they are defined. They change
  // certificates, never groups.
  bool use_invariant = true;
};

CanonicalResult canonical_search(const IncidenceStructure& s, const Coloring& c,
                                 const CanonicalOptions& options = {});

// Full color-preserving automorphism group, acting on points. Every
// generator is checked against the block list before it is returned.
PermGroup automorphism_group(const IncidenceStructure& s, const Coloring& c);
inline PermGroup automorphism_group(const IncidenceStructure& s) {
  return automorphism_group(s, Coloring::uniform(s));
}

Certificate canonical_certificate(const IncidenceStructure& s, const Coloring& c);
inline Certificate canonical_certificate(const IncidenceStructure& s) {
  return canonical_certificate(s, Coloring::uniform(s));
}

// True iff g maps every block of s onto a block of s (with multiplicity).
bool preserves_blocks(const IncidenceStructure& s, const Permutation& g);

// A point bijection carrying the blocks of a onto those of b, checked block
// by block, or nothing when the uniformly colored structures are not
// isomorphic.
std::optional<Permutation> is_isomorphic(const IncidenceStructure& a, const IncidenceStructure& b);

// Collineations of the plane fixing pts setwise.
PermGroup setwise_stabilizer(const ProjectivePlane& plane, const std::vector<int>& pts);

}  // namespace unital
