#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "unital/gf.hpp"
#include "unital/incidence.hpp"

namespace unital {

// Coordinates for PG(2,q): points and lines are the nonzero vectors of
// GF(q)^3 whose first nonzero entry is 1, listed in lexicographic order.
// Point x lies on line [a,b,c] iff a*x0 + b*x1 + c*x2 = 0.
struct DesarguesianModel {
  GaloisField field;
  std::vector<std::array<int, 3>> points;
  std::vector<std::array<int, 3>> lines;

  explicit DesarguesianModel(int q);

  // Index of the point spanned by v (v nonzero).
  int point_index(std::array<int, 3> v) const;
  // Blocks in line order.
  std::vector<Block> line_sets() const;

private:
  std::array<int, 3> normalize(std::array<int, 3> v) const;
  std::vector<int> index_;  // packed coordinates -> point index
};

// PG(2,q) named "PG(2,q)".
ProjectivePlane desarguesian_plane(int q);

// Translation plane over a quasifield on 0..n-1 with the given addition and
// multiplication tables (row-major n*n). Affine point (x,y) is x*n + y,
// slope m at infinity is n*n + m and the vertical direction is n*n + n.
// Lines are y = x*m + b, x = c and the line at infinity.
ProjectivePlane translation_plane(int n, const std::vector<int>& add, const std::vector<int>& mul,
                                  std::string name);

// Hall plane of order q^2 from the Hall quasifield over GF(q), using the
// first irreducible x^2 - r x - s over GF(q).
ProjectivePlane hall_plane(int q);

}  // namespace unital
