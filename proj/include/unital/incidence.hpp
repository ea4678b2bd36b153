#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "unital/bits.hpp"

namespace unital {

using Block = std::vector<int>;

// Finite incidence structure on points 0..num_points-1. Blocks are kept in
// the order given, each one sorted; the bit rows mirror the block lists.
class IncidenceStructure {
public:
  IncidenceStructure() = default;

  // Sorts every block. Throws Error(InvalidArgument) for out-of-range
  // indices, a point repeated inside a block, or a repeated block.
  IncidenceStructure(int num_points, std::vector<Block> blocks);

  // As above but repeated blocks are kept. Used for duals of structures
  // whose points have identical block sets.
  static IncidenceStructure with_repeats(int num_points, std::vector<Block> blocks);

  int num_points() const { return num_points_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }

  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& block(int i) const { return blocks_[i]; }
  const Bits& row(int i) const { return rows_[i]; }

  // Blocks through point p, increasing.
  const std::vector<int>& blocks_on(int p) const { return point_blocks_[p]; }

  // Same structure with the block list sorted lexicographically.
  IncidenceStructure with_sorted_blocks() const;

  // Relabels point p as perm[p]; block order is kept.
  IncidenceStructure relabeled(const std::vector<int>& perm) const;

  friend bool operator==(const IncidenceStructure& a, const IncidenceStructure& b) {
    return a.num_points_ == b.num_points_ && a.blocks_ == b.blocks_;
  }

private:
  IncidenceStructure(int num_points, std::vector<Block> blocks, bool allow_repeats);

  int num_points_ = 0;
  std::vector<Block> blocks_;
  std::vector<Bits> rows_;
  std::vector<std::vector<int>> point_blocks_;
};

// Parameters of a t-(v,k,lambda) design together with the derived
// replication number r and block count b.
struct DesignParams {
  int t = 2;
  int v = 0;
  int k = 0;
  int lambda = 1;
  std::int64_t r = 0;
  std::int64_t b = 0;

  // r = lambda * C(v-1,t-1) / C(k-1,t-1), b = lambda * C(v,t) / C(k,t);
  // for t = 2 these are lambda(v-1)/(k-1) and v*r/k. Throws if either
  // division is inexact or the parameters are out of range.
  static DesignParams make(int t, int v, int k, int lambda);
};

// Dense 0/1 matrix, row-major.
struct ZeroOneMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> data;

  std::uint8_t at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  std::uint8_t& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
};

// A validated projective plane of order n with join/meet lookup tables.
class ProjectivePlane {
public:
  const std::string& name() const { return name_; }
  int order() const { return order_; }
  int num_points() const { return structure_.num_points(); }
  int num_lines() const { return structure_.num_blocks(); }
  const IncidenceStructure& structure() const { return structure_; }
  const Block& line(int l) const { return structure_.block(l); }
  const std::vector<int>& lines_on(int p) const { return structure_.blocks_on(p); }

  int join(int p, int q) const { return join_[static_cast<std::size_t>(p) * num_points() + q]; }
  int meet(int l, int m) const { return meet_[static_cast<std::size_t>(l) * num_lines() + m]; }
  bool incident(int p, int l) const { return structure_.row(l).test(p); }

private:
  friend ProjectivePlane verify_plane(const IncidenceStructure&, int, std::string);
  std::string name_;
  int order_ = 0;
  IncidenceStructure structure_;
  std::vector<std::int16_t> join_;
  std::vector<std::int16_t> meet_;
};

using PlanePtr = std::shared_ptr<const ProjectivePlane>;

// Validates s as a projective plane of order n. Throws Error with code
// WrongCounts (point/line/line-size mismatch), PairCoverage (a point pair
// on zero or several lines; the message names the pair) or NotLinear (two
// lines not meeting in exactly one point).
ProjectivePlane verify_plane(const IncidenceStructure& s, int n, std::string name = {});

// True iff s is a 2-(v,k,lambda) design matching p, including the counts r
// and b. On failure the first violation is written to *diagnostic.
bool verify_design(const IncidenceStructure& s, const DesignParams& p,
                   std::string* diagnostic = nullptr);

// Transpose: point j of the result is block j of s. Throws
// Error(EmptyStructure) when s has no points or no blocks.
IncidenceStructure dual(const IncidenceStructure& s);

// Dual plane; the name gets a "^T" suffix.
ProjectivePlane dual_plane(const ProjectivePlane& plane);

ZeroOneMatrix incidence_matrix(const IncidenceStructure& s);

}  // namespace unital
