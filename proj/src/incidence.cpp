#include "unital/incidence.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "unital/error.hpp"

namespace unital {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Parse: return "Parse";
    case Errc::WrongCounts: return "WrongCounts";
    case Errc::PairCoverage: return "PairCoverage";
    case Errc::NotLinear: return "NotLinear";
    case Errc::EmptyStructure: return "EmptyStructure";
    case Errc::DegreeMismatch: return "DegreeMismatch";
    case Errc::NotSquareOrder: return "NotSquareOrder";
    case Errc::NotPrime: return "NotPrime";
    case Errc::NonUniformBlocks: return "NonUniformBlocks";
    case Errc::NotDivisible: return "NotDivisible";
    case Errc::UnknownFixture: return "UnknownFixture";
    case Errc::MissingPlaneData: return "MissingPlaneData";
  }
  return "Unknown";
}

IncidenceStructure::IncidenceStructure(int num_points, std::vector<Block> blocks)
    : IncidenceStructure(num_points, std::move(blocks), false) {}

IncidenceStructure IncidenceStructure::with_repeats(int num_points, std::vector<Block> blocks) {
  return IncidenceStructure(num_points, std::move(blocks), true);
}

IncidenceStructure::IncidenceStructure(int num_points, std::vector<Block> blocks, bool allow_repeats)
    : num_points_(num_points), blocks_(std::move(blocks)) {
  if (num_points < 0) throw Error(Errc::InvalidArgument, "negative point count");
  for (auto& b : blocks_) {
    std::sort(b.begin(), b.end());
    if (std::adjacent_find(b.begin(), b.end()) != b.end())
      throw Error(Errc::InvalidArgument, "point repeated inside a block");
    if (!b.empty() && (b.front() < 0 || b.back() >= num_points))
      throw Error(Errc::InvalidArgument, "block index out of range");
  }
  if (!allow_repeats) {
    std::vector<const Block*> order;
    order.reserve(blocks_.size());
    for (const auto& b : blocks_) order.push_back(&b);
    std::sort(order.begin(), order.end(), [](auto* x, auto* y) { return *x < *y; });
    for (std::size_t i = 1; i < order.size(); ++i)
      if (*order[i] == *order[i - 1]) throw Error(Errc::InvalidArgument, "repeated block");
  }
  rows_.reserve(blocks_.size());
  point_blocks_.assign(num_points, {});
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    Bits row(num_points);
    for (int p : blocks_[i]) {
      row.set(p);
      point_blocks_[p].push_back(static_cast<int>(i));
    }
    rows_.push_back(std::move(row));
  }
}

IncidenceStructure IncidenceStructure::with_sorted_blocks() const {
  auto blocks = blocks_;
  std::sort(blocks.begin(), blocks.end());
  return IncidenceStructure(num_points_, std::move(blocks));
}

IncidenceStructure IncidenceStructure::relabeled(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != num_points_)
    throw Error(Errc::DegreeMismatch, "relabeling has wrong size");
  std::vector<Block> blocks;
  blocks.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    Block nb;
    nb.reserve(b.size());
    for (int p : b) nb.push_back(perm[p]);
    blocks.push_back(std::move(nb));
  }
  return IncidenceStructure(num_points_, std::move(blocks));
}

namespace {

std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

DesignParams DesignParams::make(int t, int v, int k, int lambda) {
  if (t < 1 || v < 1 || k < 1 || lambda < 1 || k > v || t > k)
    throw Error(Errc::InvalidArgument, "design parameters out of range");
  const auto r_num = lambda * binomial(v - 1, t - 1);
  const auto r_den = binomial(k - 1, t - 1);
  const auto b_num = lambda * binomial(v, t);
  const auto b_den = binomial(k, t);
  if (r_num % r_den != 0 || b_num % b_den != 0) {
    std::ostringstream os;
    os << "no " << t << "-(" << v << "," << k << "," << lambda << ") design: r or b is not integral";
    throw Error(Errc::InvalidArgument, os.str());
  }
  DesignParams p;
  p.t = t;
  p.v = v;
  p.k = k;
  p.lambda = lambda;
  p.r = r_num / r_den;
  p.b = b_num / b_den;
  return p;
}

ProjectivePlane verify_plane(const IncidenceStructure& s, int n, std::string name) {
  if (n < 2) throw Error(Errc::InvalidArgument, "plane order must be at least 2");
  const int v = n * n + n + 1;
  std::ostringstream os;
  if (s.num_points() != v || s.num_blocks() != v) {
    os << "order " << n << " needs " << v << " points and lines, got " << s.num_points()
       << " points and " << s.num_blocks() << " lines";
    throw Error(Errc::WrongCounts, os.str());
  }
  for (int l = 0; l < v; ++l) {
    if (static_cast<int>(s.block(l).size()) != n + 1) {
      os << "line " << l + 1 << " has " << s.block(l).size() << " points, expected " << n + 1;
      throw Error(Errc::WrongCounts, os.str());
    }
  }

  ProjectivePlane plane;
  plane.join_.assign(static_cast<std::size_t>(v) * v, -1);
  for (int l = 0; l < v; ++l) {
    const auto& line = s.block(l);
    for (std::size_t i = 0; i < line.size(); ++i) {
      for (std::size_t j = i + 1; j < line.size(); ++j) {
        auto& a = plane.join_[static_cast<std::size_t>(line[i]) * v + line[j]];
        if (a != -1) {
          os << "points " << line[i] + 1 << " and " << line[j] + 1 << " lie on lines " << a + 1
             << " and " << l + 1;
          throw Error(Errc::PairCoverage, os.str());
        }
        a = static_cast<std::int16_t>(l);
        plane.join_[static_cast<std::size_t>(line[j]) * v + line[i]] = static_cast<std::int16_t>(l);
      }
    }
  }
  // v lines of n+1 points cover v*n(n+1)/2 = C(v,2) pairs at most once, so
  // every pair is covered; the scan below is kept for the diagnostic.
  for (int p = 0; p < v; ++p)
    for (int q = p + 1; q < v; ++q)
      if (plane.join_[static_cast<std::size_t>(p) * v + q] == -1) {
        os << "points " << p + 1 << " and " << q + 1 << " lie on no line";
        throw Error(Errc::PairCoverage, os.str());
      }

  plane.meet_.assign(static_cast<std::size_t>(v) * v, -1);
  for (int p = 0; p < v; ++p) {
    const auto& through = s.blocks_on(p);
    if (static_cast<int>(through.size()) != n + 1) {
      os << "point " << p + 1 << " is on " << through.size() << " lines, expected " << n + 1;
      throw Error(Errc::NotLinear, os.str());
    }
    for (std::size_t i = 0; i < through.size(); ++i)
      for (std::size_t j = i + 1; j < through.size(); ++j) {
        plane.meet_[static_cast<std::size_t>(through[i]) * v + through[j]] = static_cast<std::int16_t>(p);
        plane.meet_[static_cast<std::size_t>(through[j]) * v + through[i]] = static_cast<std::int16_t>(p);
      }
  }
  for (int l = 0; l < v; ++l)
    for (int m = l + 1; m < v; ++m)
      if (plane.meet_[static_cast<std::size_t>(l) * v + m] == -1) {
        os << "lines " << l + 1 << " and " << m + 1 << " do not meet";
        throw Error(Errc::NotLinear, os.str());
      }
  for (int p = 0; p < v; ++p) plane.join_[static_cast<std::size_t>(p) * v + p] = -1;

  plane.name_ = std::move(name);
  plane.order_ = n;
  plane.structure_ = s;
  return plane;
}

bool verify_design(const IncidenceStructure& s, const DesignParams& p, std::string* diagnostic) {
  auto fail = [&](const std::string& msg) {
    if (diagnostic) *diagnostic = msg;
    return false;
  };
  if (p.t != 2) return fail("only 2-designs are checked");
  if (s.num_points() != p.v) return fail("point count differs from v");
  if (s.num_blocks() != p.b)
    return fail("block count " + std::to_string(s.num_blocks()) + " differs from b = " + std::to_string(p.b));
  for (int i = 0; i < s.num_blocks(); ++i)
    if (static_cast<int>(s.block(i).size()) != p.k)
      return fail("block " + std::to_string(i + 1) + " has size " + std::to_string(s.block(i).size()));
  const int v = p.v;
  std::vector<int> cover(static_cast<std::size_t>(v) * v, 0);
  for (const auto& b : s.blocks())
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = i + 1; j < b.size(); ++j) ++cover[static_cast<std::size_t>(b[i]) * v + b[j]];
  for (int x = 0; x < v; ++x)
    for (int y = x + 1; y < v; ++y)
      if (cover[static_cast<std::size_t>(x) * v + y] != p.lambda)
        return fail("points " + std::to_string(x + 1) + " and " + std::to_string(y + 1) + " lie in " +
                    std::to_string(cover[static_cast<std::size_t>(x) * v + y]) + " blocks");
  for (int x = 0; x < v; ++x)
    if (static_cast<std::int64_t>(s.blocks_on(x).size()) != p.r)
      return fail("point " + std::to_string(x + 1) + " lies in " + std::to_string(s.blocks_on(x).size()) +
                  " blocks, r = " + std::to_string(p.r));
  return true;
}

IncidenceStructure dual(const IncidenceStructure& s) {
  if (s.num_points() == 0 || s.num_blocks() == 0)
    throw Error(Errc::EmptyStructure, "dual of a structure without points or blocks");
  std::vector<Block> blocks;
  blocks.reserve(s.num_points());
  for (int p = 0; p < s.num_points(); ++p) blocks.push_back(s.blocks_on(p));
  return IncidenceStructure::with_repeats(s.num_blocks(), std::move(blocks));
}

ProjectivePlane dual_plane(const ProjectivePlane& plane) {
  return verify_plane(dual(plane.structure()), plane.order(), plane.name() + "^T");
}

ZeroOneMatrix incidence_matrix(const IncidenceStructure& s) {
  ZeroOneMatrix m;
  m.rows = s.num_blocks();
  m.cols = s.num_points();
  m.data.assign(static_cast<std::size_t>(m.rows) * m.cols, 0);
  for (int i = 0; i < m.rows; ++i)
    for (int p : s.block(i)) m.at(i, p) = 1;
  return m;
}

}  // namespace unital
