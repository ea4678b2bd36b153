#include "unital/unitals.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "unital/autom.hpp"
#include "unital/error.hpp"

namespace unital {

int unital_parameter(const ProjectivePlane& plane) {
  int n = plane.order();
  int q = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (q < 2 || q * q != n)
    throw Error(Errc::NotSquareOrder, "plane order " + std::to_string(n) + " is not a square");
  return q;
}

UnitalCheck check_unital(const ProjectivePlane& plane, const std::vector<int>& pts) {
  int q = unital_parameter(plane);
  UnitalCheck res;
  int want = q * q * q + 1;
  Bits set(plane.num_points());
  for (int p : pts) {
    if (p < 0 || p >= plane.num_points()) {
      res.diagnostic = "point " + std::to_string(p) + " out of range";
      return res;
    }
    if (set.test(p)) {
      res.diagnostic = "point " + std::to_string(p) + " repeated";
      return res;
    }
    set.set(p);
  }
  if (static_cast<int>(pts.size()) != want) {
    res.diagnostic = "size " + std::to_string(pts.size()) + ", expected " + std::to_string(want);
    return res;
  }
  for (int l = 0; l < plane.num_lines(); ++l) {
    int m = static_cast<int>(plane.structure().row(l).count_and(set));
    if (m != 1 && m != q + 1) {
      res.line = l;
      res.meets = m;
      res.diagnostic = "line " + std::to_string(l) + " meets the set in " + std::to_string(m) + " points";
      return res;
    }
  }
  res.ok = true;
  return res;
}

bool is_unital(const ProjectivePlane& plane, const std::vector<int>& pts, std::string* diagnostic) {
  auto r = check_unital(plane, pts);
  if (diagnostic) *diagnostic = r.diagnostic;
  return r.ok;
}

Unital make_unital(PlanePtr plane, std::vector<int> pts) {
  auto r = check_unital(*plane, pts);
  if (!r.ok) throw Error(Errc::InvalidArgument, "not a unital: " + r.diagnostic);
  std::sort(pts.begin(), pts.end());
  Unital u;
  u.q = unital_parameter(*plane);
  u.plane = std::move(plane);
  u.points = std::move(pts);
  return u;
}

namespace {

std::vector<int> lines_meeting(const Unital& u, int size) {
  Bits set(u.plane->num_points());
  for (int p : u.points) set.set(p);
  std::vector<int> out;
  for (int l = 0; l < u.plane->num_lines(); ++l)
    if (static_cast<int>(u.plane->structure().row(l).count_and(set)) == size) out.push_back(l);
  return out;
}

}  // namespace

std::vector<int> secant_lines(const Unital& u) { return lines_meeting(u, u.q + 1); }
std::vector<int> tangent_lines(const Unital& u) { return lines_meeting(u, 1); }

IncidenceStructure design_from_unital(const Unital& u) {
  std::vector<int> index(u.plane->num_points(), -1);
  for (int i = 0; i < static_cast<int>(u.points.size()); ++i) index[u.points[i]] = i;
  std::vector<Block> blocks;
  for (int l : secant_lines(u)) {
    Block b;
    for (int p : u.plane->line(l))
      if (index[p] >= 0) b.push_back(index[p]);
    blocks.push_back(std::move(b));
  }
  return IncidenceStructure(static_cast<int>(u.points.size()), std::move(blocks));
}

Unital dual_unital(const Unital& u) {
  auto d = std::make_shared<const ProjectivePlane>(dual_plane(*u.plane));
  return make_unital(std::move(d), tangent_lines(u));
}

namespace {

// Backtracking embedding of a unital design into a plane. The first block
// and one point off it are seeded up to plane automorphisms; the rest is
// filled in most-constrained-first.
class Embedder {
public:
  Embedder(const IncidenceStructure& d, const ProjectivePlane& plane, const SearchBudget& budget)
      : d_(d), plane_(plane), budget_(budget), deadline_(budget.wall_clock_ms), v_(d.num_points()),
        f_(v_, -1), used_(plane.num_points(), -1), block_line_(d.num_blocks(), -1),
        block_count_(d.num_blocks(), 0), line_block_(plane.num_lines(), -1), on_known_(plane.num_points(), 0),
        free1_(plane.num_lines(), 0), known_(v_, 0), line_sum_(v_, 0),
        demand_stamp_(plane.num_lines(), 0), forced_stamp_(plane.num_points(), 0), demand_(plane.num_lines(), 0) {
    in_block_.assign(static_cast<std::size_t>(v_) * d.num_blocks(), 0);
    for (int b = 0; b < d.num_blocks(); ++b)
      for (int x : d.block(b)) in_block_[static_cast<std::size_t>(x) * d.num_blocks() + b] = 1;
    for (int x : d.block(0)) seed_.push_back(x);
    for (int x = 0; x < v_; ++x)
      if (!contains(x, 0)) {
        seed_.push_back(x);
        break;
      }
  }

  EmbedResult run() {
    EmbedResult res;
    std::vector<int> fixed;
    bool found = seed(0, false, fixed);
    res.nodes = nodes_;
    res.complete = !found && !stopped_;
    if (found) res.map = f_;
    return res;
  }

private:
  bool contains(int x, int b) const { return in_block_[static_cast<std::size_t>(x) * d_.num_blocks() + b]; }

  bool out_of_budget() {
    ++nodes_;
    if (static_cast<std::int64_t>(nodes_) > budget_.max_nodes || ((nodes_ & 1023) == 0 && deadline_.passed()))
      stopped_ = true;
    return stopped_;
  }

  struct Undo {
    int x;
    std::vector<int> new_lines;  // blocks whose line was fixed by this step
  };

  // A free plane point on exactly one known line is a slot of that line.
  bool slot(int P) const { return used_[P] < 0 && on_known_[P] == 1; }

  void bump_point(int P, int used, int delta_on) {
    bool before = slot(P);
    used_[P] = used;
    on_known_[P] += delta_on;
    bool after = slot(P);
    if (before != after)
      for (int l : plane_.lines_on(P)) free1_[l] += after ? 1 : -1;
  }

  void set_line(int b, int l) {
    block_line_[b] = l;
    line_block_[l] = b;
    for (int x : d_.block(b)) {
      ++known_[x];
      line_sum_[x] += l;
    }
    for (int P : plane_.line(l)) bump_point(P, used_[P], 1);
  }

  void clear_line(int b) {
    int l = block_line_[b];
    for (int P : plane_.line(l)) bump_point(P, used_[P], -1);
    for (int x : d_.block(b)) {
      --known_[x];
      line_sum_[x] -= l;
    }
    line_block_[l] = -1;
    block_line_[b] = -1;
  }

  // Maps x to P if consistent; records what to undo.
  bool assign(int x, int P, Undo& undo) {
    if (used_[P] >= 0) return false;
    for (int l : plane_.lines_on(P)) {
      int b = line_block_[l];
      if (b >= 0 && !contains(x, b)) return false;
    }
    undo.x = x;
    undo.new_lines.clear();
    for (int b : d_.blocks_on(x)) {
      if (block_line_[b] >= 0) {
        if (!plane_.incident(P, block_line_[b])) return fail(undo);
        continue;
      }
      if (block_count_[b] == 0) continue;
      int other = -1;
      for (int y : d_.block(b))
        if (f_[y] >= 0) {
          other = f_[y];
          break;
        }
      int l = plane_.join(P, other);
      if (line_block_[l] >= 0) return fail(undo);
      for (int p : plane_.line(l))
        if (used_[p] >= 0 && !contains(used_[p], b)) return fail(undo);
      set_line(b, l);
      undo.new_lines.push_back(b);
    }
    f_[x] = P;
    bump_point(P, x, 0);
    for (int b : d_.blocks_on(x)) ++block_count_[b];
    return true;
  }

  bool fail(Undo& undo) {
    for (auto it = undo.new_lines.rbegin(); it != undo.new_lines.rend(); ++it) clear_line(*it);
    undo.new_lines.clear();
    return false;
  }

  void unassign(Undo& undo) {
    int x = undo.x;
    for (int b : d_.blocks_on(x)) --block_count_[b];
    bump_point(f_[x], -1, 0);
    f_[x] = -1;
    fail(undo);
  }

  // Free plane points lying on every known line of a block through x and
  // on no known line of any other block.
  int meet_candidate(int x) const {
    int l0 = -1;
    for (int b : d_.blocks_on(x)) {
      int l = block_line_[b];
      if (l < 0) continue;
      if (l0 < 0) {
        l0 = l;
        continue;
      }
      int P = plane_.meet(l0, l);
      if (used_[P] >= 0 || on_known_[P] != known_[x]) return -1;
      for (int c : d_.blocks_on(x))
        if (block_line_[c] >= 0 && !plane_.incident(P, block_line_[c])) return -1;
      return P;
    }
    return -1;
  }

  std::vector<int> candidates(int x) const {
    int k = known_[x];
    std::vector<int> out;
    if (k >= 2) {
      int P = meet_candidate(x);
      if (P >= 0) out.push_back(P);
    } else if (k == 1) {
      for (int P : plane_.line(line_sum_[x]))
        if (slot(P)) out.push_back(P);
    } else {
      for (int P = 0; P < plane_.num_points(); ++P)
        if (used_[P] < 0 && on_known_[P] == 0) out.push_back(P);
    }
    return out;
  }

  // Seed levels: images of seed_[level] taken up to the pointwise stabilizer
  // of the images chosen so far. Once that stabilizer is trivial the
  // remaining seeds are handled by the general search.
  bool seed(std::size_t level, bool trivial, std::vector<int>& fixed) {
    if (level == seed_.size() || trivial) return fill();
    int x = seed_[level];
    PermGroup g;
    if (level == 0) {
      g = automorphism_group(plane_.structure());
    } else {
      const auto& s = plane_.structure();
      std::vector<int> color(s.num_points() + s.num_blocks(), static_cast<int>(fixed.size()));
      for (std::size_t i = 0; i < fixed.size(); ++i) color[fixed[i]] = static_cast<int>(i);
      for (int b = 0; b < s.num_blocks(); ++b) color[s.num_points() + b] = static_cast<int>(fixed.size()) + 1;
      g = automorphism_group(s, Coloring(s, std::move(color)));
    }
    bool now_trivial = g.generators().empty();
    auto orb = orbits(g);
    std::vector<int> rep_of(plane_.num_points());
    for (const auto& o : orb)
      for (int p : o) rep_of[p] = o.front();
    for (int P : candidates(x)) {
      if (rep_of[P] != P) continue;
      if (out_of_budget()) return false;
      Undo undo;
      if (!assign(x, P, undo)) continue;
      fixed.push_back(P);
      if (seed(level + 1, now_trivial, fixed)) return true;
      fixed.pop_back();
      unassign(undo);
      if (stopped_) return false;
    }
    return false;
  }

  // Every point with a known line is checked for a remaining image; the
  // one with fewest is branched on.
  bool fill() {
    int best = -1;
    int best_count = 0;
    ++stamp_;
    for (int x = 0; x < v_; ++x) {
      if (f_[x] >= 0 || known_[x] == 0) continue;
      int c;
      if (known_[x] == 1) {
        int l = line_sum_[x];
        if (demand_stamp_[l] != stamp_) demand_stamp_[l] = stamp_, demand_[l] = 0;
        c = free1_[l];
        if (++demand_[l] > c) return false;
      } else {
        int P = meet_candidate(x);
        if (P < 0 || forced_stamp_[P] == stamp_) return false;
        forced_stamp_[P] = stamp_;
        c = 1;
      }
      if (best < 0 || c < best_count) {
        best = x;
        best_count = c;
      }
    }
    if (best < 0) {
      int touched_max = -1;
      for (int x = 0; x < v_; ++x) {
        if (f_[x] >= 0) continue;
        int touched = 0;
        for (int b : d_.blocks_on(x)) touched += block_count_[b] > 0;
        if (touched > touched_max) {
          best = x;
          touched_max = touched;
        }
      }
      if (best < 0) return true;
    }
    for (int P : candidates(best)) {
      if (out_of_budget()) return false;
      Undo undo;
      if (!assign(best, P, undo)) continue;
      if (fill()) return true;
      unassign(undo);
      if (stopped_) return false;
    }
    return false;
  }

  const IncidenceStructure& d_;
  const ProjectivePlane& plane_;
  SearchBudget budget_;
  Deadline deadline_;
  int v_;
  std::vector<int> f_;
  std::vector<int> used_;
  std::vector<int> block_line_;
  std::vector<int> block_count_;
  std::vector<int> line_block_;
  std::vector<int> on_known_;   // known block lines through each plane point
  std::vector<int> free1_;      // slots on each line
  std::vector<int> known_;      // known lines among the blocks of each design point
  std::vector<int> line_sum_;   // sum of those lines, the line itself when known_ is 1
  std::vector<std::uint8_t> in_block_;
  std::uint64_t stamp_ = 0;
  std::vector<std::uint64_t> demand_stamp_, forced_stamp_;
  std::vector<int> demand_;  // design points whose only known line is this one
  std::vector<int> seed_;
  std::uint64_t nodes_ = 0;
  bool stopped_ = false;
};

}  // namespace

EmbedResult embed_design_in_plane(const IncidenceStructure& d, const ProjectivePlane& plane,
                                  const SearchBudget& budget) {
  int q = unital_parameter(plane);
  std::string why;
  if (d.num_points() != q * q * q + 1 || !verify_design(d, DesignParams::make(2, q * q * q + 1, q + 1, 1), &why))
    throw Error(Errc::InvalidArgument, "not a 2-(" + std::to_string(q * q * q + 1) + "," + std::to_string(q + 1) +
                                           ",1) design" + (why.empty() ? "" : ": " + why));
  auto res = Embedder(d, plane, budget).run();
  if (res.map) {
    const auto& map = *res.map;
    std::vector<int> image(map);
    bool ok = is_unital(plane, image);
    for (const auto& b : d.blocks()) {
      if (!ok) break;
      int l = plane.join(map[b[0]], map[b[1]]);
      for (int x : b) ok = ok && plane.incident(map[x], l);
    }
    if (!ok) throw std::logic_error("embedding search produced an invalid witness");
  }
  return res;
}

}  // namespace unital
