#include "unital/autom.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <unordered_map>

#include "unital/error.hpp"

namespace unital {

Coloring::Coloring(const IncidenceStructure& s, std::vector<int> color) : color_(std::move(color)) {
  const int v = s.num_points();
  const int n = v + s.num_blocks();
  if (static_cast<int>(color_.size()) != n)
    throw Error(Errc::InvalidArgument, "coloring length " + std::to_string(color_.size()) + ", expected " +
                                           std::to_string(n));
  // 1 = used by a point, 2 = used by a block
  std::vector<int> side;
  for (int i = 0; i < n; ++i) {
    const int c = color_[i];
    if (c < 0 || c >= n) throw Error(Errc::InvalidArgument, "color out of range");
    if (static_cast<int>(side.size()) <= c) side.resize(c + 1, 0);
    side[c] |= i < v ? 1 : 2;
  }
  for (std::size_t c = 0; c < side.size(); ++c) {
    if (side[c] == 0) throw Error(Errc::InvalidArgument, "colors are not contiguous from 0");
    if (side[c] == 3) throw Error(Errc::InvalidArgument, "color " + std::to_string(c) + " used by a point and a block");
  }
  num_colors_ = static_cast<int>(side.size());
}

Coloring Coloring::uniform(const IncidenceStructure& s) { return marked_points(s, {}); }

Coloring Coloring::marked_points(const IncidenceStructure& s, const std::vector<int>& pts) {
  const int v = s.num_points();
  std::vector<char> mark(v, 0);
  for (int p : pts) {
    if (p < 0 || p >= v) throw Error(Errc::InvalidArgument, "marked point out of range");
    mark[p] = 1;
  }
  const bool any_marked = std::find(mark.begin(), mark.end(), 1) != mark.end();
  const bool any_unmarked = std::find(mark.begin(), mark.end(), 0) != mark.end();
  std::vector<int> color(v + s.num_blocks());
  int next = 0;
  const int marked_color = any_marked ? next++ : -1;
  const int other_color = any_unmarked ? next++ : -1;
  for (int p = 0; p < v; ++p) color[p] = mark[p] ? marked_color : other_color;
  for (int b = 0; b < s.num_blocks(); ++b) color[v + b] = next;
  return Coloring(s, std::move(color));
}

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t x) {
  h += x + 0x9e3779b97f4a7c15ULL;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

// Ordered partition of the vertices. Cells occupy contiguous ranges of lab;
// a cell is named by its first position.
struct Partition {
  std::vector<int> lab;         // position -> vertex
  std::vector<int> pos;         // vertex -> position
  std::vector<int> cell_start;  // position -> first position of its cell
  std::vector<int> cell_end;    // first position -> one past the last
  int cells = 0;

  int cell_of(int vertex) const { return cell_start[pos[vertex]]; }
  bool discrete() const { return cells == static_cast<int>(lab.size()); }
};

// Bipartite point-block graph in adjacency-list form.
struct Graph {
  int v = 0;
  int n = 0;
  std::vector<int> start;
  std::vector<int> adj;

  explicit Graph(const IncidenceStructure& s) : v(s.num_points()), n(s.num_points() + s.num_blocks()) {
    std::vector<std::vector<int>> lists(n);
    for (int b = 0; b < s.num_blocks(); ++b)
      for (int p : s.block(b)) {
        lists[p].push_back(v + b);
        lists[v + b].push_back(p);
      }
    start.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) start[i + 1] = start[i] + static_cast<int>(lists[i].size());
    adj.reserve(start[n]);
    for (auto& l : lists) adj.insert(adj.end(), l.begin(), l.end());
  }
};

// Event log of a refinement, optionally compared on the fly with a reference
// log. Events are order-sensitive hashes of the splits performed; they only
// depend on the isomorphism class of the partitioned graph.
class Trace {
public:
  enum class Stop { Never, OnDifference, OnGreater };

  Trace(std::vector<std::uint64_t>& events, const std::vector<std::uint64_t>* ref = nullptr,
        Stop stop = Stop::Never)
      : events_(events), ref_(ref), stop_(ref ? stop : Stop::Never) {
    events_.clear();
  }

  void add(std::uint64_t e) {
    if (cmp_ == 0 && ref_) {
      const std::size_t i = events_.size();
      if (i >= ref_->size())
        cmp_ = 1;
      else if (e != (*ref_)[i])
        cmp_ = e < (*ref_)[i] ? -1 : 1;
    }
    events_.push_back(e);
  }
  bool stopped() const {
    return (stop_ == Stop::OnDifference && cmp_ != 0) || (stop_ == Stop::OnGreater && cmp_ > 0);
  }
  // Lexicographic comparison with the reference, a proper prefix being
  // smaller. Only meaningful when the refinement ran to the end.
  int compare() const {
    if (cmp_ == 0 && ref_ && events_.size() < ref_->size()) return -1;
    return cmp_;
  }

private:
  std::vector<std::uint64_t>& events_;
  const std::vector<std::uint64_t>* ref_;
  Stop stop_;
  int cmp_ = 0;
};

class Refiner {
public:
  explicit Refiner(const Graph& g)
      : g_(g), count_(g.n, 0), cell_hits_(g.n, 0), queued_(g.n, 0) {}

  Partition initial(const std::vector<int>& color) const {
    Partition p;
    const int n = g_.n;
    p.lab.resize(n);
    std::iota(p.lab.begin(), p.lab.end(), 0);
    std::stable_sort(p.lab.begin(), p.lab.end(), [&](int a, int b) { return color[a] < color[b]; });
    p.pos.resize(n);
    p.cell_start.resize(n);
    p.cell_end.assign(n, 0);
    for (int i = 0; i < n; ++i) p.pos[p.lab[i]] = i;
    int s = 0;
    for (int i = 1; i <= n; ++i) {
      if (i == n || color[p.lab[i]] != color[p.lab[s]]) {
        for (int j = s; j < i; ++j) p.cell_start[j] = s;
        p.cell_end[s] = i;
        ++p.cells;
        s = i;
      }
    }
    return p;
  }

  // Splits p until it is equitable, starting from the given splitter cells.
  // Returns false if the trace asked to stop early; p is then unusable.
  bool refine(Partition& p, const std::vector<int>& splitters, Trace& trace) {
    queue_.clear();
    std::size_t head = 0;
    for (int c : splitters)
      if (!queued_[c]) {
        queued_[c] = 1;
        queue_.push_back(c);
      }
    bool completed = true;
    while (head < queue_.size() && !p.discrete()) {
      const int w = queue_[head++];
      queued_[w] = 0;
      touched_.clear();
      const int wend = p.cell_end[w];
      for (int i = w; i < wend; ++i) {
        const int x = p.lab[i];
        for (int e = g_.start[x]; e < g_.start[x + 1]; ++e) {
          const int y = g_.adj[e];
          if (count_[y]++ == 0) touched_.push_back(y);
        }
      }
      touched_cells_.clear();
      for (int y : touched_) {
        const int c = p.cell_of(y);
        if (cell_hits_[c]++ == 0) touched_cells_.push_back(c);
      }
      std::sort(touched_cells_.begin(), touched_cells_.end());
      for (int c : touched_cells_) {
        const int end = p.cell_end[c];
        const int hits = cell_hits_[c];
        cell_hits_[c] = 0;
        if (!completed || end - c == 1) continue;
        if (hits == end - c) {
          const int first = count_[p.lab[c]];
          bool same = true;
          for (int i = c + 1; i < end && same; ++i) same = count_[p.lab[i]] == first;
          if (same) continue;
        }
        trace.add(split_cell(p, c, end, w));
        if (trace.stopped()) completed = false;
      }
      for (int y : touched_) count_[y] = 0;
      if (!completed) break;
    }
    for (std::size_t i = head; i < queue_.size(); ++i) queued_[queue_[i]] = 0;
    queue_.clear();
    if (completed) trace.add(mix(0xce11, static_cast<std::uint64_t>(p.cells)));
    return completed && !trace.stopped();
  }

  // Splits cell c by an external key, fragments in ascending key order.
  // Returns true if the cell was split.
  bool split_by_key(Partition& p, int c, const std::vector<std::uint64_t>& key, Trace& trace) {
    const int end = p.cell_end[c];
    std::sort(p.lab.begin() + c, p.lab.begin() + end, [&](int a, int b) {
      return key[a] != key[b] ? key[a] < key[b] : a < b;
    });
    std::uint64_t h = mix(0x5e7, static_cast<std::uint64_t>(c));
    int s = c;
    int pieces = 0;
    for (int i = c + 1; i <= end; ++i) {
      if (i == end || key[p.lab[i]] != key[p.lab[s]]) {
        for (int j = s; j < i; ++j) {
          p.pos[p.lab[j]] = j;
          p.cell_start[j] = s;
        }
        p.cell_end[s] = i;
        h = mix(mix(h, key[p.lab[s]]), static_cast<std::uint64_t>(i - s));
        ++pieces;
        s = i;
      }
    }
    p.cells += pieces - 1;
    trace.add(h);
    return pieces > 1;
  }

private:
  std::uint64_t split_cell(Partition& p, int c, int end, int splitter) {
    std::sort(p.lab.begin() + c, p.lab.begin() + end, [&](int a, int b) {
      return count_[a] != count_[b] ? count_[a] < count_[b] : a < b;
    });
    std::uint64_t h = mix(static_cast<std::uint64_t>(splitter), static_cast<std::uint64_t>(c));
    const bool parent_queued = queued_[c] != 0;
    int largest = c, largest_size = 0;
    frags_.clear();
    int s = c;
    for (int i = c + 1; i <= end; ++i) {
      if (i == end || count_[p.lab[i]] != count_[p.lab[s]]) {
        for (int j = s; j < i; ++j) {
          p.pos[p.lab[j]] = j;
          p.cell_start[j] = s;
        }
        p.cell_end[s] = i;
        h = mix(mix(h, static_cast<std::uint64_t>(count_[p.lab[s]])), static_cast<std::uint64_t>(i - s));
        if (i - s > largest_size) {
          largest_size = i - s;
          largest = s;
        }
        frags_.push_back(s);
        s = i;
      }
    }
    p.cells += static_cast<int>(frags_.size()) - 1;
    for (int f : frags_) {
      if (parent_queued ? f == c : f == largest) continue;
      if (!queued_[f]) {
        queued_[f] = 1;
        queue_.push_back(f);
      }
    }
    return h;
  }

  const Graph& g_;
  std::vector<int> count_;
  std::vector<int> cell_hits_;
  std::vector<char> queued_;
  std::vector<int> queue_;
  std::vector<int> touched_;
  std::vector<int> touched_cells_;
  std::vector<int> frags_;
};

std::vector<int> all_cells(const Partition& p) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(p.lab.size()); i = p.cell_end[i]) out.push_back(i);
  return out;
}

// Per-point counts of complete quadrangles: for point x and two blocks B1, B2
// through x, the number of pairs of transversals (lines y z and y' z' with
// y, y' on B1 and z, z' on B2, all distinct from x) that meet. The multiset
// over block pairs is hashed. Empty result when s is not a partial linear
// space or every pair of blocks meets.
std::vector<std::uint64_t> quadrangle_invariant(const IncidenceStructure& s) {
  const int v = s.num_points();
  const int b = s.num_blocks();
  if (v == 0 || b < 2 || v > 4096 || b > 4096) return {};
  std::vector<int> join(static_cast<std::size_t>(v) * v, -1);
  for (int l = 0; l < b; ++l) {
    const auto& blk = s.block(l);
    for (std::size_t i = 0; i < blk.size(); ++i)
      for (std::size_t j = i + 1; j < blk.size(); ++j) {
        auto& a = join[static_cast<std::size_t>(blk[i]) * v + blk[j]];
        if (a >= 0) return {};
        a = l;
        join[static_cast<std::size_t>(blk[j]) * v + blk[i]] = l;
      }
  }
  std::vector<char> meets(static_cast<std::size_t>(b) * b, 0);
  bool some_disjoint = false;
  for (int l = 0; l < b; ++l)
    for (int m = l; m < b; ++m) {
      const bool x = s.row(l).intersects(s.row(m));
      meets[static_cast<std::size_t>(l) * b + m] = meets[static_cast<std::size_t>(m) * b + l] = x;
      some_disjoint |= !x;
    }
  if (!some_disjoint) return {};

  std::vector<std::uint64_t> out(v);
  std::vector<int> values;
  struct Transversal {
    int y, z, line;
  };
  std::vector<Transversal> ts;
  for (int x = 0; x < v; ++x) {
    const auto& through = s.blocks_on(x);
    values.clear();
    for (std::size_t i = 0; i < through.size(); ++i)
      for (std::size_t j = i + 1; j < through.size(); ++j) {
        ts.clear();
        for (int y : s.block(through[i])) {
          if (y == x) continue;
          for (int z : s.block(through[j])) {
            if (z == x) continue;
            const int l = join[static_cast<std::size_t>(y) * v + z];
            if (l >= 0) ts.push_back({y, z, l});
          }
        }
        int c = 0;
        for (std::size_t a = 0; a < ts.size(); ++a)
          for (std::size_t d = a + 1; d < ts.size(); ++d)
            if (ts[a].y != ts[d].y && ts[a].z != ts[d].z && meets[static_cast<std::size_t>(ts[a].line) * b + ts[d].line])
              ++c;
        values.push_back(c);
      }
    std::sort(values.begin(), values.end());
    std::uint64_t h = mix(0, values.size());
    for (int c : values) h = mix(h, static_cast<std::uint64_t>(c));
    out[x] = h;
  }
  return out;
}

// Join and meet tables of a projective plane.
struct PlaneTables {
  int v = 0;
  std::vector<std::int16_t> join;
  std::vector<std::int16_t> meet;
  std::vector<std::uint8_t> inc;

  // Tables for s if it is a projective plane of order >= 2 with at most
  // 2048 points.
  static std::optional<PlaneTables> detect(const IncidenceStructure& s) {
    const int v = s.num_points();
    if (v < 7 || v > 2048 || s.num_blocks() != v) return std::nullopt;
    const int k = static_cast<int>(s.block(0).size());
    const int n = k - 1;
    if (n * n + n + 1 != v) return std::nullopt;
    PlaneTables t;
    t.v = v;
    t.join.assign(static_cast<std::size_t>(v) * v, -1);
    t.meet.assign(static_cast<std::size_t>(v) * v, -1);
    t.inc.assign(static_cast<std::size_t>(v) * v, 0);
    for (int l = 0; l < v; ++l) {
      const auto& b = s.block(l);
      if (static_cast<int>(b.size()) != k) return std::nullopt;
      for (std::size_t i = 0; i < b.size(); ++i) {
        t.inc[static_cast<std::size_t>(b[i]) * v + l] = 1;
        for (std::size_t j = i + 1; j < b.size(); ++j) {
          auto& e = t.join[static_cast<std::size_t>(b[i]) * v + b[j]];
          if (e >= 0) return std::nullopt;
          e = static_cast<std::int16_t>(l);
          t.join[static_cast<std::size_t>(b[j]) * v + b[i]] = static_cast<std::int16_t>(l);
        }
      }
    }
    for (int p = 0; p < v; ++p) {
      const auto& ls = s.blocks_on(p);
      for (std::size_t i = 0; i < ls.size(); ++i)
        for (std::size_t j = i + 1; j < ls.size(); ++j) {
          auto& e = t.meet[static_cast<std::size_t>(ls[i]) * v + ls[j]];
          if (e >= 0) return std::nullopt;
          e = static_cast<std::int16_t>(p);
          t.meet[static_cast<std::size_t>(ls[j]) * v + ls[i]] = static_cast<std::int16_t>(p);
        }
    }
    return t;
  }

  int j(int a, int b) const { return join[static_cast<std::size_t>(a) * v + b]; }
  int m(int a, int b) const { return meet[static_cast<std::size_t>(a) * v + b]; }

  // Number of points y such that a, b, x, y form a quadrangle whose three
  // diagonal points are not collinear.
  int non_fano(int a, int b, int x) const {
    if (a == b || a == x || b == x) return 0;
    const int ab = j(a, b), ax = j(a, x), bx = j(b, x);
    if (ab == ax) return 0;
    int count = 0;
    for (int y = 0; y < v; ++y) {
      if (y == a || y == b || y == x) continue;
      const int ay = j(a, y), by = j(b, y);
      if (ay == ab || ay == ax || by == bx) continue;
      const int d1 = m(ab, j(x, y)), d2 = m(ax, by), d3 = m(ay, bx);
      if (!inc[static_cast<std::size_t>(d3) * v + j(d1, d2)]) ++count;
    }
    return count;
  }
};

class Search {
public:
  Search(const IncidenceStructure& s, const Coloring& c, const CanonicalOptions& opt)
      : s_(s), g_(s), refiner_(g_), opt_(opt), words_((s.num_points() + 63) / 64) {
    if (static_cast<int>(c.colors().size()) != g_.n)
      throw Error(Errc::InvalidArgument, "coloring does not match the structure");
    colors_ = c.colors();
    if (opt_.use_invariant) plane_ = PlaneTables::detect(s);
  }

  CanonicalResult run() {
    CanonicalResult res;
    Partition root = refiner_.initial(colors_);
    std::vector<std::uint64_t> events;
    Trace trace(events);
    refiner_.refine(root, all_cells(root), trace);
    if (opt_.use_invariant && !root.discrete()) {
      auto inv = quadrangle_invariant(s_);
      if (!inv.empty()) {
        std::vector<std::uint64_t> key(g_.n, 0);
        for (int x = 0; x < g_.v; ++x) key[x] = inv[x];
        bool split = false;
        for (int cstart : all_cells(root))
          if (root.lab[cstart] < g_.v && root.cell_end[cstart] - cstart > 1)
            split |= refiner_.split_by_key(root, cstart, key, trace);
        res.invariants |= 1;
        if (split) refiner_.refine(root, all_cells(root), trace);
      }
    }
    levels_.assign(1, root);
    traces_.assign(1, events);
    path_.clear();
    nodes_ = 0;
    order_ = 1;
    explore(0);

    if (plane_) res.invariants |= 2;
    res.order = order_;
    res.nodes = nodes_;
    for (const auto& a : auts_) {
      std::vector<int> pts(a.begin(), a.begin() + g_.v);
      Permutation perm(std::move(pts));
      if (!perm.is_identity()) res.generators.push_back(std::move(perm));
    }
    if (opt_.canonical) {
      const auto& lab = best_lab_;
      res.canonical_point.assign(g_.v, 0);
      res.canonical_block.assign(g_.n - g_.v, 0);
      int np = 0, nb = 0;
      for (int x : lab) {
        if (x < g_.v)
          res.canonical_point[x] = np++;
        else
          res.canonical_block[x - g_.v] = nb++;
      }
      res.certificate = make_certificate(res);
    }
    return res;
  }

private:
  // On projective planes, splits the point cells by non-Fano quadrangle
  // counts relative to the last individualized point paired with up to three
  // earlier ones, then refines again. Returns false if the trace stopped.
  bool plane_invariant(Partition& p, Trace& trace) {
    if (!plane_ || p.discrete()) return true;
    std::vector<int> pts;
    for (int x : path_)
      if (x < g_.v) pts.push_back(x);
    if (pts.size() < 2) return true;
    const int last = pts.back();
    const std::size_t from = pts.size() >= 5 ? pts.size() - 4 : 0;
    key_.assign(g_.n, 0);
    std::vector<int> cells;
    for (int c : all_cells(p))
      if (p.lab[c] < g_.v && p.cell_end[c] - c > 1) cells.push_back(c);
    for (int c : cells)
      for (int i = c; i < p.cell_end[c]; ++i) {
        const int x = p.lab[i];
        std::uint64_t h = 0;
        for (std::size_t j = from; j + 1 < pts.size(); ++j)
          h = mix(h, static_cast<std::uint64_t>(plane_->non_fano(pts[j], last, x)));
        key_[x] = h;
      }
    bool split = false;
    for (int c : cells) {
      split |= refiner_.split_by_key(p, c, key_, trace);
      if (trace.stopped()) return false;
    }
    if (split && !refiner_.refine(p, all_cells(p), trace)) return false;
    return !trace.stopped();
  }

  // Compares traces_[0..depth] with a reference trace sequence. A reference
  // that ends earlier with an equal prefix counts as smaller.
  int compare_trace(const std::vector<std::vector<std::uint64_t>>& ref, int depth) const {
    for (int d = 0; d <= depth; ++d) {
      if (d >= static_cast<int>(ref.size())) return 1;
      if (traces_[d] != ref[d]) return traces_[d] < ref[d] ? -1 : 1;
    }
    return 0;
  }

  int explore(int depth) {
    ++nodes_;
    Partition& part = levels_[depth];

    if (part.discrete()) {
      leaf(depth);
      return jump_;
    }

    const int target = target_cell(part);
    std::vector<int> children(part.lab.begin() + target, part.lab.begin() + part.cell_end[target]);
    std::sort(children.begin(), children.end());

    const bool on_first = on_first_path(depth);
    std::vector<int> parent;
    std::size_t known_auts = static_cast<std::size_t>(-1);
    auto refresh_orbits = [&] {
      if (known_auts == auts_.size()) return;
      known_auts = auts_.size();
      parent.resize(g_.n);
      std::iota(parent.begin(), parent.end(), 0);
      for (const auto& a : auts_) {
        bool fixes = true;
        for (int d = 0; d < depth && fixes; ++d) fixes = a[path_[d]] == path_[d];
        if (!fixes) continue;
        for (int x : children) {
          int r1 = find(parent, x), r2 = find(parent, a[x]);
          if (r1 != r2) parent[std::max(r1, r2)] = std::min(r1, r2);
        }
      }
    };

    if (static_cast<int>(levels_.size()) <= depth + 1) {
      levels_.resize(depth + 2);
      traces_.resize(depth + 2);
    }
    path_.resize(depth + 1);
    for (int u : children) {
      refresh_orbits();
      if (find(parent, u) != u) continue;
      path_[depth] = u;
      Partition& next = levels_[depth + 1];
      next = levels_[depth];
      individualize(next, u);

      // Compare the child's refinement with the reference path while it runs
      // so hopeless children are dropped early.
      const std::vector<std::vector<std::uint64_t>>* ref_path = nullptr;
      Trace::Stop stop = Trace::Stop::Never;
      if (have_first_) {
        if (!opt_.canonical) {
          ref_path = &first_trace_;
          stop = Trace::Stop::OnDifference;
        } else if (compare_trace(best_trace_, depth) == 0) {
          ref_path = &best_trace_;
          stop = Trace::Stop::OnGreater;
        }
      }
      bool prune = false;
      const std::vector<std::uint64_t>* ref = nullptr;
      if (ref_path) {
        if (depth + 1 < static_cast<int>(ref_path->size()))
          ref = &(*ref_path)[depth + 1];
        else
          prune = true;
      }
      if (!prune) {
        Trace trace(traces_[depth + 1], ref, stop);
        if (!refiner_.refine(next, {next.cell_of(u)}, trace) || !plane_invariant(next, trace))
          prune = true;
        else if (ref)
          prune = opt_.canonical ? trace.compare() > 0 : trace.compare() != 0;
      }
      int back = depth;
      if (!prune) back = explore(depth + 1);
      path_.resize(depth + 1);
      if (back < depth) return back;
    }

    if (on_first) {
      refresh_orbits();
      const int first_child = children.front();
      std::size_t orbit = 0;
      const int root = find(parent, first_child);
      for (int x : children)
        if (find(parent, x) == root) ++orbit;
      order_ *= orbit;
    }
    return depth - 1;
  }

  static int find(std::vector<int>& parent, int x) {
    if (parent.empty()) return x;
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }

  bool on_first_path(int depth) const {
    if (!have_first_) return true;
    for (int d = 0; d < depth; ++d)
      if (path_[d] != first_path_[d]) return false;
    return true;
  }

  // First largest non-singleton point cell; block cells only once all
  // points are separated (repeated blocks).
  int target_cell(const Partition& p) const {
    int best = -1, best_size = 0;
    for (int pass = 0; pass < 2 && best < 0; ++pass)
      for (int c = 0; c < g_.n; c = p.cell_end[c]) {
        const int size = p.cell_end[c] - c;
        if (size > 1 && size > best_size && (pass == 1 || p.lab[c] < g_.v)) {
          best = c;
          best_size = size;
        }
      }
    return best;
  }

  static void individualize(Partition& p, int u) {
    const int c = p.cell_of(u);
    const int end = p.cell_end[c];
    const int i = p.pos[u];
    std::swap(p.lab[c], p.lab[i]);
    p.pos[p.lab[i]] = i;
    p.pos[u] = c;
    p.cell_end[c] = c + 1;
    for (int j = c + 1; j < end; ++j) p.cell_start[j] = c + 1;
    p.cell_end[c + 1] = end;
    ++p.cells;
  }

  std::vector<std::uint64_t> leaf_code(const Partition& p) const {
    std::vector<int> label(g_.n);
    int np = 0;
    for (int x : p.lab)
      if (x < g_.v) label[x] = np++;
    std::vector<std::uint64_t> code;
    code.reserve(static_cast<std::size_t>(g_.n - g_.v) * words_);
    for (int x : p.lab) {
      if (x < g_.v) continue;
      const std::size_t off = code.size();
      code.resize(off + words_, 0);
      for (int e = g_.start[x]; e < g_.start[x + 1]; ++e) {
        const int y = label[g_.adj[e]];
        code[off + (y >> 6)] |= std::uint64_t{1} << (y & 63);
      }
    }
    return code;
  }

  // Vertex map sending reference leaf `from` to leaf `to`, if it is an
  // automorphism of the colored graph.
  bool try_automorphism(const std::vector<int>& from, const std::vector<int>& to) {
    std::vector<int> a(g_.n);
    for (int i = 0; i < g_.n; ++i) a[from[i]] = to[i];
    for (int x = g_.v; x < g_.n; ++x) {
      const int y = a[x];
      if (g_.start[x + 1] - g_.start[x] != g_.start[y + 1] - g_.start[y]) return false;
      for (int e = g_.start[x]; e < g_.start[x + 1]; ++e) {
        const int img = a[g_.adj[e]];
        bool found = false;
        for (int f = g_.start[y]; f < g_.start[y + 1] && !found; ++f) found = g_.adj[f] == img;
        if (!found) return false;
      }
    }
    for (int x = 0; x < g_.n; ++x)
      if (colors_[a[x]] != colors_[x]) return false;
    bool identity = true;
    for (int x = 0; x < g_.n && identity; ++x) identity = a[x] == x;
    if (!identity) auts_.push_back(std::move(a));
    return true;
  }

  static int common_depth(const std::vector<int>& a, const std::vector<int>& b) {
    int d = 0;
    while (d < static_cast<int>(a.size()) && d < static_cast<int>(b.size()) && a[d] == b[d]) ++d;
    return d;
  }

  void leaf(int depth) {
    const Partition& p = levels_[depth];
    jump_ = depth - 1;
    auto code = leaf_code(p);
    std::uint64_t key = mix(0, static_cast<std::uint64_t>(depth));
    for (int d = 0; d <= depth; ++d)
      for (auto e : traces_[d]) key = mix(key, e);
    for (auto w : code) key = mix(key, w);

    if (!have_first_) {
      have_first_ = true;
      first_path_ = path_;
      first_trace_.assign(traces_.begin(), traces_.begin() + depth + 1);
      if (opt_.canonical) replace_best(p, depth, code);
      store_leaf(key, p);
      return;
    }
    // Any earlier leaf with the same trace and code is the image of this one
    // under an automorphism.
    if (auto it = stored_index_.find(key); it != stored_index_.end())
      for (std::size_t i : it->second)
        if (try_automorphism(stored_[i].lab, p.lab)) {
          jump_ = common_depth(path_, stored_[i].path);
          return;
        }
    if (opt_.canonical) {
      int cmp = compare_trace(best_trace_, depth);
      if (cmp == 0 && depth + 1 < static_cast<int>(best_trace_.size())) cmp = -1;
      if (cmp < 0 || (cmp == 0 && code < best_code_)) {
        replace_best(p, depth, code);
      } else if (cmp == 0 && code == best_code_ && try_automorphism(best_lab_, p.lab)) {
        jump_ = common_depth(path_, best_path_);
        return;
      }
    }
    store_leaf(key, p);
  }

  void store_leaf(std::uint64_t key, const Partition& p) {
    if (stored_.size() * static_cast<std::size_t>(g_.n) > kStoredLeafBudget) return;
    stored_index_[key].push_back(stored_.size());
    stored_.push_back({path_, p.lab});
  }

  void replace_best(const Partition& p, int depth, std::vector<std::uint64_t> code = {}) {
    best_path_ = path_;
    best_trace_.assign(traces_.begin(), traces_.begin() + depth + 1);
    best_lab_ = p.lab;
    best_code_ = code.empty() ? leaf_code(p) : std::move(code);
  }

  Certificate make_certificate(const CanonicalResult& res) const {
    Certificate cert;
    auto& out = cert.bytes;
    auto put32 = [&](std::uint32_t x) {
      for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
    };
    out.push_back(kCertificateVersion);
    out.push_back(res.invariants);
    put32(static_cast<std::uint32_t>(g_.v));
    put32(static_cast<std::uint32_t>(g_.n - g_.v));
    for (int x : best_lab_) put32(static_cast<std::uint32_t>(colors_[x]));
    const std::size_t row_bytes = (static_cast<std::size_t>(g_.v) + 7) / 8;
    std::vector<std::uint8_t> row(row_bytes);
    for (int x : best_lab_) {
      if (x < g_.v) continue;
      std::fill(row.begin(), row.end(), 0);
      for (int e = g_.start[x]; e < g_.start[x + 1]; ++e) {
        const int y = res.canonical_point[g_.adj[e]];
        row[y >> 3] |= static_cast<std::uint8_t>(1U << (y & 7));
      }
      out.insert(out.end(), row.begin(), row.end());
    }
    return cert;
  }

  const IncidenceStructure& s_;
  Graph g_;
  Refiner refiner_;
  CanonicalOptions opt_;
  std::size_t words_;
  std::vector<int> colors_;
  std::optional<PlaneTables> plane_;
  std::vector<std::uint64_t> key_;

  std::vector<Partition> levels_;
  std::vector<std::vector<std::uint64_t>> traces_;
  std::vector<int> path_;
  std::uint64_t nodes_ = 0;
  BigInt order_ = 1;
  int jump_ = 0;

  std::vector<std::vector<int>> auts_;
  bool have_first_ = false;
  std::vector<int> first_path_;
  std::vector<std::vector<std::uint64_t>> first_trace_;

  struct StoredLeaf {
    std::vector<int> path;
    std::vector<int> lab;
  };
  // Total lab entries kept for automorphism detection.
  static constexpr std::size_t kStoredLeafBudget = std::size_t{1} << 24;
  std::vector<StoredLeaf> stored_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> stored_index_;

  std::vector<int> best_path_;
  std::vector<std::vector<std::uint64_t>> best_trace_;
  std::vector<int> best_lab_;
  std::vector<std::uint64_t> best_code_;
};

}  // namespace

Coloring refine(const IncidenceStructure& s, const Coloring& c) {
  Graph g(s);
  if (static_cast<int>(c.colors().size()) != g.n)
    throw Error(Errc::InvalidArgument, "coloring does not match the structure");
  Refiner r(g);
  Partition p = r.initial(c.colors());
  std::vector<std::uint64_t> events;
  Trace trace(events);
  r.refine(p, all_cells(p), trace);
  std::vector<int> color(g.n);
  int k = 0;
  for (int cstart : all_cells(p)) {
    for (int i = cstart; i < p.cell_end[cstart]; ++i) color[p.lab[i]] = k;
    ++k;
  }
  return Coloring(s, std::move(color));
}

std::string Certificate::hex() const {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 15]);
  }
  return out;
}

Certificate Certificate::from_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) throw Error(Errc::Parse, "odd-length certificate hex");
  auto nibble = [](char ch) -> int {
    if (ch >= '0' && ch <= '9') return ch - '0';
    if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
    throw Error(Errc::Parse, std::string("bad hex digit '") + ch + "'");
  };
  Certificate c;
  c.bytes.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2)
    c.bytes.push_back(static_cast<std::uint8_t>(nibble(hex[i]) * 16 + nibble(hex[i + 1])));
  return c;
}

CanonicalResult canonical_search(const IncidenceStructure& s, const Coloring& c, const CanonicalOptions& options) {
  return Search(s, c, options).run();
}

bool preserves_blocks(const IncidenceStructure& s, const Permutation& g) {
  if (g.degree() != s.num_points()) return false;
  std::vector<Block> images;
  images.reserve(s.num_blocks());
  for (const auto& b : s.blocks()) {
    Block img;
    img.reserve(b.size());
    for (int p : b) img.push_back(g[p]);
    std::sort(img.begin(), img.end());
    images.push_back(std::move(img));
  }
  std::sort(images.begin(), images.end());
  std::vector<Block> original = s.blocks();
  std::sort(original.begin(), original.end());
  return images == original;
}

PermGroup automorphism_group(const IncidenceStructure& s, const Coloring& c) {
  CanonicalOptions opt;
  opt.canonical = false;
  auto res = canonical_search(s, c, opt);
  for (const auto& g : res.generators) {
    bool ok = preserves_blocks(s, g);
    for (int p = 0; p < s.num_points() && ok; ++p) ok = c[g[p]] == c[p];
    if (!ok) throw std::logic_error("automorphism search produced a map that is not an automorphism");
  }
  return PermGroup(s.num_points(), std::move(res.generators));
}

Certificate canonical_certificate(const IncidenceStructure& s, const Coloring& c) {
  return canonical_search(s, c).certificate;
}

std::optional<Permutation> is_isomorphic(const IncidenceStructure& a, const IncidenceStructure& b) {
  if (a.num_points() != b.num_points() || a.num_blocks() != b.num_blocks()) return std::nullopt;
  auto ra = canonical_search(a, Coloring::uniform(a));
  auto rb = canonical_search(b, Coloring::uniform(b));
  if (ra.certificate != rb.certificate) return std::nullopt;
  std::vector<int> from_canonical(b.num_points());
  for (int p = 0; p < b.num_points(); ++p) from_canonical[rb.canonical_point[p]] = p;
  std::vector<int> map(a.num_points());
  for (int p = 0; p < a.num_points(); ++p) map[p] = from_canonical[ra.canonical_point[p]];
  Permutation perm(std::move(map));
  std::vector<Block> images;
  for (const auto& blk : a.blocks()) {
    Block img;
    for (int p : blk) img.push_back(perm[p]);
    std::sort(img.begin(), img.end());
    images.push_back(std::move(img));
  }
  std::sort(images.begin(), images.end());
  auto target = b.blocks();
  std::sort(target.begin(), target.end());
  if (images != target) throw std::logic_error("equal certificates but the induced map is not an isomorphism");
  return perm;
}

PermGroup setwise_stabilizer(const ProjectivePlane& plane, const std::vector<int>& pts) {
  const auto& s = plane.structure();
  return automorphism_group(s, Coloring::marked_points(s, pts));
}

}  // namespace unital
