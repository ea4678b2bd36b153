#include "helpers.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "unital/autom.hpp"

using namespace unital;

namespace {

using Partition = std::set<std::set<int>>;

Partition cells(const std::vector<int>& color) {
  std::map<int, std::set<int>> by;
  for (int i = 0; i < static_cast<int>(color.size()); ++i) by[color[i]].insert(i);
  Partition out;
  for (auto& [c, s] : by) out.insert(s);
  return out;
}

// Plain colour refinement on the incidence graph: a vertex's new colour is
// its old colour together with the multiset of neighbour colours.
Partition naive_refine(const IncidenceStructure& s, std::vector<int> color) {
  int v = s.num_points();
  std::vector<std::vector<int>> adj(v + s.num_blocks());
  for (int b = 0; b < s.num_blocks(); ++b)
    for (int p : s.block(b)) {
      adj[p].push_back(v + b);
      adj[v + b].push_back(p);
    }
  std::size_t count = cells(color).size();
  for (;;) {
    std::map<std::pair<int, std::vector<int>>, int> ids;
    std::vector<int> next(color.size());
    for (std::size_t i = 0; i < color.size(); ++i) {
      std::vector<int> sig;
      for (int j : adj[i]) sig.push_back(color[j]);
      std::sort(sig.begin(), sig.end());
      auto key = std::make_pair(color[i], sig);
      auto it = ids.try_emplace(key, static_cast<int>(ids.size())).first;
      next[i] = it->second;
    }
    color = std::move(next);
    std::size_t c = cells(color).size();
    if (c == count) return cells(color);
    count = c;
  }
}

std::vector<int> shuffled(int n, std::mt19937_64& rng) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

IncidenceStructure shuffle_blocks(const IncidenceStructure& s, std::mt19937_64& rng) {
  auto blocks = s.blocks();
  std::shuffle(blocks.begin(), blocks.end(), rng);
  return IncidenceStructure(s.num_points(), blocks);
}

bool brute_force_isomorphic(const IncidenceStructure& a, const IncidenceStructure& b) {
  if (a.num_points() != b.num_points() || a.num_blocks() != b.num_blocks()) return false;
  std::set<Block> target(b.blocks().begin(), b.blocks().end());
  std::vector<int> p(a.num_points());
  std::iota(p.begin(), p.end(), 0);
  do {
    bool ok = true;
    for (const auto& blk : a.blocks()) {
      Block img;
      for (int x : blk) img.push_back(p[x]);
      std::sort(img.begin(), img.end());
      if (!target.count(img)) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

bool maps_blocks(const IncidenceStructure& a, const IncidenceStructure& b, const Permutation& g) {
  std::multiset<Block> target(b.blocks().begin(), b.blocks().end());
  std::multiset<Block> img;
  for (const auto& blk : a.blocks()) {
    Block i;
    for (int x : blk) i.push_back(g[x]);
    std::sort(i.begin(), i.end());
    img.insert(i);
  }
  return img == target;
}

}  // namespace

TEST_CASE("coloring validation") {
  auto f = testing::fano();
  CHECK_ERRC(Coloring(f, std::vector<int>(13, 0)), Errc::InvalidArgument);
  CHECK_ERRC(Coloring(f, std::vector<int>(14, 0)), Errc::InvalidArgument);
  std::vector<int> gap(14, 0);
  for (int b = 7; b < 14; ++b) gap[b] = 2;
  CHECK_ERRC(Coloring(f, gap), Errc::InvalidArgument);
  auto u = Coloring::uniform(f);
  CHECK(u.num_colors() == 2);
  CHECK(Coloring::marked_points(f, {}) == u);
  CHECK(Coloring::marked_points(f, {3, 5}).num_colors() == 3);
}

TEST_CASE("refinement") {
  const auto& pg = testing::pg16()->structure();
  CHECK(refine(pg, Coloring::uniform(pg)).num_colors() == 2);

  auto f = testing::fano();
  auto r = refine(f, Coloring::marked_points(f, {0}));
  std::multiset<std::size_t> point_cells;
  for (const auto& c : cells(std::vector<int>(r.colors().begin(), r.colors().begin() + 7))) point_cells.insert(c.size());
  CHECK(point_cells == std::multiset<std::size_t>{1, 6});
  CHECK(refine(f, r) == r);

  std::mt19937_64 rng(5);
  const auto& hall = testing::hall16()->structure();
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<int> pts;
    for (int i = 0; i <= trial; ++i) pts.push_back(static_cast<int>(rng() % 273));
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto c = Coloring::marked_points(hall, pts);
    auto got = refine(hall, c);
    CHECK(cells(got.colors()) == naive_refine(hall, c.colors()));
    CHECK(refine(hall, got) == got);
  }
  for (int trial = 0; trial < 20; ++trial) {
    int v = 5 + static_cast<int>(rng() % 5);
    std::set<Block> bs;
    while (bs.size() < 6) {
      int a = static_cast<int>(rng() % v), b = static_cast<int>(rng() % v);
      if (a != b) bs.insert({std::min(a, b), std::max(a, b)});
    }
    IncidenceStructure s(v, std::vector<Block>(bs.begin(), bs.end()));
    auto u = Coloring::uniform(s);
    CHECK(cells(refine(s, u).colors()) == naive_refine(s, u.colors()));
  }
}

TEST_CASE("automorphism group orders") {
  CHECK(automorphism_group(testing::fano()).order() == 168);
  auto u = make_unital(testing::pg16(), testing::hermitian_by_brute_force(4));
  CHECK(automorphism_group(design_from_unital(u)).order() == 249600);
  CHECK(setwise_stabilizer(*testing::pg16(), u.points).order() == 249600);
}

TEST_CASE("generators preserve blocks") {
  for (const auto& s : {testing::fano(), testing::hall16()->structure()}) {
    auto g = automorphism_group(s);
    for (const auto& x : g.generators()) {
      CHECK(preserves_blocks(s, x));
      CHECK(maps_blocks(s, s, x));
    }
  }
  CHECK_FALSE(preserves_blocks(testing::fano(), Permutation::from_cycles(7, {{0, 1}})));
}

TEST_CASE("certificates are labeling invariant") {
  std::mt19937_64 rng(17);
  for (const auto& plane : {testing::pg16(), testing::hall16()}) {
    const auto& s = plane->structure();
    auto c = canonical_certificate(s);
    for (int trial = 0; trial < 3; ++trial) {
      auto t = shuffle_blocks(s.relabeled(shuffled(273, rng)), rng);
      CHECK(canonical_certificate(t) == c);
    }
  }
  CHECK(canonical_certificate(testing::pg16()->structure()) != canonical_certificate(testing::hall16()->structure()));

  auto d = design_from_unital(make_unital(testing::pg16(), testing::hermitian_by_brute_force(4)));
  auto c = canonical_certificate(d);
  CHECK(c.bytes.at(0) == kCertificateVersion);
  CHECK(canonical_certificate(shuffle_blocks(d.relabeled(shuffled(65, rng)), rng)) == c);
  CHECK(Certificate::from_hex(c.hex()) == c);
  CHECK(c.hex().size() == 2 * c.bytes.size());
}

TEST_CASE("canonical labeling is a bijection") {
  auto d = design_from_unital(make_unital(testing::pg16(), testing::hermitian_by_brute_force(4)));
  auto r = canonical_search(d, Coloring::uniform(d));
  auto pts = r.canonical_point;
  std::sort(pts.begin(), pts.end());
  std::vector<int> iota(65);
  std::iota(iota.begin(), iota.end(), 0);
  CHECK(pts == iota);
  CHECK(r.order == 249600);
  auto opt = CanonicalOptions{};
  opt.canonical = false;
  CHECK(canonical_search(d, Coloring::uniform(d), opt).order == 249600);
}

TEST_CASE("isomorphism") {
  CHECK_FALSE(is_isomorphic(testing::pg16()->structure(), testing::hall16()->structure()).has_value());

  std::mt19937_64 rng(23);
  const auto& hall = testing::hall16()->structure();
  auto t = shuffle_blocks(hall.relabeled(shuffled(273, rng)), rng);
  auto m = is_isomorphic(hall, t);
  REQUIRE(m.has_value());
  CHECK(maps_blocks(hall, t, *m));

  // K_{3,3} against the triangular prism: both cubic on six vertices.
  IncidenceStructure k33(6, {{0, 3}, {0, 4}, {0, 5}, {1, 3}, {1, 4}, {1, 5}, {2, 3}, {2, 4}, {2, 5}});
  IncidenceStructure prism(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {0, 3}, {1, 4}, {2, 5}});
  CHECK_FALSE(is_isomorphic(k33, prism).has_value());

  for (int trial = 0; trial < 40; ++trial) {
    auto rand_graph = [&] {
      std::set<Block> bs;
      while (bs.size() < 7) {
        int a = static_cast<int>(rng() % 6), b = static_cast<int>(rng() % 6);
        if (a != b) bs.insert({std::min(a, b), std::max(a, b)});
      }
      return IncidenceStructure(6, std::vector<Block>(bs.begin(), bs.end()));
    };
    auto a = rand_graph();
    auto b = rand_graph();
    auto got = is_isomorphic(a, b);
    CHECK(got.has_value() == brute_force_isomorphic(a, b));
    if (got) CHECK(maps_blocks(a, b, *got));
  }
}

TEST_CASE("setwise stabilizer") {
  const auto& pg = *testing::pg16();
  auto full = automorphism_group(pg.structure());
  CHECK(setwise_stabilizer(pg, {}).order() == full.order());
  auto line = setwise_stabilizer(pg, pg.line(0));
  CHECK(line.order() * 273 == full.order());
  for (const auto& g : line.generators()) {
    std::set<int> img;
    for (int p : pg.line(0)) img.insert(g[p]);
    CHECK(img == std::set<int>(pg.line(0).begin(), pg.line(0).end()));
  }
}
