#include "helpers.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "unital/analytics.hpp"
#include "unital/autom.hpp"
#include "unital/gf.hpp"
#include "unital/search.hpp"

using namespace unital;

namespace {

// Rank mod p without inverses: row_j <- a_ii row_j - a_ji row_i.
int fraction_free_rank(const ZeroOneMatrix& m, int p) {
  std::vector<std::vector<long>> a(m.rows, std::vector<long>(m.cols));
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c) a[r][c] = m.at(r, c) % p;
  int rank = 0;
  for (int c = 0; c < m.cols && rank < m.rows; ++c) {
    int piv = -1;
    for (int r = m.rows - 1; r >= rank; --r)
      if (a[r][c] != 0) piv = r;
    if (piv < 0) continue;
    std::swap(a[piv], a[rank]);
    for (int r = rank + 1; r < m.rows; ++r) {
      long f = a[r][c];
      if (f == 0) continue;
      long g = a[rank][c];
      for (int k = c; k < m.cols; ++k) a[r][k] = ((g * a[r][k] - f * a[rank][k]) % p + p) % p;
    }
    ++rank;
  }
  return rank;
}

// Exact covers by lowest uncovered point first, no heuristics.
std::uint64_t naive_classes(const IncidenceStructure& d) {
  std::vector<char> covered(d.num_points(), 0);
  std::uint64_t count = 0;
  auto rec = [&](auto&& self) -> void {
    int p = 0;
    while (p < d.num_points() && covered[p]) ++p;
    if (p == d.num_points()) {
      ++count;
      return;
    }
    for (int b : d.blocks_on(p)) {
      bool free = true;
      for (int x : d.block(b)) free = free && !covered[x];
      if (!free) continue;
      for (int x : d.block(b)) covered[x] = 1;
      self(self);
      for (int x : d.block(b)) covered[x] = 0;
    }
  };
  rec(rec);
  return count;
}

IncidenceStructure affine_plane(int q) {
  GaloisField f(q);
  std::vector<Block> lines;
  for (int m = 0; m < q; ++m)
    for (int b = 0; b < q; ++b) {
      Block l;
      for (int x = 0; x < q; ++x) l.push_back(x * q + f.add(f.mul(m, x), b));
      lines.push_back(l);
    }
  for (int c = 0; c < q; ++c) {
    Block l;
    for (int y = 0; y < q; ++y) l.push_back(c * q + y);
    lines.push_back(l);
  }
  return IncidenceStructure(q * q, lines);
}

ZeroOneMatrix permuted(const ZeroOneMatrix& m, std::mt19937_64& rng) {
  std::vector<int> rp(m.rows), cp(m.cols);
  std::iota(rp.begin(), rp.end(), 0);
  std::iota(cp.begin(), cp.end(), 0);
  std::shuffle(rp.begin(), rp.end(), rng);
  std::shuffle(cp.begin(), cp.end(), rng);
  ZeroOneMatrix out = m;
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c) out.at(rp[r], cp[c]) = m.at(r, c);
  return out;
}

const Unital& hermitian() {
  static const Unital u = make_unital(testing::pg16(), testing::hermitian_by_brute_force(4));
  return u;
}

// Unital designs found in the Hall plane.
const std::vector<PlaneSearchHit>& hall_hits() {
  static const auto hits = [] {
    SearchBudget b;
    b.seed = 1;
    b.max_subgroups = 16;
    return search_plane(testing::hall16(), {16, 20}, b).hits;
  }();
  return hits;
}

}  // namespace

TEST_CASE("p-rank") {
  ZeroOneMatrix id{3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1}};
  CHECK(p_rank(id, 5) == 3);
  CHECK_ERRC(p_rank(id, 4), Errc::NotPrime);
  CHECK_ERRC(p_rank(id, 1), Errc::NotPrime);
  CHECK_ERRC(p_rank(id, 0), Errc::NotPrime);

  auto fano = incidence_matrix(testing::fano());
  CHECK(p_rank(fano, 2) == 4);
  // det = 24, and the all-ones vector is in the kernel mod 3.
  CHECK(p_rank(fano, 3) == 6);
  CHECK(p_rank(fano, 7) == 7);

  auto h = incidence_matrix(design_from_unital(hermitian()));
  CHECK(p_rank(h, 5) == 52);
  CHECK(fraction_free_rank(h, 5) == 52);

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) CHECK(p_rank(permuted(h, rng), 5) == 52);

  for (const auto& hit : hall_hits()) {
    auto m = incidence_matrix(design_from_unital(hit.unital));
    int r = p_rank(m, 5);
    CHECK(r == fraction_free_rank(m, 5));
    CHECK(r == hit.report.p_rank_5);
    for (int trial = 0; trial < 50; ++trial) CHECK(p_rank(permuted(m, rng), 5) == r);
  }

  for (int trial = 0; trial < 40; ++trial) {
    int rows = 1 + static_cast<int>(rng() % 12), cols = 1 + static_cast<int>(rng() % 12);
    ZeroOneMatrix m{rows, cols, std::vector<std::uint8_t>(static_cast<std::size_t>(rows) * cols)};
    for (auto& x : m.data) x = static_cast<std::uint8_t>(rng() % 2);
    for (int p : {2, 3, 5, 7}) CHECK(p_rank(m, p) == fraction_free_rank(m, p));
  }
}

TEST_CASE("parallel classes") {
  IncidenceStructure ten(10, {{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}, {0, 1, 2, 3, 5}});
  CHECK(parallel_classes(ten) == 1);
  CHECK(list_parallel_classes(ten) == std::vector<std::vector<int>>{{0, 1}});
  CHECK_ERRC(parallel_classes(IncidenceStructure(4, {{0, 1}, {1, 2, 3}})), Errc::NonUniformBlocks);
  CHECK_ERRC(parallel_classes(IncidenceStructure(5, {{0, 1}, {2, 3}})), Errc::NotDivisible);
  CHECK(parallel_classes(IncidenceStructure(4, {})) == 0);

  // In an affine plane of order q the covers are exactly the q+1 pencils.
  for (int q : {3, 4, 5}) {
    auto ag = affine_plane(q);
    CHECK(parallel_classes(ag) == static_cast<std::uint64_t>(q + 1));
    CHECK(naive_classes(ag) == static_cast<std::uint64_t>(q + 1));
  }

  auto d = design_from_unital(hermitian());
  CHECK(parallel_classes(d) == 4304);
  CHECK(naive_classes(d) == 4304);
  auto classes = list_parallel_classes(d);
  CHECK(classes.size() == 4304);
  std::set<std::vector<int>> distinct(classes.begin(), classes.end());
  CHECK(distinct.size() == classes.size());
  for (const auto& c : classes) {
    CHECK(c.size() == 13);
    std::vector<int> seen(65, 0);
    for (int b : c)
      for (int x : d.block(b)) ++seen[x];
    CHECK(std::all_of(seen.begin(), seen.end(), [](int n) { return n == 1; }));
  }

  std::mt19937_64 rng(41);
  for (const auto& hit : hall_hits()) {
    auto hd = design_from_unital(hit.unital);
    auto n = parallel_classes(hd);
    CHECK(n == naive_classes(hd));
    std::vector<int> perm(65);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    CHECK(parallel_classes(hd.relabeled(perm)) == n);
  }
}

TEST_CASE("analysis of the Hermitian unital") {
  auto r = analyze(hermitian(), "2");
  CHECK(r.plane == "PG(2,16)");
  CHECK(r.stabilizer_order == 249600);
  CHECK(r.design_aut_order == 249600);
  CHECK(r.orders_agree());
  CHECK(r.p_rank_5 == 52);
  CHECK(r.parallel_classes == 4304);
  CHECK(r.dual_parallel_classes == 4304);
  CHECK(r.certificate == r.dual_certificate);

  std::vector<DesignReport> reports{r};
  match_partners(reports);
  REQUIRE(reports[0].isomorphic_partner.has_value());
  CHECK(*reports[0].isomorphic_partner == "PG(2,16)^T.2");
  CHECK(count_distinct_designs(reports) == 1);
  CHECK(count_distinct_designs({}) == 0);
}

TEST_CASE("analysis of Hall-plane unitals") {
  const auto& hits = hall_hits();
  REQUIRE(hits.size() >= 2);
  std::vector<DesignReport> reports;
  for (const auto& h : hits) {
    const auto& r = h.report;
    CHECK(r.plane == "Hall(16)");
    CHECK(r.p_rank_5 >= 0);
    CHECK(r.p_rank_5 <= 65);
    CHECK(r.design_aut_order % r.stabilizer_order == 0);
    CHECK(r.certificate == canonical_certificate(design_from_unital(h.unital)));
    CHECK(r.dual_certificate == canonical_certificate(design_from_unital(dual_unital(h.unital))));
    reports.push_back(r);
  }
  std::set<Certificate> designs, all;
  for (const auto& r : reports) {
    designs.insert(r.certificate);
    all.insert(r.certificate);
    all.insert(r.dual_certificate);
  }
  CHECK(count_distinct_designs(reports, false) == designs.size());
  CHECK(count_distinct_designs(reports) == all.size());
  CHECK(designs.size() == reports.size());

  match_partners(reports);
  for (const auto& r : reports) {
    bool expected = false;
    for (const auto& s : reports) expected = expected || s.dual_certificate == r.certificate;
    CHECK(r.isomorphic_partner.has_value() == expected);
  }
}
