#include "unital/analytics.hpp"

#include <algorithm>
#include <set>

#include "unital/error.hpp"
#include "unital/gf.hpp"

namespace unital {

int p_rank(const ZeroOneMatrix& m, int p) {
  if (!is_prime(p)) throw Error(Errc::NotPrime, std::to_string(p) + " is not prime");
  std::vector<std::vector<int>> a(m.rows, std::vector<int>(m.cols));
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c) a[r][c] = m.at(r, c) % p;
  std::vector<int> inv(p, 0);
  for (int x = 1; x < p; ++x)
    for (int y = 1; y < p; ++y)
      if (x * y % p == 1) inv[x] = y;
  int rank = 0;
  for (int c = 0; c < m.cols && rank < m.rows; ++c) {
    int piv = -1;
    for (int r = rank; r < m.rows; ++r)
      if (a[r][c]) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(a[piv], a[rank]);
    int s = inv[a[rank][c]];
    for (int j = c; j < m.cols; ++j) a[rank][j] = a[rank][j] * s % p;
    for (int r = rank + 1; r < m.rows; ++r) {
      int f = a[r][c];
      if (!f) continue;
      for (int j = c; j < m.cols; ++j) a[r][j] = ((a[r][j] - f * a[rank][j]) % p + p) % p;
    }
    ++rank;
  }
  return rank;
}

namespace {

// Dancing links over points (columns) and blocks (rows).
class ExactCover {
public:
  explicit ExactCover(const IncidenceStructure& d) {
    int v = d.num_points();
    int n = v + 1;
    for (const auto& b : d.blocks()) n += static_cast<int>(b.size());
    L_.resize(n), R_.resize(n), U_.resize(n), D_.resize(n), C_.resize(n), row_.resize(n, -1);
    size_.assign(v + 1, 0);
    for (int i = 0; i <= v; ++i) {
      L_[i] = i == 0 ? v : i - 1;
      R_[i] = i == v ? 0 : i + 1;
      U_[i] = D_[i] = C_[i] = i;
    }
    // Header 0 is the root; column for point x is x + 1.
    int next = v + 1;
    for (int r = 0; r < d.num_blocks(); ++r) {
      int first = -1;
      for (int x : d.block(r)) {
        int col = x + 1;
        int node = next++;
        C_[node] = col;
        row_[node] = r;
        U_[node] = U_[col];
        D_[node] = col;
        D_[U_[col]] = node;
        U_[col] = node;
        ++size_[col];
        if (first < 0) {
          first = node;
          L_[node] = R_[node] = node;
        } else {
          L_[node] = L_[first];
          R_[node] = first;
          R_[L_[first]] = node;
          L_[first] = node;
        }
      }
    }
  }

  std::uint64_t count(std::vector<std::vector<int>>* out) {
    out_ = out;
    count_ = 0;
    search();
    return count_;
  }

private:
  void cover(int c) {
    L_[R_[c]] = L_[c];
    R_[L_[c]] = R_[c];
    for (int i = D_[c]; i != c; i = D_[i])
      for (int j = R_[i]; j != i; j = R_[j]) {
        U_[D_[j]] = U_[j];
        D_[U_[j]] = D_[j];
        --size_[C_[j]];
      }
  }

  void uncover(int c) {
    for (int i = U_[c]; i != c; i = U_[i])
      for (int j = L_[i]; j != i; j = L_[j]) {
        ++size_[C_[j]];
        U_[D_[j]] = j;
        D_[U_[j]] = j;
      }
    L_[R_[c]] = c;
    R_[L_[c]] = c;
  }

  void search() {
    if (R_[0] == 0) {
      ++count_;
      if (out_) {
        auto cls = chosen_;
        std::sort(cls.begin(), cls.end());
        out_->push_back(std::move(cls));
      }
      return;
    }
    int c = R_[0];
    for (int j = R_[c]; j != 0; j = R_[j])
      if (size_[j] < size_[c]) c = j;
    if (size_[c] == 0) return;
    cover(c);
    for (int r = D_[c]; r != c; r = D_[r]) {
      chosen_.push_back(row_[r]);
      for (int j = R_[r]; j != r; j = R_[j]) cover(C_[j]);
      search();
      for (int j = L_[r]; j != r; j = L_[j]) uncover(C_[j]);
      chosen_.pop_back();
    }
    uncover(c);
  }

  std::vector<int> L_, R_, U_, D_, C_, row_, size_;
  std::vector<int> chosen_;
  std::vector<std::vector<int>>* out_ = nullptr;
  std::uint64_t count_ = 0;
};

void check_resolvable_shape(const IncidenceStructure& d) {
  if (d.num_blocks() == 0) return;
  std::size_t k = d.block(0).size();
  for (const auto& b : d.blocks())
    if (b.size() != k) throw Error(Errc::NonUniformBlocks, "blocks of sizes " + std::to_string(k) + " and " +
                                                             std::to_string(b.size()));
  if (k == 0 || d.num_points() % static_cast<int>(k) != 0)
    throw Error(Errc::NotDivisible, "block size " + std::to_string(k) + " does not divide " +
                                        std::to_string(d.num_points()));
}

}  // namespace

std::uint64_t parallel_classes(const IncidenceStructure& d) {
  check_resolvable_shape(d);
  if (d.num_blocks() == 0) return 0;
  return ExactCover(d).count(nullptr);
}

std::vector<std::vector<int>> list_parallel_classes(const IncidenceStructure& d) {
  check_resolvable_shape(d);
  std::vector<std::vector<int>> out;
  if (d.num_blocks() == 0) return out;
  ExactCover(d).count(&out);
  return out;
}

DesignReport analyze(const Unital& u, std::string unital_id) {
  DesignReport r;
  r.plane = u.plane->name();
  r.unital_id = std::move(unital_id);
  auto design = design_from_unital(u);
  auto dual_design = design_from_unital(dual_unital(u));
  r.stabilizer_order = setwise_stabilizer(*u.plane, u.points).order();
  auto canon = canonical_search(design, Coloring::uniform(design));
  r.design_aut_order = canon.order;
  r.certificate = canon.certificate;
  r.dual_certificate = canonical_certificate(dual_design);
  r.p_rank_5 = p_rank(incidence_matrix(design), 5);
  r.parallel_classes = parallel_classes(design);
  r.dual_parallel_classes = parallel_classes(dual_design);
  return r;
}

void match_partners(std::vector<DesignReport>& reports) {
  for (auto& r : reports) {
    r.isomorphic_partner.reset();
    for (const auto& s : reports)
      if (s.dual_certificate == r.certificate) {
        r.isomorphic_partner = s.plane + "^T." + s.unital_id;
        break;
      }
  }
}

std::size_t count_distinct_designs(const std::vector<DesignReport>& reports, bool include_duals) {
  std::set<Certificate> seen;
  for (const auto& r : reports) {
    seen.insert(r.certificate);
    if (include_duals) seen.insert(r.dual_certificate);
  }
  return seen.size();
}

}  // namespace unital
