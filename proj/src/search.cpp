#include "unital/search.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace unital {

namespace {

class OrbitDfs {
public:
  OrbitDfs(const ProjectivePlane& plane, const Subgroup& h, const SearchBudget& budget)
      : plane_(plane), budget_(budget), deadline_(budget.wall_clock_ms), q_(unital_parameter(plane)),
        target_(q_ * q_ * q_ + 1) {
    orbits_ = unital::orbits(h);
    order_.resize(orbits_.size());
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](int a, int b) { return orbits_[a].size() > orbits_[b].size(); });
    int n = static_cast<int>(order_.size());
    meets_.resize(n);
    std::vector<int> hit(plane.num_lines());
    for (int i = 0; i < n; ++i) {
      std::fill(hit.begin(), hit.end(), 0);
      for (int p : orbits_[order_[i]])
        for (int l : plane.lines_on(p)) ++hit[l];
      for (int l = 0; l < plane.num_lines(); ++l)
        if (hit[l]) meets_[i].push_back({l, hit[l]});
    }
    // reach_[i][s]: some subset of the orbits i.. has total size s.
    reach_.assign(n + 1, std::vector<char>(target_ + 1, 0));
    reach_[n][0] = 1;
    for (int i = n - 1; i >= 0; --i) {
      int sz = static_cast<int>(orbits_[order_[i]].size());
      for (int s = 0; s <= target_; ++s)
        reach_[i][s] = reach_[i + 1][s] || (s >= sz && reach_[i + 1][s - sz]);
    }
    count_.assign(plane.num_lines(), 0);
    rest_.assign(plane.num_lines(), plane.order() + 1);
  }

  void run(std::vector<std::vector<int>>& out) {
    out_ = &out;
    dfs(0, 0);
  }

  const std::vector<std::vector<int>>& orbits() const { return orbits_; }
  bool stopped() const { return stopped_; }
  std::uint64_t nodes() const { return nodes_; }

private:
  struct Meet {
    int line;
    int count;
  };

  bool alive(int l) const {
    int c = count_[l], r = rest_[l];
    if (c > q_ + 1) return false;
    if (c + r < 1) return false;
    if (c >= 2 && c + r < q_ + 1) return false;
    return true;
  }

  void dfs(int i, int size) {
    if (stopped_) return;
    ++nodes_;
    if (static_cast<std::int64_t>(nodes_) > budget_.max_nodes || ((nodes_ & 4095) == 0 && deadline_.passed())) {
      stopped_ = true;
      return;
    }
    if (size == target_) {
      // Everything left is excluded.
      for (int l = 0; l < plane_.num_lines(); ++l)
        if (count_[l] != 1 && count_[l] != q_ + 1) return;
      std::vector<int> pick;
      for (int j : chosen_) pick.push_back(order_[j]);
      std::sort(pick.begin(), pick.end());
      out_->push_back(std::move(pick));
      return;
    }
    if (i == static_cast<int>(order_.size()) || !reach_[i][target_ - size]) return;
    int sz = static_cast<int>(orbits_[order_[i]].size());
    const auto& m = meets_[i];
    for (const auto& e : m) rest_[e.line] -= e.count;
    if (size + sz <= target_) {
      bool ok = true;
      for (const auto& e : m) {
        count_[e.line] += e.count;
        ok = ok && alive(e.line);
      }
      if (ok) {
        chosen_.push_back(i);
        dfs(i + 1, size + sz);
        chosen_.pop_back();
      }
      for (const auto& e : m) count_[e.line] -= e.count;
    }
    bool ok = true;
    for (const auto& e : m) ok = ok && alive(e.line);
    if (ok) dfs(i + 1, size);
    for (const auto& e : m) rest_[e.line] += e.count;
  }

  const ProjectivePlane& plane_;
  SearchBudget budget_;
  Deadline deadline_;
  int q_;
  int target_;
  std::vector<std::vector<int>> orbits_;
  std::vector<int> order_;
  std::vector<std::vector<Meet>> meets_;
  std::vector<std::vector<char>> reach_;
  std::vector<int> count_;
  std::vector<int> rest_;  // points on the line in orbits not yet decided
  std::vector<int> chosen_;
  std::vector<std::vector<int>>* out_ = nullptr;
  std::uint64_t nodes_ = 0;
  bool stopped_ = false;
};

}  // namespace

OrbitUnionSearch search_orbit_unions(const PlanePtr& plane, const Subgroup& h, const SearchBudget& budget) {
  OrbitDfs dfs(*plane, h, budget);
  std::vector<std::vector<int>> picks;
  dfs.run(picks);
  OrbitUnionSearch res;
  res.budget_exhausted = dfs.stopped();
  res.nodes = dfs.nodes();
  std::map<Certificate, FoundUnital> seen;
  for (auto& pick : picks) {
    std::vector<int> pts;
    for (int o : pick) pts.insert(pts.end(), dfs.orbits()[o].begin(), dfs.orbits()[o].end());
    auto u = make_unital(plane, std::move(pts));
    auto cert = canonical_certificate(design_from_unital(u));
    if (seen.count(cert)) continue;
    seen.emplace(cert, FoundUnital{std::move(u), cert, std::move(pick)});
  }
  for (auto& [cert, f] : seen) res.found.push_back(std::move(f));
  return res;
}

PlaneSearch search_plane(const PlanePtr& plane, const std::set<int>& orders, const SearchBudget& budget) {
  PlaneSearch res;
  res.seed = budget.seed;
  if (orders.empty()) return res;
  Deadline deadline(budget.wall_clock_ms);
  auto start = std::chrono::steady_clock::now();
  auto remaining = [&] {
    auto used = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return std::max<std::int64_t>(0, budget.wall_clock_ms - used.count());
  };
  auto group = automorphism_group(plane->structure());
  std::map<Certificate, PlaneSearchHit> hits;
  for (int order : orders) {
    SearchBudget sub = budget;
    sub.wall_clock_ms = remaining();
    auto subgroups = enumerate_small_subgroups(group, order, sub);
    if (subgroups.budget_exhausted) res.budget_exhausted = true;
    for (const auto& h : subgroups.subgroups) {
      if (deadline.passed()) {
        res.budget_exhausted = true;
        break;
      }
      sub.wall_clock_ms = remaining();
      auto found = search_orbit_unions(plane, h, sub);
      ++res.subgroups_searched;
      if (found.budget_exhausted) res.budget_exhausted = true;
      for (auto& f : found.found) {
        if (hits.count(f.certificate)) continue;
        PlaneSearchHit hit;
        hit.report = analyze(f.unital);
        hit.unital = std::move(f.unital);
        hit.subgroup_generators = h.generators;
        hit.subgroup_order = h.order();
        hits.emplace(f.certificate, std::move(hit));
      }
    }
  }
  for (auto& [cert, hit] : hits) res.hits.push_back(std::move(hit));
  return res;
}

}  // namespace unital
