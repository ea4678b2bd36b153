#include "unital/permgroup.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>

#include "unital/error.hpp"

namespace unital {

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  std::vector<char> seen(images_.size(), 0);
  for (int x : images_) {
    if (x < 0 || x >= static_cast<int>(images_.size()) || seen[x])
      throw Error(Errc::InvalidArgument, "image list is not a permutation");
    seen[x] = 1;
  }
}

Permutation Permutation::identity(int n) {
  Permutation p;
  p.images_.resize(n);
  std::iota(p.images_.begin(), p.images_.end(), 0);
  return p;
}

Permutation Permutation::from_cycles(int n, std::initializer_list<std::initializer_list<int>> cycles) {
  Permutation result = identity(n);
  for (const auto& cyc : cycles) {
    Permutation c = identity(n);
    std::vector<int> pts(cyc);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i] < 0 || pts[i] >= n) throw Error(Errc::InvalidArgument, "cycle point out of range");
      c.images_[pts[i]] = pts[(i + 1) % pts.size()];
    }
    result = compose(result, c);
  }
  return result;
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < images_.size(); ++i)
    if (images_[i] != static_cast<int>(i)) return false;
  return true;
}

Permutation compose(const Permutation& a, const Permutation& b) {
  if (a.degree() != b.degree()) throw Error(Errc::DegreeMismatch, "composing permutations of different degree");
  std::vector<int> out(a.degree());
  for (int i = 0; i < a.degree(); ++i) out[i] = b[a[i]];
  return Permutation(std::move(out), Permutation::Trusted{});
}

Permutation inverse(const Permutation& a) {
  std::vector<int> out(a.degree());
  for (int i = 0; i < a.degree(); ++i) out[a[i]] = i;
  return Permutation(std::move(out), Permutation::Trusted{});
}

Permutation conjugate(const Permutation& a, const Permutation& b) { return compose(compose(inverse(b), a), b); }

std::uint64_t element_order(const Permutation& a) {
  std::vector<char> seen(a.degree(), 0);
  std::uint64_t ord = 1;
  for (int i = 0; i < a.degree(); ++i) {
    if (seen[i]) continue;
    std::uint64_t len = 0;
    for (int j = i; !seen[j]; j = a[j]) {
      seen[j] = 1;
      ++len;
    }
    ord = std::lcm(ord, len);
  }
  return ord;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(Errc::InvalidArgument, "empty range");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do x = engine_(); while (x >= limit);
  return x % n;
}

BigInt StabChain::order() const {
  BigInt n = 1;
  for (const auto& l : levels) n *= l.orbit.size();
  return n;
}

std::pair<Permutation, std::size_t> StabChain::sift(Permutation g, std::size_t from) const {
  for (std::size_t i = from; i < levels.size(); ++i) {
    const auto& l = levels[i];
    const int beta = g[l.base_point];
    const int s = l.slot[beta];
    if (s < 0) return {std::move(g), i};
    if (beta != l.base_point) g = compose(g, l.reps_inv[s]);
  }
  return {std::move(g), levels.size()};
}

bool StabChain::contains(const Permutation& g) const {
  if (g.degree() != degree) return false;
  auto [h, level] = sift(g);
  return level == levels.size() && h.is_identity();
}

Permutation StabChain::random_element(Rng& rng) const {
  Permutation g = Permutation::identity(degree);
  for (auto it = levels.rbegin(); it != levels.rend(); ++it)
    g = compose(g, it->reps[rng.below(it->reps.size())]);
  return g;
}

namespace {

int first_moved(const Permutation& g) {
  for (int i = 0; i < g.degree(); ++i)
    if (g[i] != i) return i;
  return -1;
}

void rebuild_level(StabChain& c, std::size_t i, const std::vector<Permutation>& all) {
  auto& l = c.levels[i];
  l.strong.clear();
  for (const auto& s : all) {
    bool fixes = true;
    for (std::size_t j = 0; j < i && fixes; ++j) fixes = s[c.levels[j].base_point] == c.levels[j].base_point;
    if (fixes) l.strong.push_back(s);
  }
  l.orbit.assign(1, l.base_point);
  l.slot.assign(c.degree, -1);
  l.reps.assign(1, Permutation::identity(c.degree));
  l.reps_inv.assign(1, Permutation::identity(c.degree));
  l.slot[l.base_point] = 0;
  for (std::size_t k = 0; k < l.orbit.size(); ++k) {
    const int b = l.orbit[k];
    for (const auto& s : l.strong) {
      const int img = s[b];
      if (l.slot[img] >= 0) continue;
      l.slot[img] = static_cast<int>(l.reps.size());
      l.orbit.push_back(img);
      l.reps.push_back(compose(l.reps[l.slot[b]], s));
      l.reps_inv.push_back(inverse(l.reps.back()));
    }
  }
}

}  // namespace

StabChain build_chain(int degree, const std::vector<Permutation>& generators) {
  StabChain c;
  c.degree = degree;
  std::vector<Permutation> strong;
  for (const auto& g : generators) {
    if (g.degree() != degree) throw Error(Errc::DegreeMismatch, "generator degree differs from group degree");
    if (!g.is_identity()) strong.push_back(g);
  }
  auto add_base_for = [&](const Permutation& g) {
    for (const auto& l : c.levels)
      if (g[l.base_point] != l.base_point) return;
    StabChain::Level l;
    l.base_point = first_moved(g);
    c.levels.push_back(std::move(l));
  };
  for (const auto& g : strong) add_base_for(g);
  for (std::size_t i = 0; i < c.levels.size(); ++i) rebuild_level(c, i, strong);

  long long i = static_cast<long long>(c.levels.size()) - 1;
  while (i >= 0) {
    rebuild_level(c, static_cast<std::size_t>(i), strong);
    const auto& level = c.levels[i];
    bool extended = false;
    for (std::size_t k = 0; !extended && k < level.orbit.size(); ++k) {
      const int beta = level.orbit[k];
      for (std::size_t si = 0; !extended && si < level.strong.size(); ++si) {
        const auto& s = level.strong[si];
        const int img = s[beta];
        Permutation y = compose(compose(level.reps[level.slot[beta]], s), level.reps_inv[level.slot[img]]);
        if (y.is_identity()) continue;
        auto [h, j] = c.sift(std::move(y), static_cast<std::size_t>(i) + 1);
        if (h.is_identity()) continue;
        if (j == c.levels.size()) {
          StabChain::Level l;
          l.base_point = first_moved(h);
          c.levels.push_back(std::move(l));
        }
        strong.push_back(std::move(h));
        for (std::size_t m = static_cast<std::size_t>(i) + 1; m <= j; ++m) rebuild_level(c, m, strong);
        i = static_cast<long long>(j);
        extended = true;
      }
    }
    if (!extended) --i;
  }
  return c;
}

PermGroup::PermGroup(int degree, std::vector<Permutation> generators)
    : degree_(degree), generators_(std::move(generators)), cache_(std::make_shared<Cache>()) {
  for (const auto& g : generators_)
    if (g.degree() != degree_) throw Error(Errc::DegreeMismatch, "generator degree differs from group degree");
}

const StabChain& PermGroup::chain() const {
  std::call_once(cache_->once, [this] { cache_->chain = build_chain(degree_, generators_); });
  return cache_->chain;
}

std::vector<std::vector<int>> orbits(int n, const std::vector<Permutation>& gens) {
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& g : gens) {
    if (g.degree() != n) throw Error(Errc::DegreeMismatch, "generator degree differs from point count");
    for (int i = 0; i < n; ++i) {
      int a = find(i), b = find(g[i]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::map<int, std::vector<int>> cells;
  for (int i = 0; i < n; ++i) cells[find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  out.reserve(cells.size());
  for (auto& [root, cell] : cells) out.push_back(std::move(cell));
  return out;
}

bool Subgroup::contains(const Permutation& g) const {
  return std::binary_search(elements.begin(), elements.end(), g);
}

std::optional<Subgroup> close_subgroup(int degree, std::vector<Permutation> gens, std::size_t cap) {
  std::set<Permutation> seen{Permutation::identity(degree)};
  std::deque<Permutation> todo{Permutation::identity(degree)};
  while (!todo.empty()) {
    Permutation x = std::move(todo.front());
    todo.pop_front();
    for (const auto& g : gens) {
      Permutation y = compose(x, g);
      if (seen.insert(y).second) {
        if (seen.size() > cap) return std::nullopt;
        todo.push_back(std::move(y));
      }
    }
  }
  Subgroup h;
  h.degree = degree;
  h.generators = std::move(gens);
  h.elements.assign(seen.begin(), seen.end());
  return h;
}

namespace {

Permutation power(const Permutation& g, std::uint64_t k) {
  Permutation result = Permutation::identity(g.degree());
  Permutation base = g;
  while (k) {
    if (k & 1) result = compose(result, base);
    base = compose(base, base);
    k >>= 1;
  }
  return result;
}

bool is_conjugate_to_any(const Subgroup& k, const std::vector<Subgroup>& kept, const StabChain& chain, Rng& rng,
                         int samples) {
  for (const auto& h : kept) {
    if (h.order() != k.order()) continue;
    for (int s = 0; s < samples; ++s) {
      const Permutation t = chain.random_element(rng);
      bool all = true;
      for (const auto& g : h.generators)
        if (!k.contains(conjugate(g, t))) {
          all = false;
          break;
        }
      if (all) return true;
    }
  }
  return false;
}

}  // namespace

SubgroupSearch enumerate_small_subgroups(const PermGroup& group, int target_order, const SearchBudget& budget,
                                         const SubgroupOptions& options) {
  if (target_order < 1) throw Error(Errc::InvalidArgument, "target order must be positive");
  SubgroupSearch out;
  out.seed = budget.seed;
  const StabChain& chain = group.chain();
  const BigInt order = chain.order();
  if (order % target_order != 0) return out;

  const auto cap = static_cast<std::size_t>(target_order);
  const int n = group.degree();
  Rng rng(budget.seed);
  Deadline deadline(budget.wall_clock_ms);

  std::set<std::vector<Permutation>> seen_cyclic, seen_pool, seen_found;
  std::vector<Subgroup> cyclic, pool, found;
  const std::uint64_t max_closures = static_cast<std::uint64_t>(std::max<std::int64_t>(budget.max_nodes, 0));
  bool stop = false;

  auto out_of_budget = [&] {
    if (static_cast<std::int64_t>(found.size()) >= budget.max_subgroups || out.closures_tried >= max_closures ||
        deadline.passed()) {
      out.budget_exhausted = true;
      stop = true;
    }
    return stop;
  };

  auto keep = [&](Subgroup&& h) {
    if (h.order() == cap) {
      if (!seen_found.insert(h.elements).second) return;
      if (options.conjugacy_samples > 0 && is_conjugate_to_any(h, found, chain, rng, options.conjugacy_samples))
        return;
      found.push_back(std::move(h));
    } else if (h.order() > 1 && cap % h.order() == 0) {
      if (seen_pool.insert(h.elements).second) pool.push_back(std::move(h));
    }
  };

  auto try_join = [&](const Subgroup& a, const Subgroup& b) {
    if (a.contains(b.generators.front()) && b.generators.size() == 1) return;
    ++out.closures_tried;
    auto gens = a.generators;
    gens.insert(gens.end(), b.generators.begin(), b.generators.end());
    if (auto h = close_subgroup(n, std::move(gens), cap)) keep(std::move(*h));
  };

  auto consider = [&](const Permutation& g) -> bool {
    const std::uint64_t o = element_order(g);
    bool fresh = false;
    for (int d = 2; d <= target_order; ++d) {
      if (target_order % d != 0 || o % static_cast<std::uint64_t>(d) != 0) continue;
      auto c = close_subgroup(n, {power(g, o / static_cast<std::uint64_t>(d))}, cap);
      if (!c || !seen_cyclic.insert(c->elements).second) continue;
      fresh = true;
      const Subgroup cyc = *c;
      keep(Subgroup(cyc));
      const std::size_t pool_before = pool.size();
      for (std::size_t i = 0; i < cyclic.size() && !out_of_budget(); ++i) try_join(cyclic[i], cyc);
      for (std::size_t i = 0; i < pool_before && !out_of_budget(); ++i) try_join(pool[i], cyc);
      // Subgroups that entered the pool just now meet the earlier cyclic ones.
      for (std::size_t p = pool_before; p < pool.size() && !out_of_budget(); ++p)
        for (std::size_t i = 0; i < cyclic.size() && !out_of_budget(); ++i) try_join(pool[p], cyclic[i]);
      cyclic.push_back(cyc);
      if (stop) break;
    }
    return fresh;
  };

  if (order <= options.exhaustive_up_to) {
    auto all = close_subgroup(n, group.generators().empty() ? std::vector<Permutation>{Permutation::identity(n)}
                                                            : group.generators(),
                              static_cast<std::size_t>(options.exhaustive_up_to));
    for (const auto& g : all->elements) {
      if (out_of_budget()) break;
      consider(g);
    }
  } else {
    int stale = 0;
    while (!out_of_budget() && stale < options.stale_limit) {
      if (consider(chain.random_element(rng)))
        stale = 0;
      else
        ++stale;
    }
  }

  std::sort(found.begin(), found.end(), [](const Subgroup& a, const Subgroup& b) { return a.elements < b.elements; });
  out.subgroups = std::move(found);
  return out;
}

}  // namespace unital
