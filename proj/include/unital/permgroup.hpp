#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <vector>

#include "unital/budget.hpp"

namespace unital {

using BigInt = boost::multiprecision::cpp_int;

// Bijection of {0..n-1}; point i goes to images()[i].
class Permutation {
public:
  Permutation() = default;
  // Throws Error(InvalidArgument) unless images is a bijection.
  explicit Permutation(std::vector<int> images);

  static Permutation identity(int n);
  // Product of disjoint or overlapping cycles, applied left to right.
  static Permutation from_cycles(int n, std::initializer_list<std::initializer_list<int>> cycles);

  int degree() const { return static_cast<int>(images_.size()); }
  int operator[](int i) const { return images_[i]; }
  const std::vector<int>& images() const { return images_; }
  bool is_identity() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation& a, const Permutation& b) { return a.images_ <=> b.images_; }

private:
  struct Trusted {};
  Permutation(std::vector<int> images, Trusted) : images_(std::move(images)) {}
  friend Permutation compose(const Permutation&, const Permutation&);
  friend Permutation inverse(const Permutation&);

  std::vector<int> images_;
};

// compose(a, b) applies a first, then b: i -> b[a[i]]. Throws
// Error(DegreeMismatch) for unequal degrees.
Permutation compose(const Permutation& a, const Permutation& b);
Permutation inverse(const Permutation& a);
inline Permutation identity(int n) { return Permutation::identity(n); }
// b^-1 a b.
Permutation conjugate(const Permutation& a, const Permutation& b);
std::uint64_t element_order(const Permutation& a);

// Seedable generator used by every randomized routine. Bounded draws use
// rejection sampling so sequences do not depend on the standard library's
// distribution implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  std::uint64_t below(std::uint64_t n);

private:
  std::mt19937_64 engine_;
};

// Base and strong generating set with explicit transversals.
struct StabChain {
  struct Level {
    int base_point = 0;
    std::vector<Permutation> strong;      // generators fixing all earlier base points
    std::vector<int> orbit;               // orbit of base_point, discovery order
    std::vector<int> slot;                // point -> index into reps, or -1
    std::vector<Permutation> reps;        // reps[slot[b]] maps base_point to b
    std::vector<Permutation> reps_inv;
  };
  int degree = 0;
  std::vector<Level> levels;

  BigInt order() const;
  // Strips g through the chain; returns the residue and the first level at
  // which stripping stopped (levels.size() if it went all the way).
  std::pair<Permutation, std::size_t> sift(Permutation g, std::size_t from = 0) const;
  bool contains(const Permutation& g) const;
  Permutation random_element(Rng& rng) const;
};

// Permutation group given by generators. The stabilizer chain is built on
// first use and cached; a PermGroup is safe to share once built.
class PermGroup {
public:
  PermGroup() : PermGroup(0, {}) {}
  // Throws Error(DegreeMismatch) if a generator has a different degree.
  PermGroup(int degree, std::vector<Permutation> generators);

  int degree() const { return degree_; }
  const std::vector<Permutation>& generators() const { return generators_; }

  const StabChain& chain() const;
  BigInt order() const { return chain().order(); }
  bool contains(const Permutation& g) const { return chain().contains(g); }

private:
  struct Cache {
    std::once_flag once;
    StabChain chain;
  };
  int degree_;
  std::vector<Permutation> generators_;
  std::shared_ptr<Cache> cache_;
};

// Deterministic Schreier-Sims.
StabChain build_chain(int degree, const std::vector<Permutation>& generators);

// Orbits of the group generated by gens on {0..n-1}, each sorted, cells
// ordered by their minimum.
std::vector<std::vector<int>> orbits(int n, const std::vector<Permutation>& gens);
inline std::vector<std::vector<int>> orbits(const PermGroup& g) { return orbits(g.degree(), g.generators()); }

// A subgroup small enough to hold all of its elements.
struct Subgroup {
  int degree = 0;
  std::vector<Permutation> generators;
  std::vector<Permutation> elements;  // sorted, identity included

  std::size_t order() const { return elements.size(); }
  bool contains(const Permutation& g) const;
};

inline std::vector<std::vector<int>> orbits(const Subgroup& h) { return orbits(h.degree, h.generators); }

// Closure of gens, abandoned once it exceeds cap elements.
std::optional<Subgroup> close_subgroup(int degree, std::vector<Permutation> gens, std::size_t cap);

struct SubgroupSearch {
  std::vector<Subgroup> subgroups;  // sorted by element list
  bool budget_exhausted = false;
  std::uint64_t seed = 0;
  std::uint64_t closures_tried = 0;
};

struct SubgroupOptions {
  // Random conjugates tried against each kept subgroup before a new one is
  // accepted; 0 keeps all element-distinct subgroups.
  int conjugacy_samples = 0;
  // Consecutive random elements yielding no new cyclic subgroup before the
  // sampler stops on its own.
  int stale_limit = 400;
  // Groups up to this order are enumerated element by element instead of
  // sampled.
  std::uint64_t exhaustive_up_to = 5000;
};

// Subgroups of exactly target_order generated by two cyclic subgroups, or
// by a found subgroup plus one cyclic subgroup. Not exhaustive.
SubgroupSearch enumerate_small_subgroups(const PermGroup& group, int target_order, const SearchBudget& budget,
                                         const SubgroupOptions& options = {});

}  // namespace unital
