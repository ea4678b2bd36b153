#pragma once

#include <doctest.h>

#include <memory>
#include <vector>

#include "unital/construct.hpp"
#include "unital/error.hpp"
#include "unital/incidence.hpp"
#include "unital/unitals.hpp"

#define CHECK_ERRC(expr, errc)                                  \
  do {                                                          \
    bool thrown_ = false;                                       \
    try {                                                       \
      (void)(expr);                                             \
    } catch (const ::unital::Error& e_) {                       \
      thrown_ = true;                                           \
      CHECK(e_.code() == (errc));                               \
    }                                                           \
    CHECK_MESSAGE(thrown_, "expected an exception: " #expr);    \
  } while (0)

namespace testing {

inline unital::IncidenceStructure fano() {
  return unital::IncidenceStructure(7, {{0, 1, 2}, {0, 3, 4}, {0, 5, 6}, {1, 3, 5}, {1, 4, 6}, {2, 3, 6}, {2, 4, 5}});
}

inline const unital::PlanePtr& pg16() {
  static const auto p = std::make_shared<const unital::ProjectivePlane>(unital::desarguesian_plane(16));
  return p;
}

inline const unital::PlanePtr& hall16() {
  static const auto p = std::make_shared<const unital::ProjectivePlane>(unital::hall_plane(4));
  return p;
}

// Zeros of x^(q+1) + y^(q+1) + z^(q+1) in PG(2,q^2), evaluated point by
// point from the coordinate list.
inline std::vector<int> hermitian_by_brute_force(int q) {
  unital::DesarguesianModel m(q * q);
  const auto& f = m.field;
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(m.points.size()); ++i) {
    int s = 0;
    for (int c : m.points[i]) {
      int pw = 1;
      for (int e = 0; e < q + 1; ++e) pw = f.mul(pw, c);
      s = f.add(s, pw);
    }
    if (s == 0) out.push_back(i);
  }
  return out;
}

}  // namespace testing
