#include "unital/construct.hpp"

#include "unital/error.hpp"

namespace unital {

DesarguesianModel::DesarguesianModel(int q) : field(q) {
  index_.assign(static_cast<std::size_t>(q) * q * q, -1);
  for (int x0 = 0; x0 < q; ++x0)
    for (int x1 = 0; x1 < q; ++x1)
      for (int x2 = 0; x2 < q; ++x2) {
        std::array<int, 3> v{x0, x1, x2};
        if (v == std::array<int, 3>{0, 0, 0}) continue;
        if (normalize(v) != v) continue;
        index_[(static_cast<std::size_t>(x0) * q + x1) * q + x2] = static_cast<int>(points.size());
        points.push_back(v);
      }
  lines = points;
}

std::array<int, 3> DesarguesianModel::normalize(std::array<int, 3> v) const {
  int lead = 0;
  for (int c : v)
    if (c != 0) {
      lead = c;
      break;
    }
  if (lead == 0) throw Error(Errc::InvalidArgument, "zero vector has no projective point");
  const int s = field.inv(lead);
  for (int& c : v) c = field.mul(c, s);
  return v;
}

int DesarguesianModel::point_index(std::array<int, 3> v) const {
  v = normalize(v);
  const int q = field.order();
  return index_[(static_cast<std::size_t>(v[0]) * q + v[1]) * q + v[2]];
}

std::vector<Block> DesarguesianModel::line_sets() const {
  std::vector<Block> out;
  out.reserve(lines.size());
  for (const auto& l : lines) {
    Block b;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& x = points[i];
      int s = field.add(field.add(field.mul(l[0], x[0]), field.mul(l[1], x[1])), field.mul(l[2], x[2]));
      if (s == 0) b.push_back(static_cast<int>(i));
    }
    out.push_back(std::move(b));
  }
  return out;
}

ProjectivePlane desarguesian_plane(int q) {
  DesarguesianModel model(q);
  IncidenceStructure s(static_cast<int>(model.points.size()), model.line_sets());
  return verify_plane(s, q, "PG(2," + std::to_string(q) + ")");
}

ProjectivePlane translation_plane(int n, const std::vector<int>& add, const std::vector<int>& mul,
                                  std::string name) {
  const auto nn = static_cast<std::size_t>(n) * n;
  if (add.size() != nn || mul.size() != nn) throw Error(Errc::InvalidArgument, "quasifield tables must be n*n");
  const int infinity = n * n + n;
  std::vector<Block> lines;
  lines.reserve(nn + n + 1);
  for (int m = 0; m < n; ++m)
    for (int b = 0; b < n; ++b) {
      Block line;
      for (int x = 0; x < n; ++x) line.push_back(x * n + add[mul[x * n + m] * n + b]);
      line.push_back(n * n + m);
      lines.push_back(std::move(line));
    }
  for (int c = 0; c < n; ++c) {
    Block line;
    for (int y = 0; y < n; ++y) line.push_back(c * n + y);
    line.push_back(infinity);
    lines.push_back(std::move(line));
  }
  Block at_infinity;
  for (int i = 0; i <= n; ++i) at_infinity.push_back(n * n + i);
  lines.push_back(std::move(at_infinity));
  return verify_plane(IncidenceStructure(n * n + n + 1, std::move(lines)), n, std::move(name));
}

ProjectivePlane hall_plane(int q) {
  GaloisField f(q);
  int r = -1, s = -1;
  for (int rr = 0; rr < q && r < 0; ++rr)
    for (int ss = 1; ss < q && r < 0; ++ss) {
      bool has_root = false;
      for (int x = 0; x < q; ++x)
        if (f.sub(f.sub(f.mul(x, x), f.mul(rr, x)), ss) == 0) has_root = true;
      if (!has_root) {
        r = rr;
        s = ss;
      }
    }
  auto poly = [&](int x) { return f.sub(f.sub(f.mul(x, x), f.mul(r, x)), s); };

  // Element a + lambda*b is encoded as a + q*b.
  const int n = q * q;
  std::vector<int> add(static_cast<std::size_t>(n) * n), mul(static_cast<std::size_t>(n) * n);
  for (int u = 0; u < n; ++u)
    for (int w = 0; w < n; ++w) {
      const int a = u % q, b = u / q, c = w % q, d = w / q;
      add[u * n + w] = f.add(a, c) + q * f.add(b, d);
      int lo, hi;
      if (d == 0) {
        lo = f.mul(a, c);
        hi = f.mul(b, c);
      } else {
        lo = f.sub(f.mul(a, c), f.mul(f.mul(b, f.inv(d)), poly(c)));
        hi = f.add(f.sub(f.mul(a, d), f.mul(b, c)), f.mul(b, r));
      }
      mul[u * n + w] = lo + q * hi;
    }
  return translation_plane(n, add, mul, "Hall(" + std::to_string(n) + ")");
}

}  // namespace unital
