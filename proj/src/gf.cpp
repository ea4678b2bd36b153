#include "unital/gf.hpp"

#include <string>

#include "unital/error.hpp"

namespace unital {

bool is_prime(long long n) {
  if (n < 2) return false;
  for (long long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

void prime_power(int q, int& p, int& e) {
  if (q < 2) throw Error(Errc::InvalidArgument, "field order must be at least 2");
  p = 2;
  while (q % p != 0) ++p;
  e = 0;
  int r = q;
  while (r % p == 0) {
    r /= p;
    ++e;
  }
  if (r != 1) throw Error(Errc::InvalidArgument, std::to_string(q) + " is not a prime power");
}

namespace {

// Multiplies polynomial a (base-p digits) by x modulo the monic polynomial
// whose lower coefficients are `low`.
int times_x(int a, int p, int e, const std::vector<int>& low) {
  std::vector<int> d(e + 1, 0);
  for (int i = 0; i < e; ++i) {
    d[i + 1] = a % p;
    a /= p;
  }
  const int top = d[e];
  for (int i = 0; i < e; ++i) d[i] = ((d[i] - top * low[i]) % p + p) % p;
  int out = 0;
  for (int i = e - 1; i >= 0; --i) out = out * p + d[i];
  return out;
}

}  // namespace

GaloisField::GaloisField(int q) : q_(q) {
  prime_power(q, p_, e_);
  if (q > 4096) throw Error(Errc::InvalidArgument, "field too large for table arithmetic");

  add_.resize(static_cast<std::size_t>(q) * q);
  neg_.resize(q);
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      int x = a, y = b, out = 0, scale = 1;
      for (int i = 0; i < e_; ++i) {
        out += ((x % p_ + y % p_) % p_) * scale;
        x /= p_;
        y /= p_;
        scale *= p_;
      }
      add_[index(a, b)] = out;
    }
    int x = a, out = 0, scale = 1;
    for (int i = 0; i < e_; ++i) {
      out += ((p_ - x % p_) % p_) * scale;
      x /= p_;
      scale *= p_;
    }
    neg_[a] = out;
  }

  const int qm1 = q - 1;
  auto fill_tables = [&](auto&& step) {
    exp_.resize(2 * static_cast<std::size_t>(qm1));
    log_.assign(q, 0);
    int v = 1;
    for (int i = 0; i < 2 * qm1; ++i) {
      exp_[i] = v;
      if (i < qm1) log_[v] = i;
      v = step(v);
    }
  };

  if (e_ == 1) {
    // Prime field: modulus x - g for the smallest primitive root g.
    for (int g = 1; g < p_; ++g) {
      int v = 1, ord = 0;
      do {
        v = v * g % p_;
        ++ord;
      } while (v != 1);
      if (ord == qm1) {
        modulus_ = {(p_ - g) % p_, 1};
        fill_tables([&](int a) { return a * g % p_; });
        return;
      }
    }
  }

  // Monic degree-e polynomials in increasing order; keep the first for which
  // x has multiplicative order q-1.
  for (int code = 0; code < q; ++code) {
    std::vector<int> low(e_);
    int c = code;
    for (int i = 0; i < e_; ++i) {
      low[i] = c % p_;
      c /= p_;
    }
    if (low[0] == 0) continue;
    int v = 1, ord = 0;
    do {
      v = times_x(v, p_, e_, low);
      ++ord;
    } while (v != 1 && v != 0 && ord <= qm1);
    if (v != 1 || ord != qm1) continue;
    modulus_ = low;
    modulus_.push_back(1);
    fill_tables([&](int a) { return times_x(a, p_, e_, low); });
    return;
  }
  throw Error(Errc::InvalidArgument, "no primitive polynomial found");
}

int GaloisField::inv(int a) const {
  if (a == 0) throw Error(Errc::InvalidArgument, "inverse of zero");
  return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
}

int GaloisField::pow(int a, long long n) const {
  if (n == 0) return 1;
  if (a == 0) return 0;
  const long long m = q_ - 1;
  long long k = (static_cast<long long>(log_[a]) * (n % m)) % m;
  if (k < 0) k += m;
  return exp_[k];
}

int GaloisField::frobenius(int a, int k) const {
  long long n = 1;
  for (int i = 0; i < k; ++i) n *= p_;
  return pow(a, n);
}

}  // namespace unital
