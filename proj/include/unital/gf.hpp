#pragma once

#include <cstdint>
#include <vector>

namespace unital {

// Table-driven GF(p^e) for q <= 4096. Elements are 0..q-1, read as the
// base-p digits of a polynomial in the generator. The defining polynomial is
// the smallest primitive one when its coefficients are read as a base-p
// integer, so GF(16) is built on x^4 + x + 1 and GF(4) on x^2 + x + 1.
class GaloisField {
public:
  explicit GaloisField(int q);

  int order() const { return q_; }
  int characteristic() const { return p_; }
  int degree() const { return e_; }
  // Coefficients of the monic defining polynomial, low degree first.
  const std::vector<int>& modulus() const { return modulus_; }

  int add(int a, int b) const { return add_[index(a, b)]; }
  int sub(int a, int b) const { return add(a, neg_[b]); }
  int neg(int a) const { return neg_[a]; }
  int mul(int a, int b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }
  int inv(int a) const;  // a != 0
  int pow(int a, long long n) const;
  // x^(p^k), the k-th power of the Frobenius automorphism.
  int frobenius(int a, int k = 1) const;

  int primitive_element() const { return exp_[1]; }

private:
  std::size_t index(int a, int b) const { return static_cast<std::size_t>(a) * q_ + b; }

  int q_ = 0;
  int p_ = 0;
  int e_ = 0;
  std::vector<int> modulus_;
  std::vector<int> add_;
  std::vector<int> neg_;
  std::vector<int> log_;
  std::vector<int> exp_;  // length 2(q-1) so log sums need no reduction
};

// p^e = q decomposition; throws Error(InvalidArgument) if q is not a prime power.
void prime_power(int q, int& p, int& e);

bool is_prime(long long n);

}  // namespace unital
