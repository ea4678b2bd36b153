#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace unital {

// Fixed-size dynamic bitset stored in 64-bit words. Intersection counts are
// word-parallel; this is the inner loop of the unital checks.
class Bits {
public:
  Bits() = default;
  explicit Bits(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const { return size_; }
  std::size_t num_words() const { return words_.size(); }

  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  std::size_t count_and(const Bits& other) const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      n += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
    return n;
  }

  bool intersects(const Bits& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & other.words_[i]) return true;
    return false;
  }

  Bits& operator|=(const Bits& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
    return *this;
  }

  // Indices of set bits in increasing order.
  std::vector<int> indices() const {
    std::vector<int> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      auto word = words_[w];
      while (word) {
        out.push_back(static_cast<int>(w * 64 + std::countr_zero(word)));
        word &= word - 1;
      }
    }
    return out;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

  friend bool operator==(const Bits&, const Bits&) = default;

private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace unital
