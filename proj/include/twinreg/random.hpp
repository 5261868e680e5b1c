#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "twinreg/stats.hpp"

namespace twinreg {

// Deterministic random source. All distributions are derived from the raw
// 64-bit stream in-library so that results do not depend on standard library
// internals; a given seed reproduces the same draws on every run.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  /// Uniform on (0,1), never returning the endpoints.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via the inverse CDF.
  double normal() { return std_normal_quantile(uniform()); }

  /// Uniform index in [0, n) (Lemire multiply-shift).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

  std::vector<int> permutation(int n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    shuffle(p);
    return p;
  }

  /// k distinct indices drawn from {0,...,n-1}, in draw order.
  std::vector<int> sample_without_replacement(int n, int k) {
    std::vector<int> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<int> out;
    out.reserve(k);
    for (int i = 0; i < k; ++i) {
      std::size_t j = index(pool.size());
      out.push_back(pool[j]);
      pool[j] = pool.back();
      pool.pop_back();
    }
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

} // namespace twinreg
