#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace dctree {

// Seeded RNG with hand-rolled draws. The mt19937_64 output sequence is fixed
// by the standard while std::uniform_* distributions are not, so routing all
// sampling through this class keeps seeded runs byte-reproducible across
// toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t raw() { return gen_(); }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(raw() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  // Uniform integer in [0, n); n > 0.
  uint64_t below(uint64_t n) { return raw() % n; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace dctree
