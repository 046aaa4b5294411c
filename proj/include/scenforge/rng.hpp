#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace scenforge {

// Deterministic PRNG used for every random decision in the toolkit.
// splitmix64 keeps results identical across platforms and standard
// libraries, which std::uniform_int_distribution does not guarantee.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::uniform: empty range");
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Uniform double in [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  template <typename T>
  const T& choice(const std::vector<T>& v) {
    if (v.empty()) throw std::invalid_argument("Rng::choice: empty vector");
    return v[uniform(v.size())];
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Independent child stream; derivation is order-free in `index` so
  // batch workers can run in any order.
  Rng child(std::uint64_t index) const {
    std::uint64_t mixed = state_ ^ (0xD1B54A32D192ED03ULL * (index + 1));
    Rng r(mixed);
    r.next_u64();
    return r;
  }

  std::uint64_t seed_state() const { return state_; }

private:
  std::uint64_t state_;
};

} // namespace scenforge
