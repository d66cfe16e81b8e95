#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace wordrec {

// Mixes two seeds into one; used to derive independent per-item streams
// (per utterance, per class, per restart) from a single run seed.
uint64_t mix_seed(uint64_t a, uint64_t b);

// Deterministic splitmix64 generator. All randomness in the library flows
// through this class so identical seeds give identical runs everywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64();

  // [0, 1), 53-bit resolution
  double uniform01();

  double uniform(double lo, double hi);

  // [0, n); n must be > 0
  std::size_t uniform_index(std::size_t n);

  double gaussian(double mean = 0.0, double stddev = 1.0);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

 private:
  uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wordrec
