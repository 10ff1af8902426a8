#pragma once

#include <cstdint>

namespace ggibbs {

// Counter-based generator: the k-th output is a pure function of (key, k),
// so streams can be split and replayed independently of call order.
// Mixer is the splitmix64 finalizer.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(seed) {}

  static const char* name() { return "splitmix64-counter"; }

  static std::uint64_t mix(std::uint64_t key, std::uint64_t ctr) {
    std::uint64_t z = key + 0x9e3779b97f4a7c15ULL * (ctr + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() { return mix(key_, ctr_++); }

  double uniform01() {  // in [0,1), 53 random bits
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  int uniform_int(int n) {  // in [0, n)
    return static_cast<int>(next() % static_cast<std::uint64_t>(n));
  }

  // replica / worker streams: hash-combine the master seed with an index
  static std::uint64_t derive(std::uint64_t master, std::uint64_t stream) {
    return mix(master ^ 0xd6e8feb86659fd93ULL, stream);
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return ctr_; }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace ggibbs
