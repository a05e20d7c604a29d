#pragma once

#include <cstdint>

// Counter-split seeding: one master seed, substreams derived by hashing
// (master, tag, indices).  Particle i / replicate j always sees the same
// stream regardless of N or J, so changing either never correlates runs.

namespace cpf {

// Splitmix64 round; also the stream-derivation hash.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = splitmix64(master ^ 0x6a09e667f3bcc909ull);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  s = splitmix64(s ^ c);
  return s;
}

namespace streams {
constexpr std::uint64_t init = 1;       // initial particle draws
constexpr std::uint64_t resample = 2;   // SISR resampling, per step
constexpr std::uint64_t parametric = 3; // parametric-filter MC, per step
constexpr std::uint64_t replicate = 4;  // Monte-Carlo replicates
constexpr std::uint64_t generic = 5;    // tests / ad-hoc sampling
}  // namespace streams

// xoshiro256++ with a Box-Muller normal on top.  Self-contained so that
// seeded outputs are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& si : s_) {
      x = splitmix64(x);
      si = x;
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform on [0, 1)
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // standard normal (Box-Muller, spare cached)
  double normal();

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cpf
