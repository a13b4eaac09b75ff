#pragma once

#include <cmath>
#include <cstdint>

namespace hdinfer {

// Stream tags used to keep the RNG consumers of one seed independent of
// each other. Substreams are addressed as (seed, tag, index), so draws can
// be assigned up front and evaluated in any order or on any thread count
// without changing the numbers.
enum : std::uint64_t {
  kStreamDesign = 1,
  kStreamNoise = 2,
  kStreamNullDraw = 3,
  kStreamGroupDraw = 4,
};

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ with Box-Muller normals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) { seed_from(seed, 0, 0, 0); }

  static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0) {
    Rng r(0);
    r.seed_from(seed, a, b, c);
    return r;
  }

  std::uint64_t next() {
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

  // Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925287 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  void seed_from(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t sm = seed;
    sm = splitmix64_next(sm) ^ (a * 0xd1342543de82ef95ULL);
    sm = splitmix64_next(sm) ^ (b * 0xaf251af3b0f025b5ULL);
    sm = splitmix64_next(sm) ^ (c * 0x9e3779b97f4a7c15ULL);
    for (auto& w : s_) w = splitmix64_next(sm);
    // xoshiro must not start from the all-zero state
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x1ULL;
  }

  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hdinfer
