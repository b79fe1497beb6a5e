#pragma once

#include <cmath>
#include <cstdint>

namespace gcmlab {

//! Philox-4x32-10 counter-based generator.
//!
//! Streams are indexed by (key, stream): distinct stream ids give
//! statistically independent sequences, so replication j of a Monte Carlo
//! run simply uses stream j of the master seed. Replay is bit-identical.
class Rng {
public:
  explicit Rng(std::uint64_t key, std::uint64_t stream = 0)
      : key_(key), stream_(stream) {}

  std::uint64_t next_u64() {
    if (have_half_) {
      have_half_ = false;
      return (std::uint64_t(block_[2]) << 32) | block_[3];
    }
    philox_block();
    have_half_ = true;
    return (std::uint64_t(block_[0]) << 32) | block_[1];
  }

  //! Uniform on (0, 1); never returns 0 or 1.
  double uniform01() {
    return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  //! Standard normal via Box-Muller (deterministic, no library dependence).
  double normal() {
    if (have_gauss_) {
      have_gauss_ = false;
      return gauss_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    gauss_ = r * std::sin(a);
    have_gauss_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  void philox_block() {
    std::uint32_t c0 = std::uint32_t(counter_);
    std::uint32_t c1 = std::uint32_t(counter_ >> 32);
    std::uint32_t c2 = std::uint32_t(stream_);
    std::uint32_t c3 = std::uint32_t(stream_ >> 32);
    std::uint32_t k0 = std::uint32_t(key_);
    std::uint32_t k1 = std::uint32_t(key_ >> 32);
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t(kMul0) * c0;
      const std::uint64_t p1 = std::uint64_t(kMul1) * c2;
      const std::uint32_t hi0 = std::uint32_t(p0 >> 32);
      const std::uint32_t lo0 = std::uint32_t(p0);
      const std::uint32_t hi1 = std::uint32_t(p1 >> 32);
      const std::uint32_t lo1 = std::uint32_t(p1);
      const std::uint32_t n0 = hi1 ^ c1 ^ k0;
      const std::uint32_t n1 = lo1;
      const std::uint32_t n2 = hi0 ^ c3 ^ k1;
      const std::uint32_t n3 = lo0;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    block_[0] = c0;
    block_[1] = c1;
    block_[2] = c2;
    block_[3] = c3;
    ++counter_;
  }

  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::uint32_t block_[4] = {0, 0, 0, 0};
  bool have_half_ = false;
  bool have_gauss_ = false;
  double gauss_ = 0.0;
};

//! Stream id used for replication j of a run keyed by a master seed.
inline std::uint64_t replication_stream(std::uint64_t block,
                                        std::uint64_t replication) {
  return (block << 32) ^ replication;
}

}  // namespace gcmlab
