#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace dal {

// Counter-based generator (Philox 4x64, 10 rounds). Distinct
// (key, counter) pairs give statistically independent outputs, so
// per-sample streams fan out in parallel with no shared state.
struct Philox4x64 {
  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

  static inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    __uint128_t p = static_cast<__uint128_t>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
  }

  static std::array<std::uint64_t, 4> block(std::array<std::uint64_t, 2> key,
                                            std::array<std::uint64_t, 4> ctr) {
    for (int round = 0; round < 10; ++round) {
      std::uint64_t hi0, lo0, hi1, lo1;
      mulhilo(kMul0, ctr[0], hi0, lo0);
      mulhilo(kMul1, ctr[2], hi1, lo1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }
};

/// One logical random stream, keyed by (master_seed, purpose) with the
/// (center, sample) pair folded into the counter block. Draw order is the
/// only state; identical construction gives identical draws.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t purpose,
               std::uint64_t center_index = 0, std::uint64_t sample_index = 0)
      : key_{master_seed, purpose}, base_{0, sample_index, center_index, 0} {}

  std::uint64_t next_u64() {
    if (pos_ == 4) {
      refill();
    }
    return buf_[pos_++];
  }

  /// Uniform double in [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, n).
  std::uint64_t uniform_below(std::uint64_t n) {
    // Rejection-free modulo is fine here: n is tiny versus 2^64.
    return next_u64() % n;
  }

  double normal() {
    // Marsaglia polar; draws come in pairs but we keep it stateless-simple.
    for (;;) {
      double u = 2.0 * uniform01() - 1.0;
      double v = 2.0 * uniform01() - 1.0;
      double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) {
        double f = std::sqrt(-2.0 * std::log(s) / s);
        return u * f;
      }
    }
  }

 private:
  void refill() {
    auto ctr = base_;
    ctr[0] = block_;
    buf_ = Philox4x64::block(key_, ctr);
    ++block_;
    pos_ = 0;
  }

  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> base_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 4> buf_{};
  int pos_ = 4;
};

/// Stream purpose tags; keep values frozen, results depend on them.
enum class StreamPurpose : std::uint64_t {
  Potential = 1,
  RandomCellGeometry = 2,
  CertifierVectors = 3,
  Dynamics = 4,
  TestVectors = 5,
};

inline RandomStream make_stream(std::uint64_t master_seed, StreamPurpose purpose,
                                std::uint64_t center_index = 0, std::uint64_t sample_index = 0) {
  return RandomStream(master_seed, static_cast<std::uint64_t>(purpose), center_index, sample_index);
}

}  // namespace dal
