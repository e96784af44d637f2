#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

namespace rtw {

// 64-bit FNV-1a.
inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(std::span<const std::uint8_t> bytes,
                    std::uint64_t state = kFnvOffset);
std::uint64_t fnv1a(std::string_view text, std::uint64_t state = kFnvOffset);

// FNV-1a over the 8 little-endian bytes of `seed`, then the UTF-8 bytes of
// `id`.
std::uint64_t stream_key(std::uint64_t seed, std::string_view id);

// Counter-based generator: draw i is mix(key + i * golden), so a stream is a
// pure function of (key, counter) and never shares state with another.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  // [0,1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  // Inclusive range, unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  bool bernoulli(double p);
  double normal(double mean = 0.0, double stddev = 1.0);
  // Index i drawn with probability proportional to its weight, given the
  // inclusive running sums of the weights.
  std::size_t weighted_index(std::span<const double> cumulative);

  // Independent child stream; the parent is not advanced.
  Rng fork(std::string_view tag) const;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

Rng derive_rng(std::uint64_t global_seed, std::string_view image_id);

}  // namespace rtw
