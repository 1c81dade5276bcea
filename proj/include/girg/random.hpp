#pragma once

#include <cstdint>
#include <limits>

namespace girg {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// Counter-based random stream identified by (seed, stream_id).
///
/// Draw i of a stream is a pure function of (seed, stream_id, i), so any
/// index can be evaluated directly with `u64_at` without advancing state.
/// `substream` derives an independent child stream, which is how per-vertex,
/// per-pair and per-trial randomness is keyed throughout the library.
/// The sequential interface (`next_u64`, `uniform`, ...) satisfies
/// UniformRandomBitGenerator so the stream can feed <random> distributions.
class SeededStream {
 public:
  using result_type = std::uint64_t;

  constexpr explicit SeededStream(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept
      : seed_(seed), stream_id_(stream_id), key_(mix64(seed ^ mix64(stream_id + kGoldenGamma))) {}

  constexpr std::uint64_t seed() const noexcept { return seed_; }
  constexpr std::uint64_t stream_id() const noexcept { return stream_id_; }

  constexpr SeededStream substream(std::uint64_t index) const noexcept {
    return SeededStream(seed_, mix64(stream_id_ ^ mix64(index * kGoldenGamma + 0x632be59bd9b4e019ULL)));
  }

  constexpr std::uint64_t u64_at(std::uint64_t index) const noexcept {
    return mix64(key_ + (index + 1) * kGoldenGamma);
  }
  /// Uniform on [0, 1).
  constexpr double uniform_at(std::uint64_t index) const noexcept {
    return static_cast<double>(u64_at(index) >> 11) * 0x1.0p-53;
  }
  /// Uniform on (0, 1].
  constexpr double uniform_open_left_at(std::uint64_t index) const noexcept {
    return static_cast<double>((u64_at(index) >> 11) + 1) * 0x1.0p-53;
  }

  constexpr std::uint64_t next_u64() noexcept { return u64_at(counter_++); }
  constexpr double uniform() noexcept { return uniform_at(counter_++); }
  constexpr double uniform_open_left() noexcept { return uniform_open_left_at(counter_++); }
  constexpr bool bernoulli(double p) noexcept { return uniform() < p; }
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  constexpr result_type operator()() noexcept { return next_u64(); }
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  friend constexpr bool operator==(const SeededStream& a, const SeededStream& b) noexcept {
    return a.seed_ == b.seed_ && a.stream_id_ == b.stream_id_;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Well-known substream tags so that different consumers of one seed never
// share draws.
namespace streams {
inline constexpr std::uint64_t kWeights = 1;
inline constexpr std::uint64_t kPositions = 2;
inline constexpr std::uint64_t kEdges = 3;
inline constexpr std::uint64_t kTrials = 4;
inline constexpr std::uint64_t kGraphs = 5;
}  // namespace streams

}  // namespace girg
