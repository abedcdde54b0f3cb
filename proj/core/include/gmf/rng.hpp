#pragma once

#include <cstdint>
#include <random>

namespace gmf {

// splitmix64 step, used to derive child seeds from a parent seed and an index.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  return splitmix64(master_seed ^ splitmix64(index + 0x5851f42d4c957f2dULL));
}

/// A deterministic random stream keyed by (master_seed, stream_id).
///
/// Streams with distinct key pairs are statistically independent; identical
/// pairs reproduce the same draw sequence bit-for-bit within one build.
/// All randomness in the project flows through RngStream so that every
/// experiment is a pure function of (config, master_seed).
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : master_seed_(master_seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32)};
    engine_.seed(seq);
  }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  std::mt19937_64& engine() { return engine_; }
  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Child stream for batch/chunk k, independent of this stream and of
  /// siblings with a different k.
  RngStream substream(std::uint64_t k) const {
    return RngStream(master_seed_, splitmix64(stream_id_ ^ splitmix64(k + 1)));
  }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Stream-id channels within one replica context: 0 drives the signal path,
// 1 the observation noise, 2+r the particle/resampling randomness of
// replica r.
inline constexpr std::uint64_t kSignalStream = 0;
inline constexpr std::uint64_t kObservationStream = 1;
inline constexpr std::uint64_t kParticleStreamBase = 2;

}  // namespace gmf
