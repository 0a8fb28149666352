#pragma once

#include <cstdint>
#include <random>

namespace icsa {

// Deterministic random stream identified by (seed, stream id). Streams with
// different ids are seeded through std::seed_seq and are treated as
// independent. A stream is not safe to share between threads.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  double normal();
  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  // Uniform integer in [0, bound).
  std::size_t uniform_index(std::size_t bound);

  // Fresh stream derived from this stream's identity and `child`; does not
  // consume draws from this stream.
  RngStream derive(std::uint64_t child) const;

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Order-sensitive 64-bit mixing of a key tuple (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

template <class... Ts>
std::uint64_t stream_key(Ts... parts) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  ((h = mix64(h ^ (static_cast<std::uint64_t>(parts) + 0x632be59bd9b4e019ULL))), ...);
  return h;
}

}  // namespace icsa
