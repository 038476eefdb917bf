#pragma once

#include <cstdint>

namespace exest {

// Counter-based substream generator. A stream is addressed by
// (master_seed, stream_id); draw n of a stream is a pure function of
// (master_seed, stream_id, n), so replicates can be generated in any
// order, on any number of workers, with identical results.
//
// The core is the splitmix64 sequence: the state walks an additive
// orbit and each output is a strong 64-bit finalizer of the state.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : state_(derive(master_seed, stream_id)) {}

  std::uint64_t next_u64() {
    state_ += kGamma;
    return finalize(state_);
  }

  // Uniform strictly inside (0,1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static std::uint64_t finalize(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  static std::uint64_t derive(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = finalize(master + kGamma);
    return finalize(s ^ (stream * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull));
  }

  std::uint64_t state_;
};

// Stream addressing for a replicated experiment: replicate i draws from
// stream (master_seed, i).
struct SubstreamFactory {
  std::uint64_t master_seed = 0;
  RngStream stream(std::uint64_t index) const { return RngStream(master_seed, index); }
};

}  // namespace exest
