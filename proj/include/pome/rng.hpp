#ifndef POME_RNG_HPP_
#define POME_RNG_HPP_

#include <cstdint>
#include <vector>

namespace pome {

// Deterministic xoshiro256++ stream. We roll our own instead of using the
// <random> distributions so that sampled trajectories are byte-identical for
// a given seed regardless of standard-library version.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform();

  // Uniform integer in [0, n).
  int below(int n);

  // Standard normal via Box-Muller (no cached spare; both uniforms drawn
  // every call so the stream advances by a fixed amount).
  double normal();

  // Index sampled from an explicit probability vector (CDF walk).
  int categorical(const std::vector<double>& probs);

 private:
  std::uint64_t s_[4];
};

// Child-stream seed for (base_seed, stream_tag). Streams depend only on their
// own tag, so adding workers never perturbs existing ones.
std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::uint64_t stream_tag);

}  // namespace pome

#endif  // POME_RNG_HPP_
