#pragma once

#include <array>
#include <cstdint>

namespace momc {

// Philox 4x32-10 counter-based generator.  Every draw is addressed by
// (master seed, replication, time step, channel), so simulations are
// reproducible and replication-parallel with no shared state: workers can
// split replications arbitrarily and still produce identical numbers.
//
// Channel conventions used by the coupling engine:
//   0  first coordinate (CommonNoise reads this for both coordinates)
//   1  second coordinate (Independent policies)
//   2  auxiliary draws (joint-matrix / monotone-coupling sampling)
std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr, std::array<uint32_t, 2> key);

// uniform double in [0, 1) with 53 random bits
double uniform01(uint64_t seed, uint64_t rep, uint64_t step, uint32_t channel);

// standard normal quantile (inverse CDF), accurate to ~1e-15 via a rational
// initial guess plus one Halley refinement; strictly increasing in u
double normal_quantile(double u);

// Stream view fixing (seed, rep); draws addressed by (step, channel).
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t rep) : seed_(seed), rep_(rep) {}
  double uniform(uint64_t step, uint32_t channel) const {
    return uniform01(seed_, rep_, step, channel);
  }

 private:
  uint64_t seed_, rep_;
};

}  // namespace momc
