#pragma once

#include <array>
#include <cstdint>

namespace pinning {

// Deterministic, splittable random stream. Stream (master_seed, stream_id)
// always produces the same sequence on every platform: the generator is
// xoshiro256++ seeded through splitmix64, and gaussians come from an explicit
// Box-Muller so no implementation-defined std:: distribution is involved.
// Replica i of a Monte Carlo run owns stream (master_seed, i).
class RngStream {
 public:
  RngStream(uint64_t master_seed, uint64_t stream_id);

  uint64_t next_u64();

  // uniform on (0,1]; safe under log()
  double uniform01();

  // standard normal
  double gaussian();

 private:
  std::array<uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

uint64_t splitmix64(uint64_t& state);

}  // namespace pinning
