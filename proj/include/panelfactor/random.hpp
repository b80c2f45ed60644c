#pragma once

#include <cstdint>
#include <random>

namespace panelfactor {

using Stream = std::mt19937_64;

struct SeedSpec {
  std::uint64_t master_seed = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Child stream for replication m. Depends only on (master_seed, m), never on
// call order, so replications can run on any worker.
Stream derive_stream(SeedSpec seed, std::uint64_t replication);

}  // namespace panelfactor
