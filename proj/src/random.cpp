#include "panelfactor/random.hpp"

#include <array>

namespace panelfactor {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Stream derive_stream(SeedSpec seed, std::uint64_t replication) {
  std::uint64_t h = splitmix64(seed.master_seed);
  h = splitmix64(h ^ splitmix64(replication + 0x632be59bd9b4e019ULL));
  std::array<std::uint32_t, 8> words{};
  for (std::size_t k = 0; k < words.size(); k += 2) {
    h = splitmix64(h);
    words[k] = static_cast<std::uint32_t>(h);
    words[k + 1] = static_cast<std::uint32_t>(h >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  return Stream(seq);
}

}  // namespace panelfactor
