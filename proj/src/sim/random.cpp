#include "vanetagg/sim/random.hpp"

#include <vector>

#include "vanetagg/error.hpp"

namespace vanetagg::sim {

Stream::Stream(std::initializer_list<std::uint64_t> key) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * key.size());
  for (auto k : key) {
    words.push_back(static_cast<std::uint32_t>(k));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  engine_.seed(seq);
}

std::uint64_t Stream::below(std::uint64_t bound) {
  if (bound == 0) fail(ErrorCode::kInvalidArgument, "below(0)");
  const std::uint64_t limit = -bound % bound;  // 2^64 mod bound
  for (;;) {
    auto x = static_cast<unsigned __int128>(engine_()) * bound;
    if (static_cast<std::uint64_t>(x) >= limit) return static_cast<std::uint64_t>(x >> 64);
  }
}

std::uint64_t run_seed(std::uint64_t base_seed, std::uint32_t vehicle_count, std::uint32_t run) {
  Stream s{base_seed, 0x72756e73ULL, vehicle_count, run};
  return s.next();
}

}  // namespace vanetagg::sim
