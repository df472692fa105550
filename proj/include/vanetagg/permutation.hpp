#pragma once

#include <array>
#include <cstdint>
#include <memory>

#include "vanetagg/gf2.hpp"
#include "vanetagg/hashes.hpp"

struct evp_cipher_ctx_st;

namespace vanetagg {

// Keyed permutation of 256-bit blocks: a 4-round balanced Feistel network
// over two 128-bit halves whose round function is AES-128 under a per-round
// key derived from the 256-bit key. Instances are not safe to share across
// threads.
class BlockPermutation {
 public:
  static constexpr int kRounds = 4;

  explicit BlockPermutation(const Digest& key);
  BlockPermutation(BlockPermutation&&) noexcept;
  BlockPermutation& operator=(BlockPermutation&&) noexcept;
  ~BlockPermutation();

  gf2::Gf256 encrypt(const gf2::Gf256& block) const;
  gf2::Gf256 decrypt(const gf2::Gf256& block) const;

 private:
  struct CtxFree {
    void operator()(evp_cipher_ctx_st* c) const;
  };
  using Half = std::array<std::uint8_t, 16>;

  Half round(int i, const Half& in) const;

  std::array<std::unique_ptr<evp_cipher_ctx_st, CtxFree>, kRounds> rounds_;
};

}  // namespace vanetagg
