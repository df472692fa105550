#include "vanetagg/permutation.hpp"

#include <openssl/evp.h>

#include <algorithm>

#include "vanetagg/error.hpp"

namespace vanetagg {

void BlockPermutation::CtxFree::operator()(evp_cipher_ctx_st* c) const { EVP_CIPHER_CTX_free(c); }

BlockPermutation::BlockPermutation(const Digest& key) {
  for (int i = 0; i < kRounds; ++i) {
    ByteWriter w;
    w.raw(as_bytes("vanetagg/E-round"));
    w.raw(key);
    w.u8(static_cast<std::uint8_t>(i));
    Digest round_key = sha256(w.bytes());
    rounds_[i].reset(EVP_CIPHER_CTX_new());
    if (!rounds_[i] ||
        EVP_EncryptInit_ex(rounds_[i].get(), EVP_aes_128_ecb(), nullptr, round_key.data(), nullptr) != 1 ||
        EVP_CIPHER_CTX_set_padding(rounds_[i].get(), 0) != 1) {
      fail(ErrorCode::kCryptoFailure, "AES-128 key setup");
    }
  }
}

BlockPermutation::BlockPermutation(BlockPermutation&&) noexcept = default;
BlockPermutation& BlockPermutation::operator=(BlockPermutation&&) noexcept = default;
BlockPermutation::~BlockPermutation() = default;

BlockPermutation::Half BlockPermutation::round(int i, const Half& in) const {
  Half out{};
  int len = 0;
  if (EVP_EncryptUpdate(rounds_[i].get(), out.data(), &len, in.data(), static_cast<int>(in.size())) != 1 ||
      len != static_cast<int>(out.size())) {
    fail(ErrorCode::kCryptoFailure, "AES-128 round");
  }
  return out;
}

gf2::Gf256 BlockPermutation::encrypt(const gf2::Gf256& block) const {
  auto bytes = block.to_bytes();
  Half left{}, right{};
  std::copy_n(bytes.begin(), 16, left.begin());
  std::copy_n(bytes.begin() + 16, 16, right.begin());
  for (int i = 0; i < kRounds; ++i) {
    Half f = round(i, right);
    for (int j = 0; j < 16; ++j) left[j] ^= f[j];
    std::swap(left, right);
  }
  std::copy(left.begin(), left.end(), bytes.begin());
  std::copy(right.begin(), right.end(), bytes.begin() + 16);
  return gf2::Gf256::from_bytes(bytes);
}

gf2::Gf256 BlockPermutation::decrypt(const gf2::Gf256& block) const {
  auto bytes = block.to_bytes();
  Half left{}, right{};
  std::copy_n(bytes.begin(), 16, left.begin());
  std::copy_n(bytes.begin() + 16, 16, right.begin());
  for (int i = kRounds - 1; i >= 0; --i) {
    std::swap(left, right);
    Half f = round(i, right);
    for (int j = 0; j < 16; ++j) left[j] ^= f[j];
  }
  std::copy(left.begin(), left.end(), bytes.begin());
  std::copy(right.begin(), right.end(), bytes.begin() + 16);
  return gf2::Gf256::from_bytes(bytes);
}

}  // namespace vanetagg
