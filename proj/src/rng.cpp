#include "vanetagg/rng.hpp"

#include <openssl/rand.h>

#include <algorithm>

#include "vanetagg/error.hpp"
#include "vanetagg/hashes.hpp"

namespace vanetagg {

Rng::Rng(std::uint64_t seed) {
  ByteWriter w;
  w.raw(as_bytes("vanetagg-rng"));
  w.u64(seed);
  key_ = sha256(w.bytes());
}

Rng::Rng(ByteView seed_material) {
  ByteWriter w;
  w.raw(as_bytes("vanetagg-rng-bytes"));
  w.raw(seed_material);
  key_ = sha256(w.bytes());
}

Rng Rng::from_entropy() {
  std::array<std::uint8_t, 32> seed{};
  if (RAND_bytes(seed.data(), static_cast<int>(seed.size())) != 1) {
    fail(ErrorCode::kCryptoFailure, "RAND_bytes failed");
  }
  return Rng(ByteView(seed));
}

Rng Rng::fork(std::string_view label) {
  std::array<std::uint8_t, 32> material{};
  fill(material);
  ByteWriter w;
  w.raw(material);
  w.raw(as_bytes(label));
  return Rng(ByteView(w.bytes()));
}

void Rng::refill() {
  std::array<std::uint8_t, 40> input{};
  std::copy(key_.begin(), key_.end(), input.begin());
  for (int i = 0; i < 8; ++i) input[32 + i] = static_cast<std::uint8_t>(counter_ >> (56 - 8 * i));
  ++counter_;
  block_ = sha256(input);
  used_ = 0;
}

void Rng::fill(std::span<std::uint8_t> out) {
  std::size_t pos = 0;
  while (pos < out.size()) {
    if (used_ == block_.size()) refill();
    std::size_t n = std::min(out.size() - pos, block_.size() - used_);
    std::copy_n(block_.begin() + static_cast<std::ptrdiff_t>(used_), n, out.begin() + static_cast<std::ptrdiff_t>(pos));
    used_ += n;
    pos += n;
  }
}

Rng::result_type Rng::operator()() {
  std::array<std::uint8_t, 8> b{};
  fill(b);
  result_type v = 0;
  for (auto x : b) v = v << 8 | x;
  return v;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) fail(ErrorCode::kInvalidArgument, "Rng::below(0)");
  const std::uint64_t limit = max() - max() % bound;
  for (;;) {
    std::uint64_t v = (*this)();
    if (v < limit) return v % bound;
  }
}

double Rng::unit() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

}  // namespace vanetagg
