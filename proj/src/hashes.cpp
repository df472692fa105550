#include "vanetagg/hashes.hpp"

#include <openssl/evp.h>

#include <memory>

#include "vanetagg/error.hpp"

namespace vanetagg {

namespace {

Digest tagged(std::string_view tag, ByteView data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> c(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  Digest out{};
  if (!c || EVP_DigestInit_ex(c.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(c.get(), tag.data(), tag.size()) != 1 ||
      EVP_DigestUpdate(c.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(c.get(), out.data(), nullptr) != 1) {
    fail(ErrorCode::kCryptoFailure, "SHA-256");
  }
  return out;
}

}  // namespace

Digest sha256(ByteView data) {
  Digest out{};
  if (EVP_Digest(data.data(), data.size(), out.data(), nullptr, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::kCryptoFailure, "SHA-256");
  }
  return out;
}

Digest identity_digest(std::string_view id) { return tagged("vanetagg/H0", as_bytes(id)); }

ec::Scalar point_challenge(const ec::Curve& curve, const ec::Point& alpha) {
  Bytes enc = curve.encode(alpha);
  Digest d = tagged("vanetagg/H1", enc);
  return curve.reduce(d);
}

Digest message_key(ByteView msg) { return tagged("vanetagg/H2", msg); }

gf2::Gf256 threshold_anchor(std::uint32_t t, std::uint32_t r, std::optional<ByteView> ephemeral_pk) {
  ByteWriter w;
  w.u32(t);
  w.u32(r);
  if (ephemeral_pk) w.raw(*ephemeral_pk);
  return gf2::Gf256::from_bytes(tagged("vanetagg/H3", w.bytes()));
}

}  // namespace vanetagg
