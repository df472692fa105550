#pragma once

// The four protocol hash functions, all SHA-256 with a distinct domain tag:
//   identity_digest   {0,1}*  -> {0,1}^256   selects CPK key-vector slots
//   point_challenge   G       -> Z_q         Elgamal challenge of alpha
//   message_key       {0,1}*  -> {0,1}^256   key of the block permutation
//   threshold_anchor  t||r[||pk] -> GF(2^256) value of f at 0

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "vanetagg/bytes.hpp"
#include "vanetagg/ec.hpp"
#include "vanetagg/gf2.hpp"

namespace vanetagg {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(ByteView data);

Digest identity_digest(std::string_view id);
ec::Scalar point_challenge(const ec::Curve& curve, const ec::Point& alpha);
Digest message_key(ByteView msg);
// t and r are hashed as 4-byte big-endian integers; pk is the compressed
// ephemeral key when reply encryption is in use.
gf2::Gf256 threshold_anchor(std::uint32_t t, std::uint32_t r, std::optional<ByteView> ephemeral_pk = std::nullopt);

}  // namespace vanetagg
