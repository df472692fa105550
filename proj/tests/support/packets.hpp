#pragma once

// Random wire packets and structural corruptions of them. The packets are
// well-formed but carry no valid cryptography, which is all the codec needs.

#include <string>

#include "vanetagg/protocol.hpp"

namespace packets {

using namespace vanetagg;
using namespace vanetagg::protocol;

inline std::string random_text(Rng& rng, std::size_t max_len) {
  std::string s(rng.below(max_len + 1), ' ');
  for (auto& c : s) c = static_cast<char>(0x20 + rng.below(95));
  return s;
}

inline ec::Point random_point(const ec::Curve& curve, Rng& rng) { return curve.mul_base(curve.random_nonzero(rng)); }

inline elgamal::ElgamalTriple random_triple(const ec::Curve& curve, Rng& rng) {
  return {gf2::Gf256::random(rng), random_point(curve, rng), curve.random_nonzero(rng)};
}

inline EventDescription random_event(Rng& rng) {
  return {rng.unit() * 5000 - 1000,
          rng.unit() * 5000 - 1000,
          static_cast<EventType>(1 + rng.below(5)),
          static_cast<Direction>(1 + rng.below(5)),
          random_text(rng, 24),
          rng.unit() * 1e6};
}

inline RequestPacket random_request(const ec::Curve& curve, Rng& rng) {
  RequestPacket p;
  p.event = random_event(rng);
  auto& q = p.omega;
  q.msg = encode_event(p.event);
  q.t = 1 + static_cast<std::uint32_t>(rng.below(10));
  q.r = q.t + static_cast<std::uint32_t>(rng.below(41));
  q.variant_keys = rng.below(2);
  if (rng.below(2)) q.ephemeral_pk = random_point(curve, rng);
  for (std::uint32_t i = q.t; i < q.r; ++i) {
    q.fake_ids.push_back(random_text(rng, 16));
    q.fake_indices.push_back(gf2::Gf256::random(rng));
    q.forgeries.push_back(random_triple(curve, rng));
    if (q.variant_keys) q.fake_points.push_back(random_point(curve, rng));
  }
  return p;
}

inline ReplyPacket random_reply(const ec::Curve& curve, Rng& rng) {
  if (rng.below(2)) {
    SealedFraction s{random_point(curve, rng), Bytes(rng.below(300)), {}};
    rng.fill(s.ciphertext);
    rng.fill(s.mac);
    return ReplyPacket{std::move(s)};
  }
  itrs::SignFraction f{random_text(rng, 16), gf2::Gf256::random(rng), random_triple(curve, rng), std::nullopt};
  if (rng.below(2)) f.variant_point = random_point(curve, rng);
  return ReplyPacket{std::move(f)};
}

inline AggregationPacket random_aggregation(const ec::Curve& curve, Rng& rng) {
  AggregationPacket p;
  auto& a = p.announcement;
  a.msg = Bytes(rng.below(80));
  rng.fill(a.msg);
  a.t = static_cast<std::uint32_t>(rng.below(12));
  a.variant_keys = rng.below(2);
  if (rng.below(2)) a.ephemeral_pk = random_point(curve, rng);
  const auto r = rng.below(51);
  for (std::uint64_t i = 0; i < r; ++i) {
    std::optional<ec::Point> d;
    if (a.variant_keys) d = random_point(curve, rng);
    a.entries.push_back({random_text(rng, 16), gf2::Gf256::random(rng), random_triple(curve, rng), d});
  }
  return p;
}

// Byte offsets shared by every packet: tag, 4-byte magic, version, flags.
inline constexpr std::size_t kMagicAt = 1;
inline constexpr std::size_t kVersionAt = 5;
inline constexpr std::size_t kFlagsAt = 6;
inline constexpr std::size_t kBodyAt = 7;

inline std::uint32_t read_u32(const Bytes& b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) | b[at + 3];
}

inline void write_u32(Bytes& b, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b[at + i] = static_cast<std::uint8_t>(v >> (24 - 8 * i));
}

// A corruption the decoder must reject by structure alone: truncation,
// trailing bytes, bad tag, magic, version or flag bits, or a length or count
// field off by one.
inline Bytes structural_mutation(const ec::Curve& curve, const Bytes& wire, Rng& rng) {
  Bytes out = wire;
  const bool sealed = wire[0] == 0x02 && wire[kMagicAt] == 'S';
  switch (rng.below(7)) {
    case 0:
      out.resize(rng.below(wire.size()));
      break;
    case 1: {
      Bytes extra(1 + rng.below(8));
      rng.fill(extra);
      out.insert(out.end(), extra.begin(), extra.end());
      break;
    }
    case 2:
      out[0] = static_cast<std::uint8_t>(4 + rng.below(252));
      break;
    case 3:
      out[kMagicAt + rng.below(4)] ^= static_cast<std::uint8_t>(1 + rng.below(255));
      break;
    case 4:
      out[kVersionAt] ^= static_cast<std::uint8_t>(1 + rng.below(255));
      break;
    case 5:
      out[kFlagsAt] |= static_cast<std::uint8_t>(sealed ? 1u << rng.below(8) : 4u << rng.below(6));
      break;
    default: {
      const int delta = rng.below(2) ? 1 : -1;
      if (wire[0] == 0x02 && sealed) {
        // ciphertext length follows the ephemeral point
        const std::size_t at = kBodyAt + curve.point_bytes();
        write_u32(out, at, read_u32(out, at) + delta);
      } else if (wire[0] == 0x02) {
        const std::uint16_t len = static_cast<std::uint16_t>((out[kBodyAt] << 8 | out[kBodyAt + 1]) + delta);
        out[kBodyAt] = static_cast<std::uint8_t>(len >> 8);
        out[kBodyAt + 1] = static_cast<std::uint8_t>(len);
      } else {
        // msg blob, then t and r; only a request ties t to the member count
        const bool request = wire[0] == 0x01;
        const std::size_t at = kBodyAt + 4 + read_u32(wire, kBodyAt) + (request && rng.below(2) ? 0 : 4);
        write_u32(out, at, read_u32(out, at) + delta);
      }
    }
  }
  return out;
}

}  // namespace packets
