#include <algorithm>

#include "vanetagg/itrs.hpp"

namespace vanetagg::itrs {

namespace {

constexpr std::uint8_t kVersion = 1;
constexpr std::string_view kRequestMagic = "TRSQ";
constexpr std::string_view kFractionMagic = "TRSF";
constexpr std::string_view kAnnouncementMagic = "TRSA";

constexpr std::uint8_t kFlagVariantKeys = 0x01;
constexpr std::uint8_t kFlagEphemeralKey = 0x02;
constexpr std::uint8_t kKnownFlags = kFlagVariantKeys | kFlagEphemeralKey;

// A 4-byte u32 count of entries can claim far more than the buffer holds;
// reject counts that cannot fit before allocating.
constexpr std::size_t kMinEntryBytes = 2 + 1 + Gf256::kBytes;

void write_header(ByteWriter& w, std::string_view magic, std::uint8_t flags) {
  w.raw(as_bytes(magic));
  w.u8(kVersion);
  w.u8(flags);
}

std::uint8_t read_header(ByteReader& in, std::string_view magic, std::uint8_t known) {
  auto got = in.raw(magic.size());
  if (!std::equal(got.begin(), got.end(), magic.begin())) fail(ErrorCode::kMalformedPacket, "bad magic");
  if (in.u8() != kVersion) fail(ErrorCode::kMalformedPacket, "unsupported version");
  std::uint8_t flags = in.u8();
  if (flags & ~known) fail(ErrorCode::kMalformedPacket, "unknown flag bits");
  return flags;
}

std::uint8_t ring_flags(bool variant, const std::optional<ec::Point>& epk) {
  return static_cast<std::uint8_t>((variant ? kFlagVariantKeys : 0) | (epk ? kFlagEphemeralKey : 0));
}

void write_member(ByteWriter& w, const ec::Curve& curve, std::string_view id, const Gf256& gamma,
                  const ElgamalTriple& sig, const std::optional<ec::Point>& d) {
  w.blob16(as_bytes(id));
  w.raw(gamma.to_bytes());
  elgamal::encode(curve, sig, w);
  if (d) w.raw(curve.encode(*d));
}

struct Member {
  std::string id;
  Gf256 gamma;
  ElgamalTriple sig;
  std::optional<ec::Point> d;
};

Member read_member(ByteReader& in, const ec::Curve& curve, bool variant) {
  auto id = in.blob16();
  Member m{std::string(id.begin(), id.end()), Gf256::from_bytes(in.raw(Gf256::kBytes)), elgamal::decode(curve, in),
           std::nullopt};
  if (variant) m.d = curve.decode(in.raw(curve.point_bytes()));
  return m;
}

void check_count(const ByteReader& in, std::size_t count) {
  if (count > in.remaining() / kMinEntryBytes) fail(ErrorCode::kMalformedPacket, "member count exceeds buffer");
}

}  // namespace

Bytes encode_request(const ec::Curve& curve, const SignRequest& req) {
  ByteWriter w;
  write_header(w, kRequestMagic, ring_flags(req.variant_keys, req.ephemeral_pk));
  w.blob32(req.msg);
  w.u32(req.t);
  w.u32(req.r);
  if (req.ephemeral_pk) w.raw(curve.encode(*req.ephemeral_pk));
  for (std::size_t i = 0; i < req.fake_ids.size(); ++i) {
    std::optional<ec::Point> d;
    if (req.variant_keys) d = req.fake_points.at(i);
    write_member(w, curve, req.fake_ids[i], req.fake_indices.at(i), req.forgeries.at(i), d);
  }
  return std::move(w).take();
}

SignRequest decode_request(const ec::Curve& curve, ByteView bytes) {
  ByteReader in(bytes);
  std::uint8_t flags = read_header(in, kRequestMagic, kKnownFlags);
  SignRequest req;
  auto msg = in.blob32();
  req.msg.assign(msg.begin(), msg.end());
  req.t = in.u32();
  req.r = in.u32();
  req.variant_keys = flags & kFlagVariantKeys;
  if (flags & kFlagEphemeralKey) req.ephemeral_pk = curve.decode(in.raw(curve.point_bytes()));
  if (req.r < req.t) fail(ErrorCode::kMalformedPacket, "ring smaller than threshold");
  const std::size_t fakes = req.r - req.t;
  check_count(in, fakes);
  for (std::size_t i = 0; i < fakes; ++i) {
    Member m = read_member(in, curve, req.variant_keys);
    req.fake_ids.push_back(std::move(m.id));
    req.fake_indices.push_back(m.gamma);
    req.forgeries.push_back(std::move(m.sig));
    if (m.d) req.fake_points.push_back(std::move(*m.d));
  }
  in.expect_done();
  return req;
}

Bytes encode_fraction(const ec::Curve& curve, const SignFraction& fr) {
  ByteWriter w;
  write_header(w, kFractionMagic, fr.variant_point ? kFlagVariantKeys : 0);
  write_member(w, curve, fr.replier_id, fr.gamma, fr.sig, fr.variant_point);
  return std::move(w).take();
}

SignFraction decode_fraction(const ec::Curve& curve, ByteView bytes) {
  ByteReader in(bytes);
  std::uint8_t flags = read_header(in, kFractionMagic, kFlagVariantKeys);
  Member m = read_member(in, curve, flags & kFlagVariantKeys);
  in.expect_done();
  return SignFraction{std::move(m.id), m.gamma, std::move(m.sig), std::move(m.d)};
}

Bytes encode_announcement(const ec::Curve& curve, const RingAnnouncement& ann) {
  ByteWriter w;
  write_header(w, kAnnouncementMagic, ring_flags(ann.variant_keys, ann.ephemeral_pk));
  w.blob32(ann.msg);
  w.u32(ann.t);
  w.u32(ann.r());
  if (ann.ephemeral_pk) w.raw(curve.encode(*ann.ephemeral_pk));
  for (const auto& e : ann.entries) write_member(w, curve, e.id, e.gamma, e.sig, e.variant_point);
  return std::move(w).take();
}

RingAnnouncement decode_announcement(const ec::Curve& curve, ByteView bytes) {
  ByteReader in(bytes);
  std::uint8_t flags = read_header(in, kAnnouncementMagic, kKnownFlags);
  RingAnnouncement ann;
  auto msg = in.blob32();
  ann.msg.assign(msg.begin(), msg.end());
  ann.t = in.u32();
  const std::uint32_t r = in.u32();
  ann.variant_keys = flags & kFlagVariantKeys;
  if (flags & kFlagEphemeralKey) ann.ephemeral_pk = curve.decode(in.raw(curve.point_bytes()));
  check_count(in, r);
  ann.entries.reserve(r);
  for (std::uint32_t i = 0; i < r; ++i) {
    Member m = read_member(in, curve, ann.variant_keys);
    ann.entries.push_back(RingEntry{std::move(m.id), m.gamma, std::move(m.sig), std::move(m.d)});
  }
  in.expect_done();
  return ann;
}

}  // namespace vanetagg::itrs
