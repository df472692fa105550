#include "vanetagg/protocol.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vanetagg/permutation.hpp"

namespace vanetagg::protocol {

// ---------------------------------------------------------------- events

Bytes encode_event(const EventDescription& e) {
  ByteWriter w;
  w.f64(e.x);
  w.f64(e.y);
  w.u8(static_cast<std::uint8_t>(e.type));
  w.u8(static_cast<std::uint8_t>(e.direction));
  w.blob16(as_bytes(e.road_name));
  w.f64(e.event_time);
  return std::move(w).take();
}

EventDescription decode_event(ByteView bytes) {
  ByteReader in(bytes);
  EventDescription e;
  e.x = in.f64();
  e.y = in.f64();
  auto type = in.u8();
  auto dir = in.u8();
  if (type < 1 || type > 5 || dir < 1 || dir > 5) fail(ErrorCode::kMalformedPacket, "unknown event type or direction");
  e.type = static_cast<EventType>(type);
  e.direction = static_cast<Direction>(dir);
  auto road = in.blob16();
  e.road_name.assign(road.begin(), road.end());
  e.event_time = in.f64();
  in.expect_done();
  if (!std::isfinite(e.x) || !std::isfinite(e.y) || !std::isfinite(e.event_time)) {
    fail(ErrorCode::kMalformedPacket, "non-finite event field");
  }
  return e;
}

EventKey event_key(const EventDescription& e, const EventKeyConfig& c) {
  return EventKey{static_cast<std::int64_t>(std::floor(e.x / c.cell_meters)),
                  static_cast<std::int64_t>(std::floor(e.y / c.cell_meters)), e.type,
                  static_cast<std::int64_t>(std::floor(e.event_time / c.bucket_seconds))};
}

// ---------------------------------------------------------------- sealed replies

namespace {

struct SealKeys {
  Digest enc;
  Digest mac;
};

SealKeys derive_seal_keys(const ec::Curve& curve, const ec::Point& shared, const ec::Point& ephemeral) {
  ByteWriter ikm;
  ikm.raw(curve.encode(shared));
  ikm.raw(curve.encode(ephemeral));
  auto with_label = [&](std::string_view label) {
    ByteWriter w;
    w.raw(as_bytes(label));
    w.raw(ikm.bytes());
    return sha256(w.bytes());
  };
  return SealKeys{with_label("vanetagg/seal-enc"), with_label("vanetagg/seal-mac")};
}

void apply_keystream(const Digest& key, Bytes& data) {
  BlockPermutation prf(key);
  for (std::size_t off = 0, ctr = 0; off < data.size(); off += gf2::Gf256::kBytes, ++ctr) {
    auto block = prf.encrypt(gf2::Gf256::from_u64(ctr)).to_bytes();
    for (std::size_t i = 0; i < block.size() && off + i < data.size(); ++i) data[off + i] ^= block[i];
  }
}

Digest seal_mac(const ec::Curve& curve, const Digest& key, const ec::Point& ephemeral, ByteView ct) {
  ByteWriter w;
  w.raw(curve.encode(ephemeral));
  w.raw(ct);
  Digest out{};
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), w.bytes().data(), w.bytes().size(), out.data(),
           &len) == nullptr ||
      len != out.size()) {
    fail(ErrorCode::kCryptoFailure, "HMAC-SHA256");
  }
  return out;
}

}  // namespace

SealedFraction seal(const ec::Curve& curve, const ec::Point& recipient, ByteView plaintext, Rng& rng) {
  ec::Scalar e = curve.random_nonzero(rng);
  ec::Point ephemeral = curve.mul_base(e);
  SealKeys keys = derive_seal_keys(curve, curve.mul(e, recipient), ephemeral);
  Bytes ct(plaintext.begin(), plaintext.end());
  apply_keystream(keys.enc, ct);
  Digest mac = seal_mac(curve, keys.mac, ephemeral, ct);
  return SealedFraction{std::move(ephemeral), std::move(ct), mac};
}

Bytes open_sealed(const ec::Curve& curve, const ec::Scalar& recipient_sk, const SealedFraction& sealed) {
  if (curve.is_infinity(sealed.ephemeral)) fail(ErrorCode::kCryptoFailure, "ephemeral key at infinity");
  SealKeys keys = derive_seal_keys(curve, curve.mul(recipient_sk, sealed.ephemeral), sealed.ephemeral);
  Digest expect = seal_mac(curve, keys.mac, sealed.ephemeral, sealed.ciphertext);
  if (CRYPTO_memcmp(expect.data(), sealed.mac.data(), expect.size()) != 0) {
    fail(ErrorCode::kCryptoFailure, "sealed reply MAC mismatch");
  }
  Bytes pt = sealed.ciphertext;
  apply_keystream(keys.enc, pt);
  return pt;
}

// ---------------------------------------------------------------- packet codec

namespace {

constexpr std::string_view kSealMagic = "SEAL";
constexpr std::uint8_t kSealVersion = 1;

Bytes tagged(PacketType type, const Bytes& body) {
  Bytes out;
  out.reserve(body.size() + 1);
  out.push_back(static_cast<std::uint8_t>(type));
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

Bytes encode_sealed(const ec::Curve& curve, const SealedFraction& s) {
  ByteWriter w;
  w.raw(as_bytes(kSealMagic));
  w.u8(kSealVersion);
  w.u8(0);
  w.raw(curve.encode(s.ephemeral));
  w.blob32(s.ciphertext);
  w.raw(s.mac);
  return std::move(w).take();
}

SealedFraction decode_sealed(const ec::Curve& curve, ByteView bytes) {
  ByteReader in(bytes);
  in.raw(kSealMagic.size());
  if (in.u8() != kSealVersion) fail(ErrorCode::kMalformedPacket, "unsupported version");
  if (in.u8() != 0) fail(ErrorCode::kMalformedPacket, "unknown flag bits");
  SealedFraction s{curve.decode(in.raw(curve.point_bytes())), {}, {}};
  auto ct = in.blob32();
  s.ciphertext.assign(ct.begin(), ct.end());
  auto mac = in.raw(s.mac.size());
  std::copy(mac.begin(), mac.end(), s.mac.begin());
  in.expect_done();
  return s;
}

bool starts_with(ByteView bytes, std::string_view magic) {
  return bytes.size() >= magic.size() && std::equal(magic.begin(), magic.end(), bytes.begin());
}

}  // namespace

Bytes encode_packet(const ec::Curve& curve, const Packet& packet) {
  return std::visit(
      [&](const auto& p) -> Bytes {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RequestPacket>) {
          return tagged(PacketType::kRequest, itrs::encode_request(curve, p.omega));
        } else if constexpr (std::is_same_v<T, ReplyPacket>) {
          if (const auto* s = std::get_if<SealedFraction>(&p.body)) {
            return tagged(PacketType::kReply, encode_sealed(curve, *s));
          }
          return tagged(PacketType::kReply, itrs::encode_fraction(curve, std::get<itrs::SignFraction>(p.body)));
        } else {
          return tagged(PacketType::kAggregation, itrs::encode_announcement(curve, p.announcement));
        }
      },
      packet);
}

Packet decode_packet(const ec::Curve& curve, ByteView bytes) {
  if (bytes.empty()) fail(ErrorCode::kMalformedPacket, "empty packet");
  ByteView body = bytes.subspan(1);
  switch (static_cast<PacketType>(bytes[0])) {
    case PacketType::kRequest: {
      RequestPacket p;
      p.omega = itrs::decode_request(curve, body);
      p.event = decode_event(p.omega.msg);
      return p;
    }
    case PacketType::kReply:
      if (starts_with(body, kSealMagic)) return ReplyPacket{decode_sealed(curve, body)};
      return ReplyPacket{itrs::decode_fraction(curve, body)};
    case PacketType::kAggregation:
      return AggregationPacket{itrs::decode_announcement(curve, body)};
  }
  fail(ErrorCode::kMalformedPacket, "unknown packet type");
}

// ---------------------------------------------------------------- replier

std::vector<ReplyDecision> reply_policy(ReplierState& state, std::span<const ReceivedRequest> pending) {
  std::vector<ReplyDecision> decisions(pending.size(), ReplyDecision::kIgnore);
  if (pending.empty()) return decisions;
  const EventKey key = event_key(pending.front().packet->event, state.key_config);
  for (const auto& p : pending) {
    if (event_key(p.packet->event, state.key_config) != key) {
      fail(ErrorCode::kInvalidArgument, "reply_policy expects requests about one event");
    }
  }
  std::vector<std::size_t> order(pending.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pending[a].arrival_time < pending[b].arrival_time; });
  for (auto i : order) {
    const std::uint32_t t = pending[i].packet->t();
    auto it = state.last_reply_threshold.find(key);
    if (it == state.last_reply_threshold.end() || t > it->second) {
      decisions[i] = ReplyDecision::kReply;
      state.last_reply_threshold[key] = t;
    }
  }
  return decisions;
}

Replier::Replier(const cpk::SystemParams& params, cpk::IdentityKey key) : params_(&params), key_(std::move(key)) {}

ReplyPacket Replier::build(const RequestPacket& request, Rng& rng) const {
  itrs::PreparedRequest prepared(*params_, request.omega, itrs::RequestCheck::kFull);
  itrs::SignFraction fraction = itrs::build_reply(prepared, key_, rng);
  if (request.omega.ephemeral_pk) {
    const auto& curve = params_->curve();
    return ReplyPacket{seal(curve, *request.omega.ephemeral_pk, itrs::encode_fraction(curve, fraction), rng)};
  }
  return ReplyPacket{std::move(fraction)};
}

std::vector<std::optional<ReplyPacket>> Replier::respond(std::span<const ReceivedRequest> pending, Rng& rng) {
  auto decisions = reply_policy(state_, pending);
  std::vector<std::optional<ReplyPacket>> out(pending.size());
  for (std::size_t i = 0; i < pending.size(); ++i) {
    if (decisions[i] != ReplyDecision::kReply) continue;
    try {
      out[i] = build(*pending[i].packet, rng);
    } catch (const Error&) {
      // Invalid or colliding request: stay silent.
    }
  }
  return out;
}

// ---------------------------------------------------------------- initiator

std::string_view to_string(ReplyOutcome o) {
  switch (o) {
    case ReplyOutcome::kAccepted: return "accepted";
    case ReplyOutcome::kSessionClosed: return "session-closed";
    case ReplyOutcome::kDecryptFailed: return "decrypt-failed";
    case ReplyOutcome::kMalformed: return "malformed";
    case ReplyOutcome::kDuplicateReplier: return "duplicate-replier";
    case ReplyOutcome::kRejected: return "rejected";
  }
  return "unknown";
}

AggregationSession::AggregationSession(const cpk::SystemParams& params, cpk::IdentityKey own_key,
                                       RequestPacket request, double now, const SessionConfig& config,
                                       std::optional<ec::Scalar> ephemeral_sk)
    : params_(&params),
      own_key_(std::move(own_key)),
      request_(std::move(request)),
      prepared_(params, request_.omega, itrs::RequestCheck::kStructural),
      config_(config),
      ephemeral_sk_(std::move(ephemeral_sk)),
      opened_at_(now) {}

AggregationSession initiate(const cpk::SystemParams& params, const cpk::IdentityKey& own_key,
                            const EventDescription& event, std::uint32_t t, std::uint32_t r, double now,
                            const SessionConfig& config, Rng& rng) {
  const auto& curve = params.curve();
  itrs::RequestOptions options;
  options.variant_keys = config.variant_keys;
  std::optional<ec::Scalar> ephemeral_sk;
  if (config.encrypt_replies) {
    ephemeral_sk = curve.random_nonzero(rng);
    options.ephemeral_pk = curve.mul_base(*ephemeral_sk);
  }
  if (own_key.variant_point.has_value() != config.variant_keys) {
    fail(ErrorCode::kInvalidArgument, "initiator key type does not match the session's key mode");
  }
  RequestPacket request{event, itrs::build_request(params, encode_event(event), t, r, cpk::random_plate, rng, options)};
  // Fake identities that happen to equal the initiator's own are regenerated.
  while (std::find(request.omega.fake_ids.begin(), request.omega.fake_ids.end(), own_key.id) !=
         request.omega.fake_ids.end()) {
    request.omega = itrs::build_request(params, encode_event(event), t, r, cpk::random_plate, rng, options);
  }
  return AggregationSession(params, own_key, std::move(request), now, config, std::move(ephemeral_sk));
}

ReplyOutcome AggregationSession::handle_reply(const ReplyPacket& packet, double now) {
  auto drop = [](std::size_t& counter, ReplyOutcome o) {
    ++counter;
    return o;
  };
  if (expired(now)) return drop(stats_.dropped_closed, ReplyOutcome::kSessionClosed);

  std::optional<itrs::SignFraction> fraction;
  if (const auto* sealed = std::get_if<SealedFraction>(&packet.body)) {
    if (!ephemeral_sk_) return drop(stats_.dropped_decrypt, ReplyOutcome::kDecryptFailed);
    Bytes plain;
    try {
      plain = open_sealed(params_->curve(), *ephemeral_sk_, *sealed);
    } catch (const Error&) {
      return drop(stats_.dropped_decrypt, ReplyOutcome::kDecryptFailed);
    }
    try {
      fraction = itrs::decode_fraction(params_->curve(), plain);
    } catch (const Error&) {
      return drop(stats_.dropped_malformed, ReplyOutcome::kMalformed);
    }
  } else {
    fraction = std::get<itrs::SignFraction>(packet.body);
  }

  if (fraction->replier_id == own_key_.id ||
      std::any_of(accepted_.begin(), accepted_.end(),
                  [&](const itrs::SignFraction& f) { return f.replier_id == fraction->replier_id; })) {
    return drop(stats_.dropped_duplicate, ReplyOutcome::kDuplicateReplier);
  }
  if (!itrs::validate_fraction(prepared_, *fraction)) return drop(stats_.dropped_invalid, ReplyOutcome::kRejected);
  accepted_.push_back(*std::move(fraction));
  ++stats_.accepted;
  return ReplyOutcome::kAccepted;
}

AggregationPacket AggregationSession::finalize(Rng& rng) const {
  if (!ready()) fail(ErrorCode::kInsufficientFractions, "session has fewer than t - 1 accepted replies");
  itrs::RingAnnouncement ann;
  try {
    ann = itrs::assemble(prepared_, own_key_, accepted_, rng);
  } catch (const Error& e) {
    fail(ErrorCode::kAssemblyFailed, e.what());
  }
  if (itrs::verify_ring(*params_, ann) != itrs::RingVerdict::kAccept) {
    fail(ErrorCode::kAssemblyFailed, "assembled announcement does not verify");
  }
  return AggregationPacket{std::move(ann)};
}

// ---------------------------------------------------------------- verifier

std::string_view to_string(AnnouncementVerdict v) {
  switch (v) {
    case AnnouncementVerdict::kAccept: return "accept";
    case AnnouncementVerdict::kCryptoReject: return "reject(crypto)";
    case AnnouncementVerdict::kReplayReject: return "reject(replay)";
  }
  return "unknown";
}

AnnouncementVerdict verify_announcement(const cpk::SystemParams& params, const AggregationPacket& packet, double now,
                                        double replay_window) {
  EventDescription event;
  try {
    event = decode_event(packet.announcement.msg);
  } catch (const Error&) {
    return AnnouncementVerdict::kCryptoReject;
  }
  if (itrs::verify_ring(params, packet.announcement) != itrs::RingVerdict::kAccept) {
    return AnnouncementVerdict::kCryptoReject;
  }
  if (std::abs(now - event.event_time) > replay_window) return AnnouncementVerdict::kReplayReject;
  return AnnouncementVerdict::kAccept;
}

}  // namespace vanetagg::protocol
