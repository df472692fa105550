#pragma once

// The three-packet announcement protocol built on the ring signature:
//
//   Request  (0x01)  initiator -> neighbours   event, t, r and the forged members
//   Reply    (0x02)  replier   -> initiator    one signature fraction, optionally sealed
//   Aggregation (0x03) initiator -> everyone   the assembled ring announcement
//
// Roles are plain state machines driven by the caller's clock; nothing here
// touches the network.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vanetagg/cpk.hpp"
#include "vanetagg/itrs.hpp"

namespace vanetagg::protocol {

enum class EventType : std::uint8_t { kJam = 1, kAccident = 2, kHazard = 3, kRoadwork = 4, kWeather = 5 };
enum class Direction : std::uint8_t { kNorth = 1, kSouth = 2, kEast = 3, kWest = 4, kBoth = 5 };

struct EventDescription {
  double x = 0;  // meters
  double y = 0;
  EventType type = EventType::kJam;
  Direction direction = Direction::kBoth;
  std::string road_name;
  double event_time = 0;  // seconds of simulation time

  friend bool operator==(const EventDescription&, const EventDescription&) = default;
};

// The announcement message: x f64 | y f64 | type u8 | direction u8 | road blob16 | time f64.
Bytes encode_event(const EventDescription& event);
EventDescription decode_event(ByteView bytes);

// Identity of "the same event" for the reply policy: 50 m grid cell, type
// and 60 s time bucket.
struct EventKey {
  std::int64_t cell_x = 0;
  std::int64_t cell_y = 0;
  EventType type = EventType::kJam;
  std::int64_t time_bucket = 0;

  friend auto operator<=>(const EventKey&, const EventKey&) = default;
};

struct EventKeyConfig {
  double cell_meters = 50.0;
  double bucket_seconds = 60.0;
};

EventKey event_key(const EventDescription& event, const EventKeyConfig& config = {});

// -- packets --

struct RequestPacket {
  EventDescription event;
  // Carries msg = encode_event(event), t, r and the forged members.
  itrs::SignRequest omega;

  std::uint32_t t() const { return omega.t; }
  std::uint32_t r() const { return omega.r; }
};

// ECIES-style envelope: ephemeral ECDH key, keystream from the block
// permutation in counter mode, HMAC-SHA256 over ephemeral key and ciphertext.
struct SealedFraction {
  ec::Point ephemeral;
  Bytes ciphertext;
  Digest mac;
};

struct ReplyPacket {
  std::variant<itrs::SignFraction, SealedFraction> body;

  bool sealed() const { return std::holds_alternative<SealedFraction>(body); }
};

struct AggregationPacket {
  itrs::RingAnnouncement announcement;
};

enum class PacketType : std::uint8_t { kRequest = 0x01, kReply = 0x02, kAggregation = 0x03 };

using Packet = std::variant<RequestPacket, ReplyPacket, AggregationPacket>;

Bytes encode_packet(const ec::Curve& curve, const Packet& packet);
// Throws kMalformedPacket for unknown tags, bad magic or version, truncation,
// trailing bytes, off-curve points or an undecodable event.
Packet decode_packet(const ec::Curve& curve, ByteView bytes);

SealedFraction seal(const ec::Curve& curve, const ec::Point& recipient, ByteView plaintext, Rng& rng);
// Throws kCryptoFailure when the MAC does not verify.
Bytes open_sealed(const ec::Curve& curve, const ec::Scalar& recipient_sk, const SealedFraction& sealed);

// -- replier --

struct ReceivedRequest {
  double arrival_time = 0;
  const RequestPacket* packet = nullptr;
};

enum class ReplyDecision { kReply, kIgnore };

// Last threshold replied to, per event. Absent means never replied.
struct ReplierState {
  std::map<EventKey, std::uint32_t> last_reply_threshold;
  EventKeyConfig key_config;
};

// Requests are visited in arrival order; a request is answered iff its
// threshold exceeds the last threshold answered for the same event, which
// then becomes the new last threshold. Decisions are returned in input order.
// All requests must share one event key (kInvalidArgument otherwise).
std::vector<ReplyDecision> reply_policy(ReplierState& state, std::span<const ReceivedRequest> pending);

class Replier {
 public:
  Replier(const cpk::SystemParams& params, cpk::IdentityKey key);

  const cpk::IdentityKey& key() const { return key_; }
  ReplierState& state() { return state_; }
  const ReplierState& state() const { return state_; }

  // Runs the reply policy over requests for one event and builds a reply for
  // each accepted request. Requests that fail validation yield no reply.
  std::vector<std::optional<ReplyPacket>> respond(std::span<const ReceivedRequest> pending, Rng& rng);
  // Reply to a single request, bypassing the policy.
  ReplyPacket build(const RequestPacket& request, Rng& rng) const;

 private:
  const cpk::SystemParams* params_;
  cpk::IdentityKey key_;
  ReplierState state_;
};

// -- initiator --

struct SessionConfig {
  double timeout = 120.0;  // seconds after the request is sent
  bool encrypt_replies = false;
  bool variant_keys = false;
};

enum class ReplyOutcome {
  kAccepted,
  kSessionClosed,
  kDecryptFailed,
  kMalformed,
  kDuplicateReplier,
  kRejected,  // failed fraction validation
};

std::string_view to_string(ReplyOutcome o);

struct SessionStats {
  std::size_t accepted = 0;
  std::size_t dropped_closed = 0;
  std::size_t dropped_decrypt = 0;
  std::size_t dropped_malformed = 0;
  std::size_t dropped_duplicate = 0;
  std::size_t dropped_invalid = 0;
};

class AggregationSession {
 public:
  const RequestPacket& request() const { return request_; }
  const itrs::PreparedRequest& prepared() const { return prepared_; }
  double opened_at() const { return opened_at_; }
  double deadline() const { return opened_at_ + config_.timeout; }
  bool expired(double now) const { return now > deadline(); }
  bool ready() const { return accepted_.size() + 1 >= request_.t(); }
  const std::vector<itrs::SignFraction>& accepted() const { return accepted_; }
  const SessionStats& stats() const { return stats_; }

  ReplyOutcome handle_reply(const ReplyPacket& packet, double now);
  // Assembles and self-verifies the announcement. Throws kInsufficientFractions
  // before the session is ready and kAssemblyFailed when assembly or the
  // self-check fails.
  AggregationPacket finalize(Rng& rng) const;

 private:
  friend AggregationSession initiate(const cpk::SystemParams&, const cpk::IdentityKey&, const EventDescription&,
                                     std::uint32_t, std::uint32_t, double, const SessionConfig&, Rng&);

  AggregationSession(const cpk::SystemParams& params, cpk::IdentityKey own_key, RequestPacket request, double now,
                     const SessionConfig& config, std::optional<ec::Scalar> ephemeral_sk);

  const cpk::SystemParams* params_;
  cpk::IdentityKey own_key_;
  RequestPacket request_;
  itrs::PreparedRequest prepared_;
  SessionConfig config_;
  std::optional<ec::Scalar> ephemeral_sk_;
  double opened_at_;
  std::vector<itrs::SignFraction> accepted_;
  SessionStats stats_;
};

// Builds the request and opens a session. Throws kThresholdTooClose unless r - t > 5.
AggregationSession initiate(const cpk::SystemParams& params, const cpk::IdentityKey& own_key,
                            const EventDescription& event, std::uint32_t t, std::uint32_t r, double now,
                            const SessionConfig& config, Rng& rng);

// -- verifier --

enum class AnnouncementVerdict { kAccept, kCryptoReject, kReplayReject };

std::string_view to_string(AnnouncementVerdict v);

inline constexpr double kDefaultReplayWindow = 300.0;

// Accept iff the ring verifies and |now - event_time| <= replay_window.
AnnouncementVerdict verify_announcement(const cpk::SystemParams& params, const AggregationPacket& packet, double now,
                                        double replay_window = kDefaultReplayWindow);

}  // namespace vanetagg::protocol
