#include <gtest/gtest.h>

#include <algorithm>

#include "harness.hpp"

namespace vanetagg::protocol {
namespace {

using harness::keys;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIoError;
}

const ec::Curve& curve() { return keys().params.curve(); }

// One initiator session with `n` honest replier keys at hand.
struct Scene {
  Rng rng;
  cpk::IdentityKey own;
  std::vector<Replier> repliers;
  std::optional<AggregationSession> session;

  Scene(std::uint64_t seed, std::uint32_t t, std::uint32_t r, std::size_t n, SessionConfig config = {},
        double now = 100.0)
      : rng(seed) {
    own = harness::issue("INIT-" + std::to_string(seed), config.variant_keys, rng);
    for (std::size_t i = 0; i < n; ++i) {
      repliers.emplace_back(keys().params, harness::issue("REP-" + std::to_string(i), config.variant_keys, rng));
    }
    session.emplace(initiate(keys().params, own, harness::event_at(now), t, r, now, config, rng));
  }

  ReplyPacket reply(std::size_t i) { return repliers.at(i).build(session->request(), rng); }
};

TEST(EventCodec, RoundTripAndValidation) {
  auto e = harness::event_at(12.5, "Main St");
  EXPECT_EQ(decode_event(encode_event(e)), e);
  auto bytes = encode_event(e);
  bytes[16] = 9;  // event type
  EXPECT_EQ(code_of([&] { decode_event(bytes); }), ErrorCode::kMalformedPacket);
  bytes = encode_event(e);
  bytes.push_back(0);
  EXPECT_EQ(code_of([&] { decode_event(bytes); }), ErrorCode::kMalformedPacket);
}

TEST(EventKey, BucketsByCellTypeAndTime) {
  EventDescription a{10, 20, EventType::kJam, Direction::kNorth, "H1", 30};
  EventDescription b{49, 49, EventType::kJam, Direction::kSouth, "V2", 59};
  EXPECT_EQ(event_key(a), event_key(b));
  b.x = 50;
  EXPECT_NE(event_key(a), event_key(b));
  EventDescription c = a;
  c.type = EventType::kAccident;
  EXPECT_NE(event_key(a), event_key(c));
  EventDescription d = a;
  d.event_time = 60;
  EXPECT_NE(event_key(a), event_key(d));
  EventDescription neg{-1, 0, EventType::kJam, Direction::kBoth, "", 0};
  EXPECT_EQ(event_key(neg).cell_x, -1);
}

TEST(Initiate, WellFormedAndThresholdChecks) {
  Scene s(1, 3, 20, 0);
  EXPECT_EQ(s.session->request().t(), 3u);
  EXPECT_EQ(s.session->request().r(), 20u);
  EXPECT_EQ(s.session->request().omega.fake_ids.size(), 17u);
  EXPECT_FALSE(s.session->ready());
  Rng rng(2);
  auto own = harness::issue("INIT", false, rng);
  EXPECT_EQ(code_of([&] { initiate(keys().params, own, harness::event_at(0), 15, 20, 0, {}, rng); }),
            ErrorCode::kThresholdTooClose);
}

TEST(Initiate, EncryptedVariantBindsEphemeralKey) {
  SessionConfig config;
  config.encrypt_replies = true;
  Scene s(3, 3, 20, 0, config);
  const auto& omega = s.session->request().omega;
  ASSERT_TRUE(omega.ephemeral_pk.has_value());
  const Bytes epk = curve().encode(*omega.ephemeral_pk);
  EXPECT_EQ(s.session->prepared().polynomial().constant_term(), threshold_anchor(3, 20, ByteView(epk)));
  EXPECT_NE(s.session->prepared().polynomial().constant_term(), itrs::ring_anchor(curve(), 3, 20, std::nullopt));
}

std::vector<ReplyDecision> run_policy(ReplierState& state, const std::vector<std::uint32_t>& thresholds,
                                      std::vector<double> arrivals = {}) {
  static std::vector<RequestPacket> storage;
  storage.clear();
  storage.reserve(thresholds.size());
  for (auto t : thresholds) {
    RequestPacket p;
    p.event = harness::event_at(5);
    p.omega.t = t;
    p.omega.r = t + 6;
    storage.push_back(p);
  }
  std::vector<ReceivedRequest> pending;
  for (std::size_t i = 0; i < storage.size(); ++i) {
    pending.push_back({arrivals.empty() ? static_cast<double>(i) : arrivals[i], &storage[i]});
  }
  return reply_policy(state, pending);
}

TEST(ReplyPolicy, PublishedTrace) {
  ReplierState state;
  auto d = run_policy(state, {3, 5, 4});
  EXPECT_EQ(d, (std::vector{ReplyDecision::kReply, ReplyDecision::kReply, ReplyDecision::kIgnore}));
  ASSERT_EQ(state.last_reply_threshold.size(), 1u);
  EXPECT_EQ(state.last_reply_threshold.begin()->second, 5u);
}

TEST(ReplyPolicy, StrictInequalityAndIncreasingRun) {
  ReplierState state;
  state.last_reply_threshold[event_key(harness::event_at(5))] = 4;
  EXPECT_EQ(run_policy(state, {4}), std::vector{ReplyDecision::kIgnore});
  ReplierState fresh;
  EXPECT_EQ(run_policy(fresh, {2, 3, 4}), std::vector<ReplyDecision>(3, ReplyDecision::kReply));
}

TEST(ReplyPolicy, SortsByArrivalAndKeepsInputOrder) {
  ReplierState state;
  // Arrival order is 5, 3, 4: only the first is answered.
  auto d = run_policy(state, {3, 5, 4}, {2.0, 1.0, 3.0});
  EXPECT_EQ(d, (std::vector{ReplyDecision::kIgnore, ReplyDecision::kReply, ReplyDecision::kIgnore}));
}

TEST(ReplyPolicy, MonotoneThresholdAndReplyCount) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    ReplierState state;
    std::vector<std::uint32_t> ts;
    const std::size_t n = 1 + rng.below(8);
    for (std::size_t i = 0; i < n; ++i) ts.push_back(2 + static_cast<std::uint32_t>(rng.below(8)));
    auto d = run_policy(state, ts);
    std::size_t expected = 0;
    std::uint32_t last = 0;
    for (auto t : ts) {
      if (t > last) {
        ++expected;
        last = t;
      }
    }
    EXPECT_EQ(static_cast<std::size_t>(std::count(d.begin(), d.end(), ReplyDecision::kReply)), expected);
    EXPECT_EQ(state.last_reply_threshold.begin()->second, last);
  }
}

TEST(ReplyPolicy, MixedEventsRejected) {
  RequestPacket a, b;
  a.event = harness::event_at(5);
  b.event = harness::event_at(500);
  ReplierState state;
  std::vector<ReceivedRequest> pending{{0, &a}, {1, &b}};
  EXPECT_EQ(code_of([&] { reply_policy(state, pending); }), ErrorCode::kInvalidArgument);
}

TEST(Session, ReadyAfterTMinusOneReplies) {
  Scene s(5, 4, 12, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_FALSE(s.session->ready());
    EXPECT_EQ(s.session->handle_reply(s.reply(i), 101), ReplyOutcome::kAccepted);
  }
  EXPECT_TRUE(s.session->ready());
  auto packet = s.session->finalize(s.rng);
  EXPECT_EQ(verify_announcement(keys().params, packet, 102), AnnouncementVerdict::kAccept);
}

TEST(Session, DuplicateForeignAndLateRepliesDropped) {
  Scene s(6, 3, 10, 2);
  EXPECT_EQ(s.session->handle_reply(s.reply(0), 101), ReplyOutcome::kAccepted);
  EXPECT_EQ(s.session->handle_reply(s.reply(0), 101), ReplyOutcome::kDuplicateReplier);

  // A fraction for a different message, from an identity the session has not seen.
  Scene other(7, 3, 10, 0);
  Replier stranger(keys().params, cpk::derive_private(keys().master, "STRANGER"));
  auto cross = stranger.build(other.session->request(), other.rng);
  EXPECT_EQ(s.session->handle_reply(cross, 101), ReplyOutcome::kRejected);

  EXPECT_EQ(s.session->handle_reply(s.reply(1), s.session->deadline() + 1), ReplyOutcome::kSessionClosed);
  const auto& st = s.session->stats();
  EXPECT_EQ(st.accepted, 1u);
  EXPECT_EQ(st.dropped_duplicate, 1u);
  EXPECT_EQ(st.dropped_invalid, 1u);
  EXPECT_EQ(st.dropped_closed, 1u);
}

TEST(Session, OwnIdentityCannotReply) {
  Scene s(9, 3, 10, 0);
  Replier self(keys().params, s.own);
  auto packet = self.build(s.session->request(), s.rng);
  EXPECT_EQ(s.session->handle_reply(packet, 100), ReplyOutcome::kDuplicateReplier);
}

TEST(Session, FinalizeErrors) {
  Scene s(10, 3, 10, 2);
  EXPECT_EQ(code_of([&] { s.session->finalize(s.rng); }), ErrorCode::kInsufficientFractions);

  // Two repliers answering on one gamma: both validate, assembly cannot use both.
  auto first = s.reply(0);
  const auto& f0 = std::get<itrs::SignFraction>(first.body);
  itrs::SignFraction twin{s.repliers[1].key().id, f0.gamma,
                          elgamal::sign(curve(), s.repliers[1].key().sk, f0.sig.m, s.rng), std::nullopt};
  EXPECT_EQ(s.session->handle_reply(first, 100), ReplyOutcome::kAccepted);
  EXPECT_EQ(s.session->handle_reply(ReplyPacket{twin}, 100), ReplyOutcome::kAccepted);
  ASSERT_TRUE(s.session->ready());
  EXPECT_EQ(code_of([&] { s.session->finalize(s.rng); }), ErrorCode::kAssemblyFailed);
}

TEST(Session, SparesLeftUnused) {
  Scene s(11, 3, 10, 4);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(s.session->handle_reply(s.reply(i), 100), ReplyOutcome::kAccepted);
  auto packet = s.session->finalize(s.rng);
  EXPECT_EQ(packet.announcement.r(), 10u);
  EXPECT_EQ(verify_announcement(keys().params, packet, 100), AnnouncementVerdict::kAccept);
  std::size_t repliers_in_ring = 0;
  for (const auto& e : packet.announcement.entries) repliers_in_ring += e.id.rfind("REP-", 0) == 0;
  EXPECT_EQ(repliers_in_ring, 2u);
}

TEST(Session, EncryptedRepliesHideIdentities) {
  SessionConfig config;
  config.encrypt_replies = true;
  config.variant_keys = true;
  Scene s(12, 3, 10, 3, config);
  Bytes transcript;
  for (std::size_t i = 0; i < 3; ++i) {
    auto packet = s.reply(i);
    EXPECT_TRUE(packet.sealed());
    auto wire = encode_packet(curve(), packet);
    transcript.insert(transcript.end(), wire.begin(), wire.end());
    auto decoded = std::get<ReplyPacket>(decode_packet(curve(), wire));
    EXPECT_EQ(s.session->handle_reply(decoded, 100), ReplyOutcome::kAccepted);
  }
  for (const auto& r : s.repliers) {
    EXPECT_EQ(std::search(transcript.begin(), transcript.end(), r.key().id.begin(), r.key().id.end()),
              transcript.end());
  }
  auto packet = s.session->finalize(s.rng);
  EXPECT_EQ(verify_announcement(keys().params, packet, 100), AnnouncementVerdict::kAccept);

  // Tampered ciphertext fails the MAC; an unsealed reply is still accepted.
  Scene t(13, 3, 10, 2, config);
  auto sealed = t.reply(0);
  std::get<SealedFraction>(sealed.body).ciphertext[3] ^= 0x40;
  EXPECT_EQ(t.session->handle_reply(sealed, 100), ReplyOutcome::kDecryptFailed);
  EXPECT_EQ(t.session->stats().dropped_decrypt, 1u);
}

TEST(Seal, OpenRoundTripAndWrongKey) {
  Rng rng(14);
  auto sk = curve().random_nonzero(rng);
  auto pk = curve().mul_base(sk);
  Bytes msg{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30, 31, 32, 33};
  auto sealed = seal(curve(), pk, msg, rng);
  EXPECT_EQ(open_sealed(curve(), sk, sealed), msg);
  EXPECT_EQ(code_of([&] { open_sealed(curve(), curve().random_nonzero(rng), sealed); }), ErrorCode::kCryptoFailure);
}

TEST(VerifyAnnouncement, ReplayAndCryptoReasons) {
  Scene s(15, 3, 10, 2);
  for (std::size_t i = 0; i < 2; ++i) s.session->handle_reply(s.reply(i), 100);
  auto packet = s.session->finalize(s.rng);
  EXPECT_EQ(verify_announcement(keys().params, packet, 100), AnnouncementVerdict::kAccept);
  EXPECT_EQ(verify_announcement(keys().params, packet, 100 + kDefaultReplayWindow), AnnouncementVerdict::kAccept);
  EXPECT_EQ(verify_announcement(keys().params, packet, 100 + kDefaultReplayWindow + 1),
            AnnouncementVerdict::kReplayReject);
  EXPECT_EQ(verify_announcement(keys().params, packet, 130, 10), AnnouncementVerdict::kReplayReject);

  auto ev = decode_event(packet.announcement.msg);
  ev.road_name = "Elm St";
  auto modified = packet;
  modified.announcement.msg = encode_event(ev);
  EXPECT_EQ(verify_announcement(keys().params, modified, 100), AnnouncementVerdict::kCryptoReject);

  auto garbage = packet;
  garbage.announcement.msg = {1, 2, 3};
  EXPECT_EQ(verify_announcement(keys().params, garbage, 100), AnnouncementVerdict::kCryptoReject);
}

TEST(PacketCodec, RoundTripTruncationAndVersion) {
  Scene s(16, 3, 10, 2);
  std::vector<Bytes> wires{encode_packet(curve(), s.session->request())};
  for (std::size_t i = 0; i < 2; ++i) {
    auto reply = s.reply(i);
    wires.push_back(encode_packet(curve(), reply));
    s.session->handle_reply(reply, 100);
  }
  wires.push_back(encode_packet(curve(), s.session->finalize(s.rng)));
  for (const auto& w : wires) {
    EXPECT_EQ(encode_packet(curve(), decode_packet(curve(), w)), w);
    for (std::size_t cut : {std::size_t{0}, std::size_t{1}, std::size_t{5}, w.size() / 2, w.size() - 1}) {
      Bytes truncated(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(cut));
      EXPECT_EQ(code_of([&] { decode_packet(curve(), truncated); }), ErrorCode::kMalformedPacket) << cut;
    }
    auto version = w;
    version[5] ^= 0x01;
    EXPECT_EQ(code_of([&] { decode_packet(curve(), version); }), ErrorCode::kMalformedPacket);
    auto tag = w;
    tag[0] = 0x07;
    EXPECT_EQ(code_of([&] { decode_packet(curve(), tag); }), ErrorCode::kMalformedPacket);
  }
}

}  // namespace
}  // namespace vanetagg::protocol
