#include <gtest/gtest.h>

#include "harness.hpp"
#include "packets.hpp"

namespace vanetagg::protocol {
namespace {

const ec::Curve& p256() { return ec::Curve::p256(); }

Bytes wire(const Packet& p) { return encode_packet(p256(), p); }

// Decoding must either succeed or throw the library's own error type.
std::optional<ErrorCode> decode_error(const ec::Curve& curve, const Bytes& bytes) {
  try {
    (void)decode_packet(curve, bytes);
    return std::nullopt;
  } catch (const Error& e) {
    return e.code();
  }
}

TEST(CodecFuzz, RandomRequestsRoundTrip) {
  Rng rng(101);
  for (int i = 0; i < 500; ++i) {
    auto p = packets::random_request(p256(), rng);
    auto w = wire(p);
    auto back = std::get<RequestPacket>(decode_packet(p256(), w));
    ASSERT_EQ(back.event, p.event);
    ASSERT_EQ(back.omega.t, p.omega.t);
    ASSERT_EQ(back.omega.r, p.omega.r);
    ASSERT_EQ(back.omega.fake_ids, p.omega.fake_ids);
    ASSERT_EQ(back.omega.fake_indices, p.omega.fake_indices);
    ASSERT_EQ(back.omega.ephemeral_pk.has_value(), p.omega.ephemeral_pk.has_value());
    ASSERT_EQ(back.omega.fake_points.size(), p.omega.fake_points.size());
    ASSERT_EQ(wire(back), w) << i;
  }
}

TEST(CodecFuzz, RandomRepliesRoundTrip) {
  Rng rng(102);
  for (int i = 0; i < 500; ++i) {
    auto p = packets::random_reply(p256(), rng);
    auto w = wire(p);
    auto back = std::get<ReplyPacket>(decode_packet(p256(), w));
    ASSERT_EQ(back.sealed(), p.sealed());
    if (p.sealed()) {
      const auto& a = std::get<SealedFraction>(p.body);
      const auto& b = std::get<SealedFraction>(back.body);
      ASSERT_EQ(a.ciphertext, b.ciphertext);
      ASSERT_EQ(a.mac, b.mac);
      ASSERT_TRUE(p256().equal(a.ephemeral, b.ephemeral));
    } else {
      const auto& a = std::get<itrs::SignFraction>(p.body);
      const auto& b = std::get<itrs::SignFraction>(back.body);
      ASSERT_EQ(a.replier_id, b.replier_id);
      ASSERT_EQ(a.gamma, b.gamma);
      ASSERT_EQ(a.sig.m, b.sig.m);
      ASSERT_EQ(a.sig.beta, b.sig.beta);
      ASSERT_TRUE(p256().equal(a.sig.alpha, b.sig.alpha));
    }
    ASSERT_EQ(wire(back), w) << i;
  }
}

TEST(CodecFuzz, RandomAggregationsRoundTrip) {
  Rng rng(103);
  for (int i = 0; i < 500; ++i) {
    auto p = packets::random_aggregation(p256(), rng);
    auto w = wire(p);
    auto back = std::get<AggregationPacket>(decode_packet(p256(), w));
    ASSERT_EQ(back.announcement.msg, p.announcement.msg);
    ASSERT_EQ(back.announcement.t, p.announcement.t);
    ASSERT_EQ(back.announcement.r(), p.announcement.r());
    ASSERT_EQ(back.announcement.variant_keys, p.announcement.variant_keys);
    for (std::size_t k = 0; k < p.announcement.entries.size(); ++k) {
      ASSERT_EQ(back.announcement.entries[k].id, p.announcement.entries[k].id);
      ASSERT_EQ(back.announcement.entries[k].gamma, p.announcement.entries[k].gamma);
    }
    ASSERT_EQ(wire(back), w) << i;
  }
}

TEST(CodecFuzz, StructuralMutationsRejected) {
  Rng rng(104);
  for (int i = 0; i < 1500; ++i) {
    Packet p;
    switch (i % 3) {
      case 0: p = packets::random_request(p256(), rng); break;
      case 1: p = packets::random_reply(p256(), rng); break;
      default: p = packets::random_aggregation(p256(), rng);
    }
    auto bad = packets::structural_mutation(p256(), wire(p), rng);
    ASSERT_EQ(decode_error(p256(), bad), ErrorCode::kMalformedPacket) << i << " " << to_hex(bad).substr(0, 40);
  }
}

TEST(CodecFuzz, ToyCurvePacketsRoundTripAndMutate) {
  const auto& toy = ec::Curve::toy97();
  Rng rng(105);
  for (int i = 0; i < 300; ++i) {
    Packet p;
    switch (i % 3) {
      case 0: p = packets::random_request(toy, rng); break;
      case 1: p = packets::random_reply(toy, rng); break;
      default: p = packets::random_aggregation(toy, rng);
    }
    auto w = encode_packet(toy, p);
    ASSERT_EQ(encode_packet(toy, decode_packet(toy, w)), w);
    ASSERT_EQ(decode_error(toy, packets::structural_mutation(toy, w, rng)), ErrorCode::kMalformedPacket);
  }
}

TEST(CodecFuzz, RandomBytesNeverEscapeAsOtherExceptions) {
  Rng rng(106);
  for (int i = 0; i < 3000; ++i) {
    Bytes b(rng.below(200));
    rng.fill(b);
    if (!b.empty()) b[0] = static_cast<std::uint8_t>(1 + rng.below(3));
    if (b.size() > 5 && rng.below(2)) {
      // valid header, random body
      static constexpr std::string_view magics[] = {"TRSQ", "TRSF", "TRSA"};
      auto m = magics[b[0] - 1];
      std::copy(m.begin(), m.end(), b.begin() + 1);
      b[5] = 1;
    }
    (void)decode_error(p256(), b);  // any non-library exception fails the test
  }
}

TEST(CodecFuzz, HugeCountsDoNotAllocate) {
  Rng rng(107);
  auto w = wire(packets::random_aggregation(p256(), rng));
  const std::size_t r_at = packets::kBodyAt + 4 + packets::read_u32(w, packets::kBodyAt) + 4;
  packets::write_u32(w, r_at, 0xFFFFFFFFu);
  EXPECT_EQ(decode_error(p256(), w), ErrorCode::kMalformedPacket);
}

TEST(CodecFuzz, OffCurvePointRejected) {
  Rng rng(108);
  itrs::SignFraction f{"AB-123", gf2::Gf256::random(rng), packets::random_triple(p256(), rng), std::nullopt};
  auto w = wire(ReplyPacket{f});
  // alpha's tag byte follows id blob, gamma and m
  const std::size_t alpha_at = packets::kBodyAt + 2 + 6 + 32 + 32;
  ASSERT_TRUE(w[alpha_at] == 0x02 || w[alpha_at] == 0x03);
  auto bad = w;
  bad[alpha_at] = 0x05;
  EXPECT_EQ(decode_error(p256(), bad), ErrorCode::kMalformedPacket);
  // x = p - 1 style garbage: all 0xff x coordinate is not a field element
  bad = w;
  std::fill(bad.begin() + alpha_at + 1, bad.begin() + alpha_at + 33, 0xff);
  EXPECT_EQ(decode_error(p256(), bad), ErrorCode::kMalformedPacket);
}

}  // namespace
}  // namespace vanetagg::protocol
