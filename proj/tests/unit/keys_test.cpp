#include <gtest/gtest.h>

#include <set>

#include "toy_bridge.hpp"
#include "vanetagg/cpk.hpp"
#include "vanetagg/elgamal.hpp"
#include "vanetagg/hashes.hpp"

namespace vanetagg {
namespace {

using oracle::ToyCurve;
using oracle::ToyPoint;

using oracle::h1;
using oracle::to_oracle;
using oracle::toy;
using oracle::toy_generator;

TEST(ToyCurve, OracleGroupHasOrder89AndMatchesLibrary) {
  auto pts = ToyCurve::all_points();
  EXPECT_EQ(pts.size(), 89u);
  EXPECT_EQ(toy().order().to_u64(), 89u);
  EXPECT_EQ(to_oracle(toy().generator()), toy_generator());
  for (std::uint64_t k = 0; k < 89; ++k) {
    ASSERT_EQ(to_oracle(toy().mul_base(ec::Scalar::from_u64(k))), ToyCurve::mul(k, toy_generator())) << k;
  }
}

TEST(Setup, ShapesAndPublicVector) {
  auto keys = cpk::setup(cpk::kDigestBits, 7);
  ASSERT_EQ(keys.master.x.size(), 256u);
  ASSERT_EQ(keys.params.y.size(), 256u);
  const auto& curve = keys.params.curve();
  for (std::size_t i = 0; i < 256; i += 17) {
    EXPECT_FALSE(keys.master.x[i].is_zero());
    EXPECT_TRUE(curve.equal(keys.params.y[i], curve.mul_base(keys.master.x[i])));
  }
}

TEST(Setup, DeterministicPerSeed) {
  auto a = cpk::setup(cpk::kDigestBits, 7);
  auto b = cpk::setup(cpk::kDigestBits, 7);
  auto c = cpk::setup(cpk::kDigestBits, 8);
  EXPECT_EQ(cpk::encode_params(a.params), cpk::encode_params(b.params));
  EXPECT_EQ(cpk::export_master_secret(a.master), cpk::export_master_secret(b.master));
  std::size_t differing = 0;
  for (std::size_t i = 0; i < 256; ++i) differing += !(a.master.x[i] == c.master.x[i]);
  EXPECT_GE(differing, 1u);
}

TEST(Setup, RejectsWrongLength) {
  try {
    (void)cpk::setup(160, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
  }
}

TEST(DerivePrivate, ZeroDigestGivesZeroKeyAndInfinity) {
  auto keys = cpk::setup(cpk::kDigestBits, 3);
  Digest zero{};
  EXPECT_TRUE(cpk::private_scalar_from_digest(keys.master, zero).is_zero());
  EXPECT_TRUE(keys.params.curve().is_infinity(cpk::public_key_from_digest(keys.params, zero)));
}

// Straight-line sum of the selected x_i as a wide integer, reduced once.
ec::Scalar straight_line_sk(const cpk::MasterKeyMaterial& m, std::string_view id) {
  const auto& curve = m.curve();
  auto digest = identity_digest(id);
  std::array<std::uint32_t, 10> acc{};  // little-endian 32-bit limbs
  for (std::size_t j = 0; j < 256; ++j) {
    if (!cpk::digest_bit(digest, j)) continue;
    auto xb = m.x[j].to_bytes(32);
    std::uint64_t carry = 0;
    for (std::size_t limb = 0; limb < acc.size(); ++limb) {
      std::uint64_t word = 0;
      if (limb < 8) {
        for (int k = 0; k < 4; ++k) word = word << 8 | xb[31 - 4 * limb - (3 - k)];
      }
      std::uint64_t sum = std::uint64_t{acc[limb]} + word + carry;
      acc[limb] = static_cast<std::uint32_t>(sum);
      carry = sum >> 32;
    }
  }
  Bytes be;
  for (std::size_t limb = acc.size(); limb-- > 0;) {
    for (int k = 3; k >= 0; --k) be.push_back(static_cast<std::uint8_t>(acc[limb] >> (8 * k)));
  }
  return curve.reduce(be);
}

TEST(DerivePrivate, MatchesStraightLineSummation) {
  auto keys = cpk::setup(cpk::kDigestBits, 4);
  for (std::string id : {"TEST-001", "KA-05-MX-1234", "", "ü-plate"}) {
    EXPECT_TRUE(cpk::derive_private(keys.master, id).sk == straight_line_sk(keys.master, id)) << id;
  }
}

TEST(DerivePublic, MatchesPerTermOracleAndPrivateKey) {
  auto keys = cpk::setup(cpk::kDigestBits, 5);
  const auto& curve = keys.params.curve();
  Rng rng(5);
  for (int i = 0; i < 5; ++i) {
    auto id = cpk::random_plate(rng);
    auto digest = identity_digest(id);
    ec::Point acc = curve.infinity();
    for (std::size_t j = 0; j < 256; ++j) {
      acc = curve.add(acc, curve.mul(ec::Scalar::from_u64(cpk::digest_bit(digest, j)), keys.params.y[j]));
    }
    auto pk = cpk::derive_public(keys.params, id);
    EXPECT_TRUE(curve.equal(pk, acc));
    EXPECT_TRUE(curve.equal(pk, curve.mul_base(cpk::derive_private(keys.master, id).sk)));
  }
}

TEST(DerivePublic, NeedsOnlyPublicParameters) {
  auto keys = cpk::setup(cpk::kDigestBits, 6);
  auto copy = cpk::decode_params(cpk::encode_params(keys.params));
  keys.master.x.clear();
  const auto& curve = copy.curve();
  EXPECT_TRUE(curve.equal(cpk::derive_public(copy, "ABC"), cpk::derive_public(keys.params, "ABC")));
}

TEST(DerivePublic, NoCollisionsOverManyIds) {
  auto keys = cpk::setup(cpk::kDigestBits, 9, ec::CurveId::kP256);
  const auto& curve = keys.params.curve();
  std::set<Bytes> seen;
  for (int i = 0; i < 1000; ++i) {
    seen.insert(curve.encode(cpk::derive_public(keys.params, "ID-" + std::to_string(i))));
  }
  EXPECT_EQ(seen.size(), 1000u);
}

TEST(DerivePrivateV2, IdentityAndDegenerateRandomizer) {
  auto keys = cpk::setup(cpk::kDigestBits, 10);
  const auto& curve = keys.params.curve();
  Rng rng(10);
  auto k1 = cpk::derive_private_v2(keys.master, "V-1", rng);
  auto k2 = cpk::derive_private_v2(keys.master, "V-1", rng);
  ASSERT_TRUE(k1.variant_point.has_value());
  EXPECT_TRUE(curve.equal(curve.mul_base(k1.sk), curve.add(cpk::derive_public(keys.params, "V-1"), *k1.variant_point)));
  EXPECT_TRUE(curve.equal(curve.mul_base(k1.sk), cpk::effective_public(keys.params, "V-1", k1.variant_point)));
  EXPECT_FALSE(k1.sk == k2.sk);

  auto k0 = cpk::derive_private_v2(keys.master, "V-1", ec::Scalar::from_u64(0));
  EXPECT_TRUE(k0.sk == cpk::derive_private(keys.master, "V-1").sk);
  ASSERT_TRUE(k0.variant_point.has_value());
  EXPECT_TRUE(curve.is_infinity(*k0.variant_point));
}

TEST(ParamsCodec, RoundTripAndRejectsCorruption) {
  auto keys = cpk::setup(cpk::kDigestBits, 11);
  auto enc = cpk::encode_params(keys.params);
  EXPECT_EQ(cpk::encode_params(cpk::decode_params(enc)), enc);
  auto truncated = enc;
  truncated.pop_back();
  EXPECT_THROW(cpk::decode_params(truncated), Error);
  auto bad_magic = enc;
  bad_magic[0] ^= 1;
  EXPECT_THROW(cpk::decode_params(bad_magic), Error);
  auto secret = cpk::export_master_secret(keys.master);
  EXPECT_THROW(cpk::decode_params(secret), Error);
  EXPECT_EQ(cpk::export_master_secret(cpk::import_master_secret(secret)), secret);
}

// ---------------------------------------------------------------- Elgamal

TEST(ElgamalToy, SignMatchesBruteForceOracle) {
  const auto& curve = toy();
  const ToyPoint g = toy_generator();
  for (std::uint64_t sk = 1; sk < 89; sk += 11) {
    for (std::uint64_t c = 1; c < 89; c += 7) {
      for (std::uint64_t m = 0; m < 89; m += 23) {
        auto msg = gf2::Gf256::from_u64(m);
        auto sig = elgamal::sign_with_nonce(curve, ec::Scalar::from_u64(sk), msg, ec::Scalar::from_u64(c));
        const ToyPoint alpha = ToyCurve::mul(c, g);
        const std::uint64_t h = h1(alpha);
        if (h == 0) {
          EXPECT_FALSE(sig.has_value());
          continue;
        }
        ASSERT_TRUE(sig.has_value());
        const std::uint64_t beta = oracle::mod_n(static_cast<long>(m) - static_cast<long>(sk * h % 89), 89) *
                                   oracle::inv_n(c, 89) % 89;
        EXPECT_EQ(to_oracle(sig->alpha), alpha);
        EXPECT_EQ(sig->beta.to_u64(), beta);
        EXPECT_EQ(sig->m, msg);
        // m P = H1(alpha) PK + beta alpha, evaluated by repeated addition.
        const ToyPoint pk = ToyCurve::mul(sk, g);
        EXPECT_EQ(ToyCurve::mul(m % 89, g), ToyCurve::add(ToyCurve::mul(h, pk), ToyCurve::mul(beta, alpha)));
        EXPECT_TRUE(elgamal::verify(curve, curve.mul_base(ec::Scalar::from_u64(sk)), *sig));
      }
    }
  }
}

TEST(ElgamalToy, ForgeMatchesBruteForceOracle) {
  const auto& curve = toy();
  const ToyPoint g = toy_generator();
  const std::uint64_t sk = 29;
  const ToyPoint pk = ToyCurve::mul(sk, g);
  const auto lib_pk = curve.mul_base(ec::Scalar::from_u64(sk));
  for (std::uint64_t a = 1; a < 89; a += 4) {
    for (std::uint64_t b = 1; b < 89; b += 9) {
      auto sig = elgamal::forge_with(curve, lib_pk, ec::Scalar::from_u64(a), ec::Scalar::from_u64(b));
      const ToyPoint alpha = ToyCurve::add(ToyCurve::mul(a, g), ToyCurve::mul(b, pk));
      if (alpha.inf || h1(alpha) == 0) {
        EXPECT_FALSE(sig.has_value());
        continue;
      }
      ASSERT_TRUE(sig.has_value());
      const std::uint64_t h = h1(alpha);
      const std::uint64_t beta = oracle::mod_n(-static_cast<long>(oracle::inv_n(b, 89) * h % 89), 89);
      EXPECT_EQ(to_oracle(sig->alpha), alpha);
      EXPECT_EQ(sig->beta.to_u64(), beta);
      EXPECT_EQ(sig->m, gf2::Gf256::from_u64(a * beta % 89));
      EXPECT_TRUE(elgamal::verify(curve, lib_pk, *sig));
    }
  }
  // Hand-expanded case a = 3, b = 5.
  auto sig = elgamal::forge_with(curve, lib_pk, ec::Scalar::from_u64(3), ec::Scalar::from_u64(5));
  const ToyPoint alpha = ToyCurve::add(ToyCurve::mul(3, g), ToyCurve::mul(5, pk));
  ASSERT_EQ(sig.has_value(), !alpha.inf && h1(alpha) != 0);
  if (sig) {
    const std::uint64_t beta = oracle::mod_n(-static_cast<long>(oracle::inv_n(5, 89) * h1(alpha) % 89), 89);
    EXPECT_EQ(to_oracle(sig->alpha), alpha);
    EXPECT_EQ(sig->m, gf2::Gf256::from_u64(3 * beta % 89));
  }
}

TEST(Elgamal, SignVerifyRoundTripP256) {
  const auto& curve = ec::Curve::p256();
  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    auto sk = curve.random_nonzero(rng);
    auto m = gf2::Gf256::random(rng);
    auto sig = elgamal::sign(curve, sk, m, rng);
    auto pk = curve.mul_base(sk);
    ASSERT_TRUE(elgamal::verify(curve, pk, sig));

    auto bad_m = sig;
    bad_m.m = bad_m.m + gf2::Gf256::one();
    EXPECT_FALSE(elgamal::verify(curve, pk, bad_m));
    auto bad_beta = sig;
    bad_beta.beta = curve.add(bad_beta.beta, ec::Scalar::from_u64(1));
    EXPECT_FALSE(elgamal::verify(curve, pk, bad_beta));
    auto bad_alpha = sig;
    bad_alpha.alpha = curve.add(bad_alpha.alpha, curve.generator());
    EXPECT_FALSE(elgamal::verify(curve, pk, bad_alpha));
    auto inf_alpha = sig;
    inf_alpha.alpha = curve.infinity();
    EXPECT_FALSE(elgamal::verify(curve, pk, inf_alpha));
  }
}

TEST(Elgamal, FreshNoncePerSignature) {
  const auto& curve = ec::Curve::p256();
  Rng rng(13);
  auto sk = curve.random_nonzero(rng);
  auto m = gf2::Gf256::from_u64(5);
  auto a = elgamal::sign(curve, sk, m, rng);
  auto b = elgamal::sign(curve, sk, m, rng);
  EXPECT_FALSE(curve.equal(a.alpha, b.alpha));
}

TEST(Elgamal, ForgeriesVerifyWithUncontrolledMessages) {
  const auto& curve = ec::Curve::p256();
  Rng rng(14);
  auto keys = cpk::setup(cpk::kDigestBits, 14);
  auto pk = cpk::derive_public(keys.params, "FAKE-1");
  std::set<Bytes> ms;
  for (int i = 0; i < 100; ++i) {
    auto sig = elgamal::forge(curve, pk, rng);
    ASSERT_TRUE(elgamal::verify(curve, pk, sig));
    auto enc = sig.m.to_bytes();
    ms.insert(Bytes(enc.begin(), enc.end()));
  }
  EXPECT_EQ(ms.size(), 100u);
  EXPECT_THROW(elgamal::forge(curve, curve.infinity(), rng), Error);
}

TEST(Elgamal, EncodingLayout) {
  const auto& curve = ec::Curve::p256();
  Rng rng(15);
  auto sig = elgamal::sign(curve, curve.random_nonzero(rng), gf2::Gf256::random(rng), rng);
  ByteWriter w;
  elgamal::encode(curve, sig, w);
  ASSERT_EQ(w.bytes().size(), 32u + 33u + 32u);
  EXPECT_EQ(elgamal::encoded_size(curve), 97u);
  ByteReader r(w.bytes());
  auto back = elgamal::decode(curve, r);
  EXPECT_TRUE(r.done());
  EXPECT_EQ(back.m, sig.m);
  EXPECT_TRUE(curve.equal(back.alpha, sig.alpha));
  EXPECT_TRUE(back.beta == sig.beta);
}

}  // namespace
}  // namespace vanetagg
