#include "vanetagg/cpk.hpp"

#include "vanetagg/error.hpp"

namespace vanetagg::cpk {

namespace {

constexpr std::uint8_t kFormatVersion = 1;
constexpr std::string_view kParamsMagic = "CPKP";
constexpr std::string_view kSecretMagic = "CPKX";

void expect_magic(ByteReader& in, std::string_view magic) {
  auto got = in.raw(magic.size());
  if (!std::equal(got.begin(), got.end(), magic.begin())) fail(ErrorCode::kMalformedPacket, "bad magic");
  if (in.u8() != kFormatVersion) fail(ErrorCode::kMalformedPacket, "unsupported version");
}

ec::CurveId read_curve(ByteReader& in) {
  auto id = static_cast<ec::CurveId>(in.u8());
  if (id != ec::CurveId::kP256 && id != ec::CurveId::kToy97) fail(ErrorCode::kMalformedPacket, "unknown curve");
  return id;
}

}  // namespace

KeySetup setup(std::size_t n, std::uint64_t seed, ec::CurveId curve) {
  Rng rng(seed);
  return setup(n, rng, curve);
}

KeySetup setup(std::size_t n, Rng& rng, ec::CurveId curve_id) {
  if (n != kDigestBits) {
    fail(ErrorCode::kConfigError, "key vector length must equal the identity hash width (256)");
  }
  const auto& curve = ec::Curve::by_id(curve_id);
  KeySetup out;
  out.master.curve_id = curve_id;
  out.params.curve_id = curve_id;
  out.params.n = n;
  out.master.x.reserve(n);
  out.params.y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.master.x.push_back(curve.random_nonzero(rng));
    out.params.y.push_back(curve.mul_base(out.master.x.back()));
  }
  return out;
}

ec::Scalar private_scalar_from_digest(const MasterKeyMaterial& master, const Digest& digest) {
  const auto& curve = master.curve();
  ec::Scalar sk;
  for (std::size_t j = 0; j < master.x.size(); ++j) {
    if (digest_bit(digest, j)) sk = curve.add(sk, master.x[j]);
  }
  return sk;
}

ec::Point public_key_from_digest(const SystemParams& params, const Digest& digest) {
  const auto& curve = params.curve();
  ec::Point pk = curve.infinity();
  for (std::size_t j = 0; j < params.y.size(); ++j) {
    if (digest_bit(digest, j)) pk = curve.add(pk, params.y[j]);
  }
  return pk;
}

IdentityKey derive_private(const MasterKeyMaterial& master, std::string_view id) {
  return IdentityKey{std::string(id), private_scalar_from_digest(master, identity_digest(id)), std::nullopt};
}

ec::Point derive_public(const SystemParams& params, std::string_view id) {
  return public_key_from_digest(params, identity_digest(id));
}

IdentityKey derive_private_v2(const MasterKeyMaterial& master, std::string_view id, Rng& rng) {
  return derive_private_v2(master, id, master.curve().random_nonzero(rng));
}

IdentityKey derive_private_v2(const MasterKeyMaterial& master, std::string_view id, const ec::Scalar& mu) {
  const auto& curve = master.curve();
  IdentityKey key = derive_private(master, id);
  key.sk = curve.add(key.sk, mu);
  key.variant_point = curve.mul_base(mu);
  return key;
}

ec::Point effective_public(const SystemParams& params, std::string_view id, const std::optional<ec::Point>& d) {
  ec::Point pk = derive_public(params, id);
  if (d) pk = params.curve().add(pk, *d);
  return pk;
}

std::string random_plate(Rng& rng) {
  std::string plate(8, '-');
  for (int i = 0; i < 3; ++i) plate[i] = static_cast<char>('A' + rng.below(26));
  for (int i = 4; i < 8; ++i) plate[i] = static_cast<char>('0' + rng.below(10));
  return plate;
}

Bytes encode_params(const SystemParams& params) {
  const auto& curve = params.curve();
  ByteWriter w;
  w.raw(as_bytes(kParamsMagic));
  w.u8(kFormatVersion);
  w.u8(static_cast<std::uint8_t>(params.curve_id));
  w.u16(static_cast<std::uint16_t>(params.n));
  w.u16(static_cast<std::uint16_t>(params.l));
  w.u8(static_cast<std::uint8_t>(params.hash));
  w.u8(static_cast<std::uint8_t>(params.cipher));
  for (const auto& y : params.y) w.raw(curve.encode(y));
  return std::move(w).take();
}

SystemParams decode_params(ByteView bytes) {
  ByteReader in(bytes);
  expect_magic(in, kParamsMagic);
  SystemParams p;
  p.curve_id = read_curve(in);
  p.n = in.u16();
  p.l = in.u16();
  if (p.n != kDigestBits || p.l != kFieldBits) fail(ErrorCode::kMalformedPacket, "unsupported n or l");
  p.hash = static_cast<HashSuite>(in.u8());
  p.cipher = static_cast<CipherSuite>(in.u8());
  if (p.hash != HashSuite::kSha256Tagged || p.cipher != CipherSuite::kFeistelAes128) {
    fail(ErrorCode::kMalformedPacket, "unknown hash or cipher suite");
  }
  const auto& curve = p.curve();
  p.y.reserve(p.n);
  for (std::size_t i = 0; i < p.n; ++i) p.y.push_back(curve.decode(in.raw(curve.point_bytes())));
  in.expect_done();
  return p;
}

Bytes export_master_secret(const MasterKeyMaterial& master) {
  const auto& curve = master.curve();
  ByteWriter w;
  w.raw(as_bytes(kSecretMagic));
  w.u8(kFormatVersion);
  w.u8(static_cast<std::uint8_t>(master.curve_id));
  w.u16(static_cast<std::uint16_t>(master.x.size()));
  for (const auto& x : master.x) w.raw(curve.encode_scalar(x));
  return std::move(w).take();
}

MasterKeyMaterial import_master_secret(ByteView bytes) {
  ByteReader in(bytes);
  expect_magic(in, kSecretMagic);
  MasterKeyMaterial m;
  m.curve_id = read_curve(in);
  std::size_t n = in.u16();
  if (n != kDigestBits) fail(ErrorCode::kMalformedPacket, "unsupported n");
  const auto& curve = m.curve();
  m.x.reserve(n);
  for (std::size_t i = 0; i < n; ++i) m.x.push_back(curve.decode_scalar(in.raw(curve.scalar_bytes())));
  in.expect_done();
  return m;
}

}  // namespace vanetagg::cpk
