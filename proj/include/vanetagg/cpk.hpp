#pragma once

// Combined-public-key identity keys. The authority holds n secret scalars
// x_i with public images Y_i = x_i P; an identity's key is the subset sum
// selected by the bits of its H0 digest, so anyone holding Y can compute any
// identity's public key without a certificate.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vanetagg/bytes.hpp"
#include "vanetagg/ec.hpp"
#include "vanetagg/hashes.hpp"
#include "vanetagg/rng.hpp"

namespace vanetagg::cpk {

// Width of H0, and therefore the key-vector length n.
inline constexpr std::size_t kDigestBits = 256;
// Width l of the polynomial field.
inline constexpr std::size_t kFieldBits = 256;

enum class HashSuite : std::uint8_t { kSha256Tagged = 1 };
enum class CipherSuite : std::uint8_t { kFeistelAes128 = 1 };

struct SystemParams {
  ec::CurveId curve_id = ec::CurveId::kP256;
  std::size_t n = kDigestBits;
  std::size_t l = kFieldBits;
  HashSuite hash = HashSuite::kSha256Tagged;
  CipherSuite cipher = CipherSuite::kFeistelAes128;
  std::vector<ec::Point> y;

  const ec::Curve& curve() const { return ec::Curve::by_id(curve_id); }
};

struct MasterKeyMaterial {
  ec::CurveId curve_id = ec::CurveId::kP256;
  std::vector<ec::Scalar> x;

  const ec::Curve& curve() const { return ec::Curve::by_id(curve_id); }
};

struct IdentityKey {
  std::string id;
  ec::Scalar sk;
  // mu*P for keys issued with the collusion-resistant randomizer.
  std::optional<ec::Point> variant_point;
};

struct KeySetup {
  MasterKeyMaterial master;
  SystemParams params;
};

// n must equal kDigestBits (kConfigError otherwise).
KeySetup setup(std::size_t n, std::uint64_t seed, ec::CurveId curve = ec::CurveId::kP256);
KeySetup setup(std::size_t n, Rng& rng, ec::CurveId curve = ec::CurveId::kP256);

// Bit j (0-based) of the digest: slot j is selected iff this returns true.
// Slot 0 is the most significant bit of the first digest byte.
inline bool digest_bit(const Digest& d, std::size_t j) { return (d[j / 8] >> (7 - j % 8)) & 1u; }

ec::Scalar private_scalar_from_digest(const MasterKeyMaterial& master, const Digest& digest);
ec::Point public_key_from_digest(const SystemParams& params, const Digest& digest);

IdentityKey derive_private(const MasterKeyMaterial& master, std::string_view id);
ec::Point derive_public(const SystemParams& params, std::string_view id);

// sk = sum h_i x_i + mu, with mu uniform in Z_q^*; the key carries mu*P.
IdentityKey derive_private_v2(const MasterKeyMaterial& master, std::string_view id, Rng& rng);
// Same with an explicit randomizer (mu = 0 allowed, giving the point at infinity).
IdentityKey derive_private_v2(const MasterKeyMaterial& master, std::string_view id, const ec::Scalar& mu);

// Public key a verifier checks an identity's signatures against:
// derive_public(id), plus the randomizer point when present.
ec::Point effective_public(const SystemParams& params, std::string_view id, const std::optional<ec::Point>& d);

// Plate-shaped identity such as "KXR-4821". Real and fake ring members are
// drawn from this same generator.
std::string random_plate(Rng& rng);

// -- binary files --
// params: "CPKP" | ver u8 | curve u8 | n u16 | l u16 | hash u8 | cipher u8 | n compressed points
Bytes encode_params(const SystemParams& params);
SystemParams decode_params(ByteView bytes);
// master secret: "CPKX" | ver u8 | curve u8 | n u16 | n scalars. Callers must opt in explicitly.
Bytes export_master_secret(const MasterKeyMaterial& master);
MasterKeyMaterial import_master_secret(ByteView bytes);

}  // namespace vanetagg::cpk
