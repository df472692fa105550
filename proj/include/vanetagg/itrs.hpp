#pragma once

// Interactive threshold ring signature.
//
// An initiator publishes a request holding r - t forged Elgamal triples for
// fake identities, each tagged with a field index gamma_i. Together with the
// anchor f(0) = H3(t || r) these fix a polynomial f of degree r - t over
// GF(2^256) with f(gamma_i) = E_k(m_i), k = H2(msg). Each real signer picks a
// fresh index gamma, sets m = E_k^-1(f(gamma)) and signs m with its identity
// key. Forgeries cannot target a message, so every additional point on f
// needs a real private key; a verifier that finds all r entries plus the
// anchor on one degree-(r - t) polynomial knows at least t keys took part.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vanetagg/bytes.hpp"
#include "vanetagg/cpk.hpp"
#include "vanetagg/elgamal.hpp"
#include "vanetagg/error.hpp"
#include "vanetagg/gf2.hpp"
#include "vanetagg/permutation.hpp"
#include "vanetagg/rng.hpp"

namespace vanetagg::itrs {

using gf2::Gf256;
using elgamal::ElgamalTriple;

// The ring must carry more than five forged members.
inline constexpr std::uint32_t kMinFakeMembers = 6;

struct RequestOptions {
  // Fake members get randomized keys PK + nu P, matching rings built from
  // derive_private_v2 keys.
  bool variant_keys = false;
  // Ephemeral public key replies are encrypted to; bound into f(0).
  std::optional<ec::Point> ephemeral_pk;
};

struct SignRequest {
  Bytes msg;
  std::uint32_t t = 0;
  std::uint32_t r = 0;
  bool variant_keys = false;
  std::optional<ec::Point> ephemeral_pk;
  std::vector<std::string> fake_ids;
  std::vector<Gf256> fake_indices;
  std::vector<ElgamalTriple> forgeries;
  // One randomizer point per fake when variant_keys is set, else empty.
  std::vector<ec::Point> fake_points;
};

struct SignFraction {
  std::string replier_id;
  Gf256 gamma;
  ElgamalTriple sig;
  std::optional<ec::Point> variant_point;
};

struct RingEntry {
  std::string id;
  Gf256 gamma;
  ElgamalTriple sig;
  std::optional<ec::Point> variant_point;
};

struct RingAnnouncement {
  Bytes msg;
  std::uint32_t t = 0;
  bool variant_keys = false;
  std::optional<ec::Point> ephemeral_pk;
  // Sorted ascending by gamma.
  std::vector<RingEntry> entries;

  std::uint32_t r() const { return static_cast<std::uint32_t>(entries.size()); }
};

using IdGenerator = std::function<std::string(Rng&)>;

// f(0) for a ring of this shape.
Gf256 ring_anchor(const ec::Curve& curve, std::uint32_t t, std::uint32_t r, const std::optional<ec::Point>& epk);

// Throws kThresholdTooClose unless r - t > 5, kInvalidArgument for t == 0.
SignRequest build_request(const cpk::SystemParams& params, ByteView msg, std::uint32_t t, std::uint32_t r,
                          const IdGenerator& ids, Rng& rng, const RequestOptions& options = {});

enum class RequestCheck {
  kStructural,  // counts, index and identity uniqueness
  kFull,        // additionally verifies every forgery against its fake identity
};

// A checked request together with its cipher and verification polynomial.
// Construction throws kInvalidRequest for malformed or unverifiable requests.
class PreparedRequest {
 public:
  PreparedRequest(const cpk::SystemParams& params, SignRequest request, RequestCheck check = RequestCheck::kFull);

  const cpk::SystemParams& params() const { return *params_; }
  const SignRequest& request() const { return request_; }
  const BlockPermutation& cipher() const { return cipher_; }
  const gf2::Polynomial<Gf256>& polynomial() const { return f_; }

  bool is_fake_index(const Gf256& gamma) const;
  bool is_fake_id(std::string_view id) const;
  // Uniform nonzero index distinct from every fake index and from `taken`.
  Gf256 fresh_index(Rng& rng, std::span<const Gf256> taken = {}) const;

 private:
  const cpk::SystemParams* params_;
  SignRequest request_;
  BlockPermutation cipher_;
  gf2::Polynomial<Gf256> f_;
};

// Throws kIdCollision when key.id is one of the fake identities and
// kInvalidArgument when the key's randomizer does not match the ring mode.
SignFraction build_reply(const PreparedRequest& request, const cpk::IdentityKey& key, Rng& rng);
SignFraction build_reply(const cpk::SystemParams& params, const SignRequest& request, const cpk::IdentityKey& key,
                         Rng& rng, RequestCheck check = RequestCheck::kFull);

enum class FractionVerdict {
  kAccept,
  kZeroIndex,
  kFakeIndex,    // gamma equals a fake index
  kFakeId,       // replier id equals a fake identity
  kModeMismatch, // randomizer point presence disagrees with the ring mode
  kBadSignature,
  kOffPolynomial,
};

std::string_view to_string(FractionVerdict v);

FractionVerdict check_fraction(const PreparedRequest& request, const SignFraction& fraction);
inline bool validate_fraction(const PreparedRequest& request, const SignFraction& fraction) {
  return check_fraction(request, fraction) == FractionVerdict::kAccept;
}

struct AssemblyReport {
  struct Discard {
    std::size_t index;
    ErrorCode reason;
  };
  std::vector<Discard> discarded;
  std::size_t used = 0;
  std::size_t spares = 0;
};

// Takes the first t - 1 usable fractions in order, adds the initiator's own
// fraction and the forgeries, and sorts entries by gamma. Unusable fractions
// are discarded: failed validation (kInvalidRequest, or kGammaCollision when
// gamma is a fake index, kIdCollision when the id is a fake), repeated
// identity (kDuplicateReplier) or repeated gamma (kGammaCollision). If fewer
// than t - 1 remain, throws the first discard reason among kGammaCollision /
// kDuplicateReplier, else kInsufficientFractions.
RingAnnouncement assemble(const PreparedRequest& request, const cpk::IdentityKey& own_key,
                          std::span<const SignFraction> fractions, Rng& rng, AssemblyReport* report = nullptr);
RingAnnouncement assemble(const cpk::SystemParams& params, const SignRequest& request,
                          const cpk::IdentityKey& own_key, std::span<const SignFraction> fractions, Rng& rng,
                          AssemblyReport* report = nullptr);

enum class RingVerdict {
  kAccept,
  kMalformed,  // duplicate ids or indices, zero index, bad (t, r), mode mismatch
  kSignature,  // some Elgamal equation fails
  kPolynomial, // entries do not lie on one degree-(r - t) polynomial through the anchor
};

std::string_view to_string(RingVerdict v);

// Reconstructs f from the first r - t entries in canonical order.
RingVerdict verify_ring(const cpk::SystemParams& params, const RingAnnouncement& announcement);
// Reconstructs f from r - t entries sampled with rng.
RingVerdict verify_ring(const cpk::SystemParams& params, const RingAnnouncement& announcement, Rng& rng);
// Reconstructs f from the given r - t entry positions (must be distinct and in range).
RingVerdict verify_ring_with_subset(const cpk::SystemParams& params, const RingAnnouncement& announcement,
                                    std::span<const std::size_t> subset);

// -- canonical binary encodings (see docs/wire_format.md) --
Bytes encode_request(const ec::Curve& curve, const SignRequest& request);
SignRequest decode_request(const ec::Curve& curve, ByteView bytes);
Bytes encode_fraction(const ec::Curve& curve, const SignFraction& fraction);
SignFraction decode_fraction(const ec::Curve& curve, ByteView bytes);
Bytes encode_announcement(const ec::Curve& curve, const RingAnnouncement& announcement);
RingAnnouncement decode_announcement(const ec::Curve& curve, ByteView bytes);

}  // namespace vanetagg::itrs
