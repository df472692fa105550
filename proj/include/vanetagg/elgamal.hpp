#pragma once

// EC-Elgamal signatures (m, alpha, beta) with the verification equation
//
//     (m mod q) P == H1(alpha) PK + beta alpha
//
// and the forgery that produces a valid triple for any public key without
// its secret, at the price of not being able to choose m.

#include <optional>

#include "vanetagg/bytes.hpp"
#include "vanetagg/ec.hpp"
#include "vanetagg/gf2.hpp"
#include "vanetagg/rng.hpp"

namespace vanetagg::elgamal {

// Messages are full l-bit strings; only the curve equation reduces them mod q.
using Message = gf2::Gf256;

struct ElgamalTriple {
  Message m;
  ec::Point alpha;
  ec::Scalar beta;
};

ec::Scalar message_scalar(const ec::Curve& curve, const Message& m);
// Big-endian embedding of a scalar into the low bytes of an l-bit string.
Message scalar_message(const ec::Curve& curve, const ec::Scalar& s);

ElgamalTriple sign(const ec::Curve& curve, const ec::Scalar& sk, const Message& m, Rng& rng);
// One signing attempt with nonce c; empty when c = 0 or H1(cP) = 0.
std::optional<ElgamalTriple> sign_with_nonce(const ec::Curve& curve, const ec::Scalar& sk, const Message& m,
                                             const ec::Scalar& c);

bool verify(const ec::Curve& curve, const ec::Point& pk, const ElgamalTriple& sig);

// Throws kInvalidArgument when pk is the point at infinity.
ElgamalTriple forge(const ec::Curve& curve, const ec::Point& pk, Rng& rng);
// alpha = aP + b PK, beta = -H1(alpha)/b, m = a beta. Empty for degenerate draws
// (a or b zero, alpha at infinity, H1(alpha) = 0).
std::optional<ElgamalTriple> forge_with(const ec::Curve& curve, const ec::Point& pk, const ec::Scalar& a,
                                        const ec::Scalar& b);

// m (32 bytes) | alpha (compressed point) | beta (big-endian scalar)
std::size_t encoded_size(const ec::Curve& curve);
void encode(const ec::Curve& curve, const ElgamalTriple& sig, ByteWriter& out);
ElgamalTriple decode(const ec::Curve& curve, ByteReader& in);

}  // namespace vanetagg::elgamal
