#include "vanetagg/elgamal.hpp"

#include "vanetagg/error.hpp"
#include "vanetagg/hashes.hpp"

namespace vanetagg::elgamal {

ec::Scalar message_scalar(const ec::Curve& curve, const Message& m) { return curve.reduce(m.to_bytes()); }

Message scalar_message(const ec::Curve& curve, const ec::Scalar& s) {
  (void)curve;
  return Message::from_bytes(s.to_bytes(Message::kBytes));
}

std::optional<ElgamalTriple> sign_with_nonce(const ec::Curve& curve, const ec::Scalar& sk, const Message& m,
                                             const ec::Scalar& c) {
  if (c.is_zero()) return std::nullopt;
  ec::Point alpha = curve.mul_base(c);
  ec::Scalar h = point_challenge(curve, alpha);
  if (h.is_zero()) return std::nullopt;
  ec::Scalar beta = curve.mul(curve.sub(message_scalar(curve, m), curve.mul(sk, h)), curve.inverse(c));
  return ElgamalTriple{m, std::move(alpha), std::move(beta)};
}

ElgamalTriple sign(const ec::Curve& curve, const ec::Scalar& sk, const Message& m, Rng& rng) {
  for (;;) {
    if (auto sig = sign_with_nonce(curve, sk, m, curve.random_nonzero(rng))) return *std::move(sig);
  }
}

bool verify(const ec::Curve& curve, const ec::Point& pk, const ElgamalTriple& sig) {
  if (curve.is_infinity(sig.alpha)) return false;
  // m P - beta alpha == H1(alpha) PK
  ec::Point lhs = curve.mul_add(message_scalar(curve, sig.m), curve.negate(sig.beta), sig.alpha);
  ec::Point rhs = curve.mul(point_challenge(curve, sig.alpha), pk);
  return curve.equal(lhs, rhs);
}

std::optional<ElgamalTriple> forge_with(const ec::Curve& curve, const ec::Point& pk, const ec::Scalar& a,
                                        const ec::Scalar& b) {
  if (a.is_zero() || b.is_zero()) return std::nullopt;
  ec::Point alpha = curve.mul_add(a, b, pk);
  if (curve.is_infinity(alpha)) return std::nullopt;
  ec::Scalar h = point_challenge(curve, alpha);
  if (h.is_zero()) return std::nullopt;
  ec::Scalar beta = curve.negate(curve.mul(curve.inverse(b), h));
  Message m = scalar_message(curve, curve.mul(a, beta));
  return ElgamalTriple{m, std::move(alpha), std::move(beta)};
}

ElgamalTriple forge(const ec::Curve& curve, const ec::Point& pk, Rng& rng) {
  if (curve.is_infinity(pk)) fail(ErrorCode::kInvalidArgument, "cannot forge against the point at infinity");
  for (;;) {
    ec::Scalar a = curve.random_nonzero(rng);
    ec::Scalar b = curve.random_nonzero(rng);
    if (auto sig = forge_with(curve, pk, a, b)) return *std::move(sig);
  }
}

std::size_t encoded_size(const ec::Curve& curve) {
  return Message::kBytes + curve.point_bytes() + curve.scalar_bytes();
}

void encode(const ec::Curve& curve, const ElgamalTriple& sig, ByteWriter& out) {
  out.raw(sig.m.to_bytes());
  out.raw(curve.encode(sig.alpha));
  out.raw(curve.encode_scalar(sig.beta));
}

ElgamalTriple decode(const ec::Curve& curve, ByteReader& in) {
  Message m = Message::from_bytes(in.raw(Message::kBytes));
  ec::Point alpha = curve.decode(in.raw(curve.point_bytes()));
  ec::Scalar beta = curve.decode_scalar(in.raw(curve.scalar_bytes()));
  return ElgamalTriple{m, std::move(alpha), std::move(beta)};
}

}  // namespace vanetagg::elgamal
