#pragma once

// Prime-order elliptic-curve groups backed by OpenSSL's EC_GROUP/EC_POINT.
// Two curves exist: NIST P-256 for real use and a 89-element toy curve over
// F_97 whose group is small enough to check by brute force.

#include <cstdint>
#include <memory>
#include <string_view>

#include "vanetagg/bytes.hpp"
#include "vanetagg/rng.hpp"

struct bignum_st;
struct ec_group_st;
struct ec_point_st;

namespace vanetagg::ec {

enum class CurveId : std::uint8_t {
  kP256 = 1,
  // y^2 = x^3 + x + 4 over F_97, order 89, generator (0, 2).
  kToy97 = 2,
};

namespace detail {
struct BnFree {
  void operator()(bignum_st* p) const;
};
struct PointFree {
  void operator()(ec_point_st* p) const;
};
}  // namespace detail

// Integer in [0, q). Arithmetic goes through Curve so the modulus is explicit.
class Scalar {
 public:
  Scalar();
  Scalar(const Scalar& o);
  Scalar(Scalar&&) noexcept = default;
  Scalar& operator=(const Scalar& o);
  Scalar& operator=(Scalar&&) noexcept = default;
  ~Scalar() = default;

  static Scalar from_u64(std::uint64_t v);

  bool is_zero() const;
  // Throws kInvalidArgument if the value does not fit.
  std::uint64_t to_u64() const;
  // Big-endian, left-padded to width bytes.
  Bytes to_bytes(std::size_t width) const;

  friend bool operator==(const Scalar& a, const Scalar& b);

  const bignum_st* raw() const { return bn_.get(); }
  bignum_st* raw() { return bn_.get(); }

 private:
  std::unique_ptr<bignum_st, detail::BnFree> bn_;
};

class Curve;

// Group element. Only meaningful together with the Curve that created it.
class Point {
 public:
  Point(const Point& o);
  Point(Point&&) noexcept = default;
  Point& operator=(const Point& o);
  Point& operator=(Point&&) noexcept = default;
  ~Point() = default;

  const ec_point_st* raw() const { return p_.get(); }
  ec_point_st* raw() { return p_.get(); }

 private:
  friend class Curve;
  Point(const ec_group_st* group, ec_point_st* p) : group_(group), p_(p) {}

  const ec_group_st* group_;
  std::unique_ptr<ec_point_st, detail::PointFree> p_;
};

class Curve {
 public:
  static const Curve& p256();
  static const Curve& toy97();
  static const Curve& by_id(CurveId id);

  Curve(const Curve&) = delete;
  Curve& operator=(const Curve&) = delete;
  ~Curve();

  CurveId id() const { return id_; }
  std::string_view name() const;
  const Scalar& order() const { return order_; }
  std::size_t scalar_bytes() const { return scalar_bytes_; }
  // Compressed SEC1 length: one tag byte plus the x-coordinate.
  std::size_t point_bytes() const { return point_bytes_; }

  // -- group operations --
  const Point& generator() const { return *generator_; }
  Point infinity() const;
  bool is_infinity(const Point& p) const;
  bool equal(const Point& a, const Point& b) const;
  Point add(const Point& a, const Point& b) const;
  Point negate(const Point& p) const;
  Point mul(const Scalar& k, const Point& p) const;
  Point mul_base(const Scalar& k) const;
  // a*G + b*Q
  Point mul_add(const Scalar& a, const Scalar& b, const Point& q) const;

  // Compressed encoding; the point at infinity encodes as point_bytes() zeros.
  Bytes encode(const Point& p) const;
  // Throws kMalformedPacket for wrong length or an off-curve point.
  Point decode(ByteView bytes) const;

  // -- arithmetic mod q --
  Scalar reduce(ByteView big_endian) const;
  Scalar add(const Scalar& a, const Scalar& b) const;
  Scalar sub(const Scalar& a, const Scalar& b) const;
  Scalar mul(const Scalar& a, const Scalar& b) const;
  Scalar negate(const Scalar& a) const;
  // Throws kZeroInverse on 0.
  Scalar inverse(const Scalar& a) const;
  // Uniform over Z_q^*.
  Scalar random_nonzero(Rng& rng) const;
  // Strict decode: exactly scalar_bytes() bytes and value < q.
  Scalar decode_scalar(ByteView bytes) const;
  Bytes encode_scalar(const Scalar& s) const { return s.to_bytes(scalar_bytes_); }

 private:
  Curve(CurveId id, ec_group_st* group);

  Point wrap(ec_point_st* p) const { return Point(group_, p); }

  CurveId id_;
  ec_group_st* group_;
  Scalar order_;
  std::unique_ptr<Point> generator_;
  std::size_t scalar_bytes_;
  std::size_t point_bytes_;
};

}  // namespace vanetagg::ec
