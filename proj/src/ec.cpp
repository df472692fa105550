#include "vanetagg/ec.hpp"

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/obj_mac.h>

#include <algorithm>

#include "vanetagg/error.hpp"

namespace vanetagg::ec {

namespace detail {
void BnFree::operator()(bignum_st* p) const { BN_free(p); }
void PointFree::operator()(ec_point_st* p) const { EC_POINT_free(p); }
}  // namespace detail

namespace {

void check(int ok, const char* what) {
  if (ok != 1) fail(ErrorCode::kCryptoFailure, what);
}

template <class T>
T* check_ptr(T* p, const char* what) {
  if (p == nullptr) fail(ErrorCode::kCryptoFailure, what);
  return p;
}

// One scratch context per thread; OpenSSL contexts are not shareable.
BN_CTX* ctx() {
  struct Holder {
    BN_CTX* c = BN_CTX_new();
    ~Holder() { BN_CTX_free(c); }
  };
  thread_local Holder holder;
  return check_ptr(holder.c, "BN_CTX_new");
}

}  // namespace

// ---------------------------------------------------------------- Scalar

Scalar::Scalar() : bn_(check_ptr(BN_new(), "BN_new")) {}

Scalar::Scalar(const Scalar& o) : bn_(check_ptr(BN_dup(o.bn_.get()), "BN_dup")) {}

Scalar& Scalar::operator=(const Scalar& o) {
  if (this != &o) check_ptr(BN_copy(bn_.get(), o.bn_.get()), "BN_copy");
  return *this;
}

Scalar Scalar::from_u64(std::uint64_t v) {
  Scalar s;
  check(BN_set_word(s.raw(), v), "BN_set_word");
  return s;
}

bool Scalar::is_zero() const { return BN_is_zero(bn_.get()); }

std::uint64_t Scalar::to_u64() const {
  if (BN_num_bytes(bn_.get()) > 8) fail(ErrorCode::kInvalidArgument, "scalar does not fit in 64 bits");
  auto bytes = to_bytes(8);
  std::uint64_t v = 0;
  for (auto b : bytes) v = v << 8 | b;
  return v;
}

Bytes Scalar::to_bytes(std::size_t width) const {
  Bytes out(width);
  check(BN_bn2binpad(bn_.get(), out.data(), static_cast<int>(width)) == static_cast<int>(width) ? 1 : 0,
        "scalar wider than encoding");
  return out;
}

bool operator==(const Scalar& a, const Scalar& b) { return BN_cmp(a.raw(), b.raw()) == 0; }

// ---------------------------------------------------------------- Point

Point::Point(const Point& o) : group_(o.group_), p_(check_ptr(EC_POINT_dup(o.p_.get(), o.group_), "EC_POINT_dup")) {}

Point& Point::operator=(const Point& o) {
  if (this != &o) {
    group_ = o.group_;
    p_.reset(check_ptr(EC_POINT_dup(o.p_.get(), o.group_), "EC_POINT_dup"));
  }
  return *this;
}

// ---------------------------------------------------------------- Curve

namespace {

EC_GROUP* make_toy_group() {
  BN_CTX* c = ctx();
  std::unique_ptr<BIGNUM, detail::BnFree> p(BN_new()), a(BN_new()), b(BN_new()), n(BN_new()), h(BN_new()),
      gx(BN_new()), gy(BN_new());
  BN_set_word(p.get(), 97);
  BN_set_word(a.get(), 1);
  BN_set_word(b.get(), 4);
  BN_set_word(n.get(), 89);
  BN_set_word(h.get(), 1);
  BN_set_word(gx.get(), 0);
  BN_set_word(gy.get(), 2);
  EC_GROUP* g = check_ptr(EC_GROUP_new_curve_GFp(p.get(), a.get(), b.get(), c), "toy curve");
  EC_POINT* gen = check_ptr(EC_POINT_new(g), "EC_POINT_new");
  check(EC_POINT_set_affine_coordinates(g, gen, gx.get(), gy.get(), c), "toy generator");
  check(EC_GROUP_set_generator(g, gen, n.get(), h.get()), "toy generator order");
  EC_POINT_free(gen);
  return g;
}

}  // namespace

const Curve& Curve::p256() {
  static const Curve curve(CurveId::kP256,
                           check_ptr(EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1), "P-256 group"));
  return curve;
}

const Curve& Curve::toy97() {
  static const Curve curve(CurveId::kToy97, make_toy_group());
  return curve;
}

const Curve& Curve::by_id(CurveId id) {
  switch (id) {
    case CurveId::kP256: return p256();
    case CurveId::kToy97: return toy97();
  }
  fail(ErrorCode::kMalformedPacket, "unknown curve id");
}

Curve::Curve(CurveId id, EC_GROUP* group) : id_(id), group_(group) {
  check(EC_GROUP_get_order(group_, order_.raw(), ctx()), "EC_GROUP_get_order");
  generator_.reset(new Point(wrap(check_ptr(EC_POINT_dup(EC_GROUP_get0_generator(group_), group_), "generator"))));
  scalar_bytes_ = static_cast<std::size_t>(BN_num_bytes(order_.raw()));
  point_bytes_ = 1 + static_cast<std::size_t>((EC_GROUP_get_degree(group_) + 7) / 8);
}

Curve::~Curve() {
  generator_.reset();
  EC_GROUP_free(group_);
}

std::string_view Curve::name() const {
  switch (id_) {
    case CurveId::kP256: return "P-256";
    case CurveId::kToy97: return "toy-F97";
  }
  return "unknown";
}

Point Curve::infinity() const {
  Point p = wrap(check_ptr(EC_POINT_new(group_), "EC_POINT_new"));
  check(EC_POINT_set_to_infinity(group_, p.raw()), "set_to_infinity");
  return p;
}

bool Curve::is_infinity(const Point& p) const { return EC_POINT_is_at_infinity(group_, p.raw()) == 1; }

bool Curve::equal(const Point& a, const Point& b) const {
  int r = EC_POINT_cmp(group_, a.raw(), b.raw(), ctx());
  if (r < 0) fail(ErrorCode::kCryptoFailure, "EC_POINT_cmp");
  return r == 0;
}

Point Curve::add(const Point& a, const Point& b) const {
  Point out = infinity();
  check(EC_POINT_add(group_, out.raw(), a.raw(), b.raw(), ctx()), "EC_POINT_add");
  return out;
}

Point Curve::negate(const Point& p) const {
  Point out = p;
  check(EC_POINT_invert(group_, out.raw(), ctx()), "EC_POINT_invert");
  return out;
}

Point Curve::mul(const Scalar& k, const Point& p) const {
  Point out = infinity();
  check(EC_POINT_mul(group_, out.raw(), nullptr, p.raw(), k.raw(), ctx()), "EC_POINT_mul");
  return out;
}

Point Curve::mul_base(const Scalar& k) const {
  Point out = infinity();
  check(EC_POINT_mul(group_, out.raw(), k.raw(), nullptr, nullptr, ctx()), "EC_POINT_mul");
  return out;
}

Point Curve::mul_add(const Scalar& a, const Scalar& b, const Point& q) const {
  Point out = infinity();
  check(EC_POINT_mul(group_, out.raw(), a.raw(), q.raw(), b.raw(), ctx()), "EC_POINT_mul");
  return out;
}

Bytes Curve::encode(const Point& p) const {
  Bytes out(point_bytes_, 0);
  if (is_infinity(p)) return out;
  std::size_t n = EC_POINT_point2oct(group_, p.raw(), POINT_CONVERSION_COMPRESSED, out.data(), out.size(), ctx());
  if (n != point_bytes_) fail(ErrorCode::kCryptoFailure, "EC_POINT_point2oct");
  return out;
}

Point Curve::decode(ByteView bytes) const {
  if (bytes.size() != point_bytes_) fail(ErrorCode::kMalformedPacket, "point encoding has wrong length");
  if (std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; })) return infinity();
  if (bytes[0] != 0x02 && bytes[0] != 0x03) fail(ErrorCode::kMalformedPacket, "point is not compressed");
  Point p = infinity();
  if (EC_POINT_oct2point(group_, p.raw(), bytes.data(), bytes.size(), ctx()) != 1) {
    fail(ErrorCode::kMalformedPacket, "point not on curve");
  }
  return p;
}

Scalar Curve::reduce(ByteView big_endian) const {
  Scalar raw;
  check_ptr(BN_bin2bn(big_endian.data(), static_cast<int>(big_endian.size()), raw.raw()), "BN_bin2bn");
  Scalar out;
  check(BN_nnmod(out.raw(), raw.raw(), order_.raw(), ctx()), "BN_nnmod");
  return out;
}

Scalar Curve::add(const Scalar& a, const Scalar& b) const {
  Scalar out;
  check(BN_mod_add(out.raw(), a.raw(), b.raw(), order_.raw(), ctx()), "BN_mod_add");
  return out;
}

Scalar Curve::sub(const Scalar& a, const Scalar& b) const {
  Scalar out;
  check(BN_mod_sub(out.raw(), a.raw(), b.raw(), order_.raw(), ctx()), "BN_mod_sub");
  return out;
}

Scalar Curve::mul(const Scalar& a, const Scalar& b) const {
  Scalar out;
  check(BN_mod_mul(out.raw(), a.raw(), b.raw(), order_.raw(), ctx()), "BN_mod_mul");
  return out;
}

Scalar Curve::negate(const Scalar& a) const { return sub(Scalar(), a); }

Scalar Curve::inverse(const Scalar& a) const {
  if (a.is_zero()) fail(ErrorCode::kZeroInverse, "inverse of zero scalar");
  Scalar out;
  check_ptr(BN_mod_inverse(out.raw(), a.raw(), order_.raw(), ctx()), "BN_mod_inverse");
  return out;
}

Scalar Curve::random_nonzero(Rng& rng) const {
  const int bits = BN_num_bits(order_.raw());
  Bytes buf(scalar_bytes_);
  const int excess = static_cast<int>(8 * scalar_bytes_) - bits;
  const std::uint8_t top_mask = static_cast<std::uint8_t>(0xff >> excess);
  for (;;) {
    rng.fill(buf);
    buf[0] &= top_mask;
    Scalar s;
    check_ptr(BN_bin2bn(buf.data(), static_cast<int>(buf.size()), s.raw()), "BN_bin2bn");
    if (!s.is_zero() && BN_cmp(s.raw(), order_.raw()) < 0) return s;
  }
}

Scalar Curve::decode_scalar(ByteView bytes) const {
  if (bytes.size() != scalar_bytes_) fail(ErrorCode::kMalformedPacket, "scalar encoding has wrong length");
  Scalar s;
  check_ptr(BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), s.raw()), "BN_bin2bn");
  if (BN_cmp(s.raw(), order_.raw()) >= 0) fail(ErrorCode::kMalformedPacket, "scalar out of range");
  return s;
}

}  // namespace vanetagg::ec
