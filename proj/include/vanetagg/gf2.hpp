#pragma once

// Binary extension fields GF(2^k) in polynomial basis, plus dense polynomials
// over them with Lagrange interpolation.
//
// Element bit i is the coefficient of x^i. The canonical byte encoding is
// big-endian: bit 0 is the least significant bit of the last byte.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#if defined(__x86_64__)
#include <immintrin.h>
#endif

#include "vanetagg/bytes.hpp"
#include "vanetagg/error.hpp"
#include "vanetagg/rng.hpp"

namespace vanetagg::gf2 {

// x^16 + x^5 + x^3 + x^2 + 1. Small enough for exhaustive oracles.
struct Gf16Traits {
  static constexpr std::size_t kBits = 16;
  static constexpr std::array<unsigned, 4> kTaps{5, 3, 2, 0};
};

// x^256 + x^10 + x^5 + x^2 + 1.
struct Gf256Traits {
  static constexpr std::size_t kBits = 256;
  static constexpr std::array<unsigned, 4> kTaps{10, 5, 2, 0};
};

namespace detail {

using u128 = unsigned __int128;

// Carry-less 64x64 -> 128 multiply, 4-bit window.
inline u128 clmul64(std::uint64_t a, std::uint64_t b) {
  u128 table[16];
  table[0] = 0;
  table[1] = b;
  for (int i = 2; i < 16; i += 2) {
    table[i] = table[i / 2] << 1;
    table[i + 1] = table[i] ^ b;
  }
  u128 acc = 0;
  for (int shift = 60; shift >= 0; shift -= 4) {
    acc = (acc << 4) ^ table[(a >> shift) & 0xf];
  }
  return acc;
}

// Full schoolbook product of two N-word operands into 2N words.
template <std::size_t N>
inline void clmul_words_portable(const std::array<std::uint64_t, N>& a, const std::array<std::uint64_t, N>& b,
                                 std::array<std::uint64_t, 2 * N>& out) {
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      auto prod = clmul64(a[i], b[j]);
      out[i + j] ^= static_cast<std::uint64_t>(prod);
      out[i + j + 1] ^= static_cast<std::uint64_t>(prod >> 64);
    }
  }
}

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define VANETAGG_HAVE_PCLMUL_DISPATCH 1
template <std::size_t N>
__attribute__((target("pclmul,sse2"))) inline void clmul_words_pclmul(const std::array<std::uint64_t, N>& a,
                                                                        const std::array<std::uint64_t, N>& b,
                                                                        std::array<std::uint64_t, 2 * N>& out) {
  for (std::size_t i = 0; i < N; ++i) {
    __m128i x = _mm_set_epi64x(0, static_cast<long long>(a[i]));
    for (std::size_t j = 0; j < N; ++j) {
      __m128i y = _mm_set_epi64x(0, static_cast<long long>(b[j]));
      __m128i p = _mm_clmulepi64_si128(x, y, 0x00);
      out[i + j] ^= static_cast<std::uint64_t>(_mm_cvtsi128_si64(p));
      out[i + j + 1] ^= static_cast<std::uint64_t>(_mm_cvtsi128_si64(_mm_unpackhi_epi64(p, p)));
    }
  }
}

inline bool cpu_has_pclmul() {
  static const bool has = __builtin_cpu_supports("pclmul");
  return has;
}
#endif

template <std::size_t N>
inline void clmul_words(const std::array<std::uint64_t, N>& a, const std::array<std::uint64_t, N>& b,
                        std::array<std::uint64_t, 2 * N>& out) {
#ifdef VANETAGG_HAVE_PCLMUL_DISPATCH
  if (cpu_has_pclmul()) return clmul_words_pclmul<N>(a, b, out);
#endif
  clmul_words_portable<N>(a, b, out);
}

// Spreads the 8 bits of a byte into the even bit positions of a 16-bit word.
constexpr std::array<std::uint16_t, 256> make_spread_table() {
  std::array<std::uint16_t, 256> t{};
  for (unsigned v = 0; v < 256; ++v) {
    std::uint16_t s = 0;
    for (unsigned b = 0; b < 8; ++b) {
      if (v >> b & 1u) s = static_cast<std::uint16_t>(s | 1u << (2 * b));
    }
    t[v] = s;
  }
  return t;
}

inline constexpr auto kSpread = make_spread_table();

inline u128 spread64(std::uint64_t a) {
  u128 out = 0;
  for (int i = 7; i >= 0; --i) out = (out << 16) | kSpread[(a >> (8 * i)) & 0xff];
  return out;
}

}  // namespace detail

template <class Traits>
class Element {
 public:
  static constexpr std::size_t kBits = Traits::kBits;
  static constexpr std::size_t kWords = (kBits + 63) / 64;
  static constexpr std::size_t kBytes = kBits / 8;
  static_assert(kBits % 8 == 0, "field width must be a whole number of bytes");

  using Words = std::array<std::uint64_t, kWords>;
  using Encoded = std::array<std::uint8_t, kBytes>;

  constexpr Element() = default;

  static constexpr Element zero() { return Element(); }
  static constexpr Element one() { return from_u64(1); }
  static constexpr Element from_u64(std::uint64_t v) {
    Element e;
    e.w_[0] = v;
    e.mask_top();
    return e;
  }
  static constexpr Element from_words(const Words& w) {
    Element e;
    e.w_ = w;
    e.mask_top();
    return e;
  }
  // The encoding must be exactly kBytes long.
  static Element from_bytes(ByteView bytes) {
    if (bytes.size() != kBytes) fail(ErrorCode::kInvalidArgument, "field element encoding has wrong length");
    Element e;
    for (std::size_t i = 0; i < kBytes; ++i) {
      std::size_t bit = 8 * (kBytes - 1 - i);
      e.w_[bit / 64] |= std::uint64_t{bytes[i]} << (bit % 64);
    }
    return e;
  }
  static Element random(Rng& rng) {
    Encoded b{};
    rng.fill(b);
    return from_bytes(b);
  }
  static Element random_nonzero(Rng& rng) {
    for (;;) {
      auto e = random(rng);
      if (!e.is_zero()) return e;
    }
  }

  Encoded to_bytes() const {
    Encoded out{};
    for (std::size_t i = 0; i < kBytes; ++i) {
      std::size_t bit = 8 * (kBytes - 1 - i);
      out[i] = static_cast<std::uint8_t>(w_[bit / 64] >> (bit % 64));
    }
    return out;
  }

  const Words& words() const { return w_; }
  bool is_zero() const {
    return std::all_of(w_.begin(), w_.end(), [](std::uint64_t v) { return v == 0; });
  }
  bool bit(std::size_t i) const { return (w_[i / 64] >> (i % 64)) & 1u; }

  friend bool operator==(const Element&, const Element&) = default;
  // Total order on the integer value of the encoding; used for canonical sorting.
  friend bool operator<(const Element& a, const Element& b) {
    for (std::size_t i = kWords; i-- > 0;) {
      if (a.w_[i] != b.w_[i]) return a.w_[i] < b.w_[i];
    }
    return false;
  }

  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a += b; }
  Element& operator+=(const Element& o) {
    for (std::size_t i = 0; i < kWords; ++i) w_[i] ^= o.w_[i];
    return *this;
  }
  Element& operator-=(const Element& o) { return *this += o; }

  friend Element operator*(const Element& a, const Element& b) {
    Wide p{};
    detail::clmul_words<kWords>(a.w_, b.w_, p);
    return reduce(p);
  }
  Element& operator*=(const Element& o) { return *this = *this * o; }

  Element square() const {
#ifdef VANETAGG_HAVE_PCLMUL_DISPATCH
    if (detail::cpu_has_pclmul()) return *this * *this;
#endif
    Wide p{};
    for (std::size_t i = 0; i < kWords; ++i) {
      auto s = detail::spread64(w_[i]);
      p[2 * i] = static_cast<std::uint64_t>(s);
      p[2 * i + 1] = static_cast<std::uint64_t>(s >> 64);
    }
    return reduce(p);
  }

  // a^(2^k - 2) via an Itoh-Tsujii addition chain. Throws ZeroInverse on 0.
  Element inverse() const {
    if (is_zero()) fail(ErrorCode::kZeroInverse, "inverse of zero field element");
    // beta = a^(2^k - 1), built up for k = kBits - 1.
    constexpr std::size_t target = kBits - 1;
    int top = 63;
    while (!((target >> top) & 1u)) --top;
    Element beta = *this;
    std::size_t k = 1;
    for (int b = top - 1; b >= 0; --b) {
      Element t = beta;
      for (std::size_t s = 0; s < k; ++s) t = t.square();
      beta = t * beta;
      k *= 2;
      if ((target >> b) & 1u) {
        beta = beta.square() * *this;
        k += 1;
      }
    }
    return beta.square();
  }

  friend Element operator/(const Element& a, const Element& b) { return a * b.inverse(); }

 private:
  using Wide = std::array<std::uint64_t, 2 * kWords>;

  constexpr void mask_top() {
    if constexpr (kBits % 64 != 0) w_[kWords - 1] &= (std::uint64_t{1} << (kBits % 64)) - 1;
  }

  static Element reduce(Wide& p) {
    if constexpr (kBits % 64 == 0) {
      // Fold each high word h*x^(64(i-W)) * x^kBits into the taps.
      for (std::size_t i = 2 * kWords - 1; i >= kWords; --i) {
        std::uint64_t h = p[i];
        if (h == 0) continue;
        p[i] = 0;
        std::size_t base = 64 * (i - kWords);
        for (unsigned tap : Traits::kTaps) {
          std::size_t s = base + tap;
          std::size_t idx = s / 64, off = s % 64;
          p[idx] ^= h << off;
          if (off != 0) p[idx + 1] ^= h >> (64 - off);
        }
      }
    } else {
      for (std::size_t b = 2 * kBits - 2; b >= kBits; --b) {
        if (!((p[b / 64] >> (b % 64)) & 1u)) continue;
        p[b / 64] ^= std::uint64_t{1} << (b % 64);
        for (unsigned tap : Traits::kTaps) {
          std::size_t s = b - kBits + tap;
          p[s / 64] ^= std::uint64_t{1} << (s % 64);
        }
      }
    }
    Element e;
    std::copy_n(p.begin(), kWords, e.w_.begin());
    return e;
  }

  Words w_{};
};

using Gf16 = Element<Gf16Traits>;
using Gf256 = Element<Gf256Traits>;

// Dense polynomial over a field, lowest-degree coefficient first, trailing
// zeros trimmed so the zero polynomial has no coefficients (degree -1).
template <class F>
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<F> coeffs) : c_(std::move(coeffs)) { trim(); }

  const std::vector<F>& coefficients() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  F constant_term() const { return c_.empty() ? F::zero() : c_.front(); }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }

  std::vector<F> c_;
};

// Horner evaluation.
template <class F>
F poly_eval(const Polynomial<F>& p, const F& x) {
  const auto& c = p.coefficients();
  F acc = F::zero();
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

template <class F>
using Point2 = std::pair<F, F>;

// Unique polynomial of degree <= points.size()-1 through all points, built
// from the Lagrange basis with one batched inversion.
template <class F>
Polynomial<F> interpolate(std::span<const Point2<F>> points) {
  const std::size_t k = points.size();
  if (k == 0) fail(ErrorCode::kInvalidArgument, "interpolate needs at least one point");
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      if (points[i].first == points[j].first) fail(ErrorCode::kDuplicateAbscissa, "repeated x-coordinate");
    }
  }

  // master(x) = prod (x - x_i), degree k.
  std::vector<F> master(k + 1, F::zero());
  master[0] = F::one();
  for (std::size_t i = 0; i < k; ++i) {
    const F& xi = points[i].first;
    for (std::size_t d = i + 1; d > 0; --d) master[d] = master[d - 1] + master[d] * xi;
    master[0] = master[0] * xi;
  }

  // Quotients master / (x - x_i) and their values at x_i.
  std::vector<std::vector<F>> basis(k, std::vector<F>(k));
  std::vector<F> denom(k);
  for (std::size_t i = 0; i < k; ++i) {
    const F& xi = points[i].first;
    auto& q = basis[i];
    q[k - 1] = master[k];
    for (std::size_t d = k - 1; d > 0; --d) q[d - 1] = master[d] + xi * q[d];
    F w = F::zero();
    for (std::size_t d = k; d-- > 0;) w = w * xi + q[d];
    denom[i] = w;
  }

  // Montgomery batch inversion of the denominators.
  std::vector<F> prefix(k);
  F run = F::one();
  for (std::size_t i = 0; i < k; ++i) {
    prefix[i] = run;
    run = run * denom[i];
  }
  F inv = run.inverse();
  std::vector<F> inv_denom(k);
  for (std::size_t i = k; i-- > 0;) {
    inv_denom[i] = inv * prefix[i];
    inv = inv * denom[i];
  }

  std::vector<F> coeffs(k, F::zero());
  for (std::size_t i = 0; i < k; ++i) {
    F scale = points[i].second * inv_denom[i];
    if (scale.is_zero()) continue;
    for (std::size_t d = 0; d < k; ++d) coeffs[d] += scale * basis[i][d];
  }
  return Polynomial<F>(std::move(coeffs));
}

template <class F>
Polynomial<F> interpolate(const std::vector<Point2<F>>& points) {
  return interpolate(std::span<const Point2<F>>(points));
}

}  // namespace vanetagg::gf2
