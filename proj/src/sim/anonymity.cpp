#include "vanetagg/sim/anonymity.hpp"

#include <numeric>
#include <string>

#include "vanetagg/error.hpp"

namespace vanetagg::sim {

namespace {

void check_domain(std::uint32_t t, std::uint32_t r, std::uint32_t j) {
  if (j < 1 || j > t || t > r) {
    fail(ErrorCode::kDomainError, "anonymity_prob needs 1 <= j <= t <= r, got t=" + std::to_string(t) +
                                      " r=" + std::to_string(r) + " j=" + std::to_string(j));
  }
}

// C(n, k), or 0 when it overflows 64 bits.
std::uint64_t binom_u64(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // c * (n - k + i) / i stays integral at every step.
    const std::uint64_t g = std::gcd(c, i);
    const std::uint64_t num = n - k + i;
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(c / g, num / (i / g), &out)) return 0;
    c = out;
  }
  return c;
}

double binom_f64(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  double c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return c;
}

}  // namespace

double anonymity_prob(std::uint32_t t, std::uint32_t r, std::uint32_t j) {
  check_domain(t, r, j);
  if (binom_u64(r, t) != 0) return anonymity_prob_exact(t, r, j).value();
  // Sum the smaller tail for accuracy.
  double head = 0;
  double tail = 0;
  const double total = binom_f64(r, t);
  for (std::uint32_t x = 0; x <= t; ++x) {
    const double p = binom_f64(t, x) * binom_f64(r - t, t - x) / total;
    (x >= j ? tail : head) += p;
  }
  return tail <= head ? tail : 1.0 - head;
}

Fraction anonymity_prob_exact(std::uint32_t t, std::uint32_t r, std::uint32_t j) {
  check_domain(t, r, j);
  const std::uint64_t den = binom_u64(r, t);
  if (den == 0) fail(ErrorCode::kDomainError, "C(r, t) exceeds 64 bits");
  std::uint64_t num = 0;
  for (std::uint32_t x = j; x <= t; ++x) {
    // Each term counts guess sets with exactly x signers, so it is <= den.
    num += binom_u64(t, x) * binom_u64(r - t, t - x);
  }
  const std::uint64_t g = std::gcd(num, den);
  return Fraction{num / g, den / g};
}

}  // namespace vanetagg::sim
