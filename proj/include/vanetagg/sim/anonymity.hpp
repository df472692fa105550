#pragma once

#include <cstdint>

namespace vanetagg::sim {

// P[X >= j] for X ~ Hypergeometric(population r, t successes, t draws): the
// chance that an adversary naming t of the r ring members at random catches
// at least j of the t actual signers. Requires 1 <= j <= t <= r
// (kDomainError otherwise).
double anonymity_prob(std::uint32_t t, std::uint32_t r, std::uint32_t j);

struct Fraction {
  std::uint64_t num;
  std::uint64_t den;  // reduced, den > 0

  friend bool operator==(const Fraction&, const Fraction&) = default;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Exact form of anonymity_prob. Throws kDomainError when C(r, t) does not fit
// in 64 bits.
Fraction anonymity_prob_exact(std::uint32_t t, std::uint32_t r, std::uint32_t j);

}  // namespace vanetagg::sim
