#include <gtest/gtest.h>

#include "anonymity_enum.hpp"
#include "vanetagg/error.hpp"
#include "vanetagg/sim/anonymity.hpp"

namespace vanetagg::sim {
namespace {

TEST(Anonymity, PublishedSmallCase) {
  EXPECT_EQ(anonymity_prob_exact(2, 3, 1), (Fraction{1, 1}));
  EXPECT_EQ(anonymity_prob_exact(2, 3, 2), (Fraction{1, 3}));
  EXPECT_EQ(anonymity_prob(2, 3, 1), 1.0);
  EXPECT_EQ(anonymity_prob(2, 3, 2), 1.0 / 3.0);
}

TEST(Anonymity, MatchesEnumerationUpToTwelve) {
  for (unsigned r = 1; r <= 12; ++r) {
    for (unsigned t = 1; t <= r; ++t) {
      for (unsigned j = 1; j <= t; ++j) {
        auto [hits, total] = oracle::anonymity_count(t, r, j);
        auto [num, den] = oracle::reduced(hits, total);
        ASSERT_EQ(anonymity_prob_exact(t, r, j), (Fraction{num, den})) << t << " " << r << " " << j;
        ASSERT_NEAR(anonymity_prob(t, r, j), static_cast<double>(hits) / static_cast<double>(total), 1e-12);
      }
    }
  }
}

TEST(Anonymity, FullRingIsCertain) {
  for (unsigned t = 1; t <= 30; ++t) EXPECT_EQ(anonymity_prob(t, t, t), 1.0);
}

TEST(Anonymity, NonincreasingInJ) {
  for (unsigned r = 8; r <= 60; r += 13) {
    for (unsigned t = 1; t <= r; t += 3) {
      double prev = 1.0;
      for (unsigned j = 1; j <= t; ++j) {
        const double p = anonymity_prob(t, r, j);
        EXPECT_LE(p, prev + 1e-15);
        EXPECT_GE(p, 0.0);
        prev = p;
      }
    }
  }
}

TEST(Anonymity, LargeRingsStayInRange) {
  // C(200, 100) overflows the exact form; the floating path still answers.
  const double p = anonymity_prob(100, 200, 60);
  EXPECT_GT(p, 0.0);
  EXPECT_LT(p, 1e-2);
  EXPECT_THROW(anonymity_prob_exact(100, 200, 60), Error);
}

TEST(Anonymity, DomainErrors) {
  for (auto [t, r, j] : {std::tuple{2u, 3u, 0u}, {3u, 2u, 1u}, {2u, 3u, 3u}, {0u, 3u, 0u}}) {
    try {
      (void)anonymity_prob(t, r, j);
      ADD_FAILURE() << t << " " << r << " " << j;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDomainError);
    }
  }
}

}  // namespace
}  // namespace vanetagg::sim
