#pragma once

// Maps between the library's toy curve and the integer oracle, plus H1
// recomputed from its definition.

#include <string_view>

#include "toy_curve.hpp"
#include "vanetagg/ec.hpp"
#include "vanetagg/hashes.hpp"

namespace oracle {

inline const vanetagg::ec::Curve& toy() { return vanetagg::ec::Curve::toy97(); }

inline ToyPoint toy_generator() { return {false, 0, 2}; }

// Library point -> oracle point through the compressed encoding. Returns
// nullopt for an encoding no oracle point has.
inline std::optional<ToyPoint> to_oracle(const vanetagg::ec::Point& p) {
  auto enc = toy().encode(p);
  if (enc[0] == 0) return ToyPoint{};
  for (const auto& q : ToyCurve::all_points()) {
    if (!q.inf && ToyCurve::encode(q) == std::vector<std::uint8_t>(enc.begin(), enc.end())) return q;
  }
  return std::nullopt;
}

// H1(alpha) = SHA-256("vanetagg/H1" || compressed alpha) mod 89.
inline std::uint64_t h1(const ToyPoint& alpha) {
  vanetagg::Bytes data;
  for (char c : std::string_view("vanetagg/H1")) data.push_back(static_cast<std::uint8_t>(c));
  auto enc = ToyCurve::encode(alpha);
  data.insert(data.end(), enc.begin(), enc.end());
  auto d = vanetagg::sha256(data);
  std::uint64_t v = 0;
  for (auto b : d) v = (v * 256 + b) % 89;
  return v;
}

}  // namespace oracle
