#include "vanetagg/itrs.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

namespace vanetagg::itrs {

namespace {

bool contains(std::span<const Gf256> xs, const Gf256& x) { return std::find(xs.begin(), xs.end(), x) != xs.end(); }

std::optional<Bytes> encoded_epk(const ec::Curve& curve, const std::optional<ec::Point>& epk) {
  if (!epk) return std::nullopt;
  return curve.encode(*epk);
}

using PointList = std::vector<gf2::Point2<Gf256>>;

void require_request_shape(const SignRequest& req) {
  auto bad = [](const char* why) { fail(ErrorCode::kInvalidRequest, why); };
  if (req.t == 0) bad("threshold must be positive");
  if (std::uint64_t{req.r} < std::uint64_t{req.t} + kMinFakeMembers) bad("ring has too few fake members");
  const std::size_t fakes = req.r - req.t;
  if (req.fake_ids.size() != fakes || req.fake_indices.size() != fakes || req.forgeries.size() != fakes) {
    bad("fake member lists do not match r - t");
  }
  if (req.variant_keys ? req.fake_points.size() != fakes : !req.fake_points.empty()) {
    bad("randomizer points do not match ring mode");
  }
  std::unordered_set<std::string> ids;
  for (const auto& id : req.fake_ids) {
    if (id.empty()) bad("empty fake identity");
    if (!ids.insert(id).second) bad("duplicate fake identity");
  }
  for (std::size_t i = 0; i < fakes; ++i) {
    if (req.fake_indices[i].is_zero()) bad("zero fake index");
    for (std::size_t j = i + 1; j < fakes; ++j) {
      if (req.fake_indices[i] == req.fake_indices[j]) bad("duplicate fake index");
    }
  }
}

}  // namespace

Gf256 ring_anchor(const ec::Curve& curve, std::uint32_t t, std::uint32_t r, const std::optional<ec::Point>& epk) {
  auto enc = encoded_epk(curve, epk);
  if (enc) return threshold_anchor(t, r, ByteView(*enc));
  return threshold_anchor(t, r);
}

SignRequest build_request(const cpk::SystemParams& params, ByteView msg, std::uint32_t t, std::uint32_t r,
                          const IdGenerator& ids, Rng& rng, const RequestOptions& options) {
  if (t == 0) fail(ErrorCode::kInvalidArgument, "threshold must be positive");
  if (r < t || r - t < kMinFakeMembers) fail(ErrorCode::kThresholdTooClose, "r - t must be higher than five");
  const auto& curve = params.curve();

  SignRequest req;
  req.msg.assign(msg.begin(), msg.end());
  req.t = t;
  req.r = r;
  req.variant_keys = options.variant_keys;
  req.ephemeral_pk = options.ephemeral_pk;

  const std::size_t fakes = r - t;
  std::unordered_set<std::string> seen;
  while (req.fake_ids.size() < fakes) {
    std::string id = ids(rng);
    if (!id.empty() && seen.insert(id).second) req.fake_ids.push_back(std::move(id));
  }
  while (req.fake_indices.size() < fakes) {
    Gf256 g = Gf256::random_nonzero(rng);
    if (!contains(req.fake_indices, g)) req.fake_indices.push_back(g);
  }
  for (const auto& id : req.fake_ids) {
    ec::Point pk = cpk::derive_public(params, id);
    if (options.variant_keys) {
      ec::Point d = curve.mul_base(curve.random_nonzero(rng));
      pk = curve.add(pk, d);
      req.fake_points.push_back(std::move(d));
    }
    req.forgeries.push_back(elgamal::forge(curve, pk, rng));
  }
  return req;
}

// ---------------------------------------------------------------- PreparedRequest

PreparedRequest::PreparedRequest(const cpk::SystemParams& params, SignRequest request, RequestCheck check)
    : params_(&params), request_(std::move(request)), cipher_(message_key(request_.msg)) {
  require_request_shape(request_);
  const auto& curve = params.curve();
  const std::size_t fakes = request_.fake_ids.size();
  if (check == RequestCheck::kFull) {
    for (std::size_t i = 0; i < fakes; ++i) {
      std::optional<ec::Point> d;
      if (request_.variant_keys) d = request_.fake_points[i];
      if (!elgamal::verify(curve, cpk::effective_public(params, request_.fake_ids[i], d), request_.forgeries[i])) {
        fail(ErrorCode::kInvalidRequest, "forgery does not verify against its identity");
      }
    }
  }
  PointList pts;
  pts.reserve(fakes + 1);
  pts.emplace_back(Gf256::zero(), ring_anchor(curve, request_.t, request_.r, request_.ephemeral_pk));
  for (std::size_t i = 0; i < fakes; ++i) {
    pts.emplace_back(request_.fake_indices[i], cipher_.encrypt(request_.forgeries[i].m));
  }
  f_ = gf2::interpolate(pts);
}

bool PreparedRequest::is_fake_index(const Gf256& gamma) const { return contains(request_.fake_indices, gamma); }

bool PreparedRequest::is_fake_id(std::string_view id) const {
  return std::find(request_.fake_ids.begin(), request_.fake_ids.end(), id) != request_.fake_ids.end();
}

Gf256 PreparedRequest::fresh_index(Rng& rng, std::span<const Gf256> taken) const {
  for (;;) {
    Gf256 g = Gf256::random_nonzero(rng);
    if (!is_fake_index(g) && !contains(taken, g)) return g;
  }
}

// ---------------------------------------------------------------- replies

namespace {

SignFraction sign_point(const PreparedRequest& req, const cpk::IdentityKey& key, const Gf256& gamma, Rng& rng) {
  const auto& curve = req.params().curve();
  Gf256 m = req.cipher().decrypt(gf2::poly_eval(req.polynomial(), gamma));
  return SignFraction{key.id, gamma, elgamal::sign(curve, key.sk, m, rng), key.variant_point};
}

void require_key_fits(const PreparedRequest& req, const cpk::IdentityKey& key) {
  if (req.is_fake_id(key.id)) fail(ErrorCode::kIdCollision, "signer identity is one of the fake members");
  if (key.variant_point.has_value() != req.request().variant_keys) {
    fail(ErrorCode::kInvalidArgument, "key type does not match the ring's key mode");
  }
}

}  // namespace

SignFraction build_reply(const PreparedRequest& request, const cpk::IdentityKey& key, Rng& rng) {
  require_key_fits(request, key);
  return sign_point(request, key, request.fresh_index(rng), rng);
}

SignFraction build_reply(const cpk::SystemParams& params, const SignRequest& request, const cpk::IdentityKey& key,
                         Rng& rng, RequestCheck check) {
  return build_reply(PreparedRequest(params, request, check), key, rng);
}

std::string_view to_string(FractionVerdict v) {
  switch (v) {
    case FractionVerdict::kAccept: return "accept";
    case FractionVerdict::kZeroIndex: return "zero-index";
    case FractionVerdict::kFakeIndex: return "fake-index";
    case FractionVerdict::kFakeId: return "fake-id";
    case FractionVerdict::kModeMismatch: return "mode-mismatch";
    case FractionVerdict::kBadSignature: return "bad-signature";
    case FractionVerdict::kOffPolynomial: return "off-polynomial";
  }
  return "unknown";
}

FractionVerdict check_fraction(const PreparedRequest& request, const SignFraction& fraction) {
  if (fraction.gamma.is_zero()) return FractionVerdict::kZeroIndex;
  if (request.is_fake_index(fraction.gamma)) return FractionVerdict::kFakeIndex;
  if (request.is_fake_id(fraction.replier_id)) return FractionVerdict::kFakeId;
  if (fraction.variant_point.has_value() != request.request().variant_keys) return FractionVerdict::kModeMismatch;
  const auto& params = request.params();
  if (!elgamal::verify(params.curve(), cpk::effective_public(params, fraction.replier_id, fraction.variant_point),
                       fraction.sig)) {
    return FractionVerdict::kBadSignature;
  }
  if (request.cipher().encrypt(fraction.sig.m) != gf2::poly_eval(request.polynomial(), fraction.gamma)) {
    return FractionVerdict::kOffPolynomial;
  }
  return FractionVerdict::kAccept;
}

// ---------------------------------------------------------------- assembly

RingAnnouncement assemble(const PreparedRequest& request, const cpk::IdentityKey& own_key,
                          std::span<const SignFraction> fractions, Rng& rng, AssemblyReport* report) {
  require_key_fits(request, own_key);
  const auto& req = request.request();
  const std::size_t needed = req.t - 1;

  AssemblyReport local;
  AssemblyReport& rep = report ? *report : local;
  rep = AssemblyReport{};

  std::vector<const SignFraction*> taken;
  std::vector<Gf256> taken_gammas;
  std::unordered_set<std::string> taken_ids{own_key.id};
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const auto& fr = fractions[i];
    if (taken.size() == needed) {
      ++rep.spares;
      continue;
    }
    switch (check_fraction(request, fr)) {
      case FractionVerdict::kAccept: break;
      case FractionVerdict::kFakeIndex: rep.discarded.push_back({i, ErrorCode::kGammaCollision}); continue;
      case FractionVerdict::kFakeId: rep.discarded.push_back({i, ErrorCode::kIdCollision}); continue;
      default: rep.discarded.push_back({i, ErrorCode::kInvalidRequest}); continue;
    }
    if (taken_ids.contains(fr.replier_id)) {
      rep.discarded.push_back({i, ErrorCode::kDuplicateReplier});
      continue;
    }
    if (contains(taken_gammas, fr.gamma)) {
      rep.discarded.push_back({i, ErrorCode::kGammaCollision});
      continue;
    }
    taken.push_back(&fr);
    taken_gammas.push_back(fr.gamma);
    taken_ids.insert(fr.replier_id);
  }
  rep.used = taken.size();

  if (taken.size() < needed) {
    for (const auto& d : rep.discarded) {
      if (d.reason == ErrorCode::kGammaCollision || d.reason == ErrorCode::kDuplicateReplier) {
        fail(d.reason, "not enough usable fractions after discarding colliding ones");
      }
    }
    fail(ErrorCode::kInsufficientFractions,
         "need " + std::to_string(needed) + " fractions, have " + std::to_string(taken.size()));
  }

  SignFraction own = sign_point(request, own_key, request.fresh_index(rng, taken_gammas), rng);

  RingAnnouncement ann;
  ann.msg = req.msg;
  ann.t = req.t;
  ann.variant_keys = req.variant_keys;
  ann.ephemeral_pk = req.ephemeral_pk;
  ann.entries.reserve(req.r);
  for (std::size_t i = 0; i < req.fake_ids.size(); ++i) {
    std::optional<ec::Point> d;
    if (req.variant_keys) d = req.fake_points[i];
    ann.entries.push_back(RingEntry{req.fake_ids[i], req.fake_indices[i], req.forgeries[i], std::move(d)});
  }
  for (const auto* fr : taken) ann.entries.push_back(RingEntry{fr->replier_id, fr->gamma, fr->sig, fr->variant_point});
  ann.entries.push_back(RingEntry{own.replier_id, own.gamma, std::move(own.sig), std::move(own.variant_point)});
  std::sort(ann.entries.begin(), ann.entries.end(),
            [](const RingEntry& a, const RingEntry& b) { return a.gamma < b.gamma; });
  return ann;
}

RingAnnouncement assemble(const cpk::SystemParams& params, const SignRequest& request,
                          const cpk::IdentityKey& own_key, std::span<const SignFraction> fractions, Rng& rng,
                          AssemblyReport* report) {
  return assemble(PreparedRequest(params, request, RequestCheck::kStructural), own_key, fractions, rng, report);
}

// ---------------------------------------------------------------- verification

std::string_view to_string(RingVerdict v) {
  switch (v) {
    case RingVerdict::kAccept: return "accept";
    case RingVerdict::kMalformed: return "malformed";
    case RingVerdict::kSignature: return "signature";
    case RingVerdict::kPolynomial: return "polynomial";
  }
  return "unknown";
}

RingVerdict verify_ring_with_subset(const cpk::SystemParams& params, const RingAnnouncement& ann,
                                    std::span<const std::size_t> subset) {
  const std::uint32_t r = ann.r();
  const std::uint32_t t = ann.t;
  if (t == 0 || std::uint64_t{r} < std::uint64_t{t} + kMinFakeMembers) return RingVerdict::kMalformed;
  const std::size_t degree = r - t;
  if (subset.size() != degree) fail(ErrorCode::kInvalidArgument, "subset must hold r - t entry positions");
  std::vector<bool> in_subset(r, false);
  for (auto idx : subset) {
    if (idx >= r || in_subset[idx]) fail(ErrorCode::kInvalidArgument, "subset positions must be distinct and in range");
    in_subset[idx] = true;
  }

  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < r; ++i) {
    const auto& e = ann.entries[i];
    if (e.id.empty() || !ids.insert(e.id).second) return RingVerdict::kMalformed;
    if (e.gamma.is_zero()) return RingVerdict::kMalformed;
    if (e.variant_point.has_value() != ann.variant_keys) return RingVerdict::kMalformed;
    for (std::size_t j = i + 1; j < r; ++j) {
      if (e.gamma == ann.entries[j].gamma) return RingVerdict::kMalformed;
    }
  }

  const auto& curve = params.curve();
  for (const auto& e : ann.entries) {
    if (!elgamal::verify(curve, cpk::effective_public(params, e.id, e.variant_point), e.sig)) {
      return RingVerdict::kSignature;
    }
  }

  BlockPermutation cipher(message_key(ann.msg));
  PointList pts;
  pts.reserve(degree + 1);
  pts.emplace_back(Gf256::zero(), ring_anchor(curve, t, r, ann.ephemeral_pk));
  for (auto idx : subset) pts.emplace_back(ann.entries[idx].gamma, cipher.encrypt(ann.entries[idx].sig.m));
  auto f = gf2::interpolate(pts);
  if (f.degree() != static_cast<int>(degree)) return RingVerdict::kPolynomial;
  for (std::size_t i = 0; i < r; ++i) {
    if (in_subset[i]) continue;
    const auto& e = ann.entries[i];
    if (gf2::poly_eval(f, e.gamma) != cipher.encrypt(e.sig.m)) return RingVerdict::kPolynomial;
  }
  return RingVerdict::kAccept;
}

RingVerdict verify_ring(const cpk::SystemParams& params, const RingAnnouncement& ann) {
  if (ann.t == 0 || std::uint64_t{ann.r()} < std::uint64_t{ann.t} + kMinFakeMembers) return RingVerdict::kMalformed;
  std::vector<std::size_t> subset(ann.r() - ann.t);
  std::iota(subset.begin(), subset.end(), std::size_t{0});
  return verify_ring_with_subset(params, ann, subset);
}

RingVerdict verify_ring(const cpk::SystemParams& params, const RingAnnouncement& ann, Rng& rng) {
  if (ann.t == 0 || std::uint64_t{ann.r()} < std::uint64_t{ann.t} + kMinFakeMembers) return RingVerdict::kMalformed;
  std::vector<std::size_t> all(ann.r());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(ann.r() - ann.t);
  return verify_ring_with_subset(params, ann, all);
}

}  // namespace vanetagg::itrs
