#include "vanetagg/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "vanetagg/error.hpp"
#include "vanetagg/itrs.hpp"
#include "vanetagg/sim/sweep.hpp"

namespace vanetagg::bench {

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double time_ms(F&& f) {
  const auto start = Clock::now();
  f();
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Stat summarize(std::vector<double> xs) {
  Stat s;
  if (xs.empty()) return s;
  double sum = 0;
  for (double x : xs) sum += x;
  s.mean_ms = sum / xs.size();
  double var = 0;
  for (double x : xs) var += (x - s.mean_ms) * (x - s.mean_ms);
  s.stddev_ms = xs.size() > 1 ? std::sqrt(var / (xs.size() - 1)) : 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t mid = xs.size() / 2;
  s.median_ms = xs.size() % 2 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
  s.min_ms = xs.front();
  return s;
}

struct Samples {
  std::uint32_t t;
  std::uint32_t r;
  std::vector<double> request, reply, reply_checked, validate, finalize, verify;
};

void one_round(const cpk::KeySetup& keys, Samples& s, std::size_t verify_repeats, Rng& rng, bool record) {
  const auto& params = keys.params;
  Bytes msg(32);
  rng.fill(msg);
  std::vector<cpk::IdentityKey> signers;
  for (std::uint32_t i = 0; i < s.t; ++i) signers.push_back(cpk::derive_private(keys.master, cpk::random_plate(rng)));

  itrs::SignRequest request;
  const double req_ms =
      time_ms([&] { request = itrs::build_request(params, msg, s.t, s.r, cpk::random_plate, rng); });

  std::vector<itrs::SignFraction> fractions;
  double reply_ms = 0;
  double checked_ms = 0;
  double validate_ms = 0;
  for (std::uint32_t i = 1; i < s.t; ++i) {
    if (i == 1) {
      checked_ms = time_ms([&] { (void)itrs::build_reply(params, request, signers[i], rng); });
      reply_ms = time_ms([&] {
        fractions.push_back(itrs::build_reply(params, request, signers[i], rng, itrs::RequestCheck::kStructural));
      });
    } else {
      fractions.push_back(itrs::build_reply(params, request, signers[i], rng, itrs::RequestCheck::kStructural));
    }
  }

  const itrs::PreparedRequest prepared(params, request, itrs::RequestCheck::kStructural);
  if (!fractions.empty()) {
    validate_ms = time_ms([&] {
      if (!itrs::validate_fraction(prepared, fractions.front())) fail(ErrorCode::kCryptoFailure, "bench fraction");
    });
  }

  itrs::RingAnnouncement ann;
  const double finalize_ms = time_ms([&] {
    ann = itrs::assemble(prepared, signers[0], fractions, rng);
    if (itrs::verify_ring(params, ann) != itrs::RingVerdict::kAccept) fail(ErrorCode::kCryptoFailure, "bench ring");
  });
  std::vector<double> verify_runs;
  for (std::size_t i = 0; i < verify_repeats; ++i) {
    itrs::RingVerdict verdict{};
    verify_runs.push_back(time_ms([&] { verdict = itrs::verify_ring(params, ann); }));
    if (verdict != itrs::RingVerdict::kAccept) fail(ErrorCode::kCryptoFailure, "bench ring rejected");
  }
  const double verify_ms = summarize(verify_runs).median_ms;

  if (!record) return;
  s.request.push_back(req_ms);
  if (s.t > 1) {
    s.reply.push_back(reply_ms);
    s.reply_checked.push_back(checked_ms);
    s.validate.push_back(validate_ms);
  }
  s.finalize.push_back(finalize_ms);
  s.verify.push_back(verify_ms);
}

}  // namespace

std::vector<PhaseTimings> run(const cpk::KeySetup& keys, const BenchConfig& config) {
  std::vector<Samples> cells;
  for (auto r : config.ring_sizes) {
    for (auto t : config.thresholds) {
      if (t >= 1 && r >= t && r - t >= itrs::kMinFakeMembers) cells.push_back(Samples{t, r, {}, {}, {}, {}, {}, {}});
    }
  }
  Rng rng(config.seed);
  for (std::size_t rep = 0; rep < config.warmup + config.repetitions; ++rep) {
    for (auto& cell : cells) one_round(keys, cell, std::max<std::size_t>(1, config.verify_repeats), rng, rep >= config.warmup);
  }
  std::vector<PhaseTimings> out;
  for (auto& c : cells) {
    PhaseTimings p;
    p.t = c.t;
    p.r = c.r;
    p.repetitions = config.repetitions;
    p.request = summarize(c.request);
    p.reply = summarize(c.reply);
    p.reply_checked = summarize(c.reply_checked);
    p.validate = summarize(c.validate);
    p.finalize = summarize(c.finalize);
    p.verify = summarize(c.verify);
    out.push_back(p);
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<PhaseTimings>& cells) {
  out << "ring_size,threshold,repetitions,phase,mean_ms,stddev_ms,median_ms,min_ms\n";
  for (const auto& c : cells) {
    const std::pair<const char*, const Stat*> phases[] = {
        {"aggregation_request", &c.request}, {"request_reply", &c.reply},
        {"request_reply_checked", &c.reply_checked}, {"fraction_validate", &c.validate},
        {"announcement_generate", &c.finalize}, {"announcement_verify", &c.verify},
    };
    for (const auto& [name, st] : phases) {
      out << c.r << ',' << c.t << ',' << c.repetitions << ',' << name << ',' << st->mean_ms << ',' << st->stddev_ms
          << ',' << st->median_ms << ',' << st->min_ms << '\n';
    }
  }
}

sim::CostModel fit_costs(const std::vector<PhaseTimings>& cells) {
  if (cells.size() < 2) fail(ErrorCode::kInvalidArgument, "fit_costs needs two or more cells");
  std::vector<double> fakes, members, request, checked, finalize;
  double validate = 0;
  std::size_t with_replies = 0;
  for (const auto& c : cells) {
    if (c.t > 1) {
      validate += c.validate.median_ms / 1e3;
      ++with_replies;
    }
  }
  sim::CostModel m;
  if (with_replies) m.validate_base = validate / with_replies;
  for (const auto& c : cells) {
    fakes.push_back(c.r - c.t);
    members.push_back(c.r);
    request.push_back(c.request.median_ms / 1e3);
    checked.push_back(c.reply_checked.median_ms / 1e3);
    finalize.push_back(c.finalize.median_ms / 1e3 - m.validate_base * (c.t - 1));
  }
  auto req = sim::linear_fit(fakes, request);
  auto rep = sim::linear_fit(fakes, checked);
  auto fin = sim::linear_fit(members, finalize);
  m.request_base = std::max(0.0, req.intercept);
  m.request_per_fake = req.slope;
  m.reply_base = std::max(0.0, rep.intercept);
  m.reply_per_fake = rep.slope;
  m.finalize_base = std::max(0.0, fin.intercept);
  m.finalize_per_member = fin.slope;
  return m;
}

}  // namespace vanetagg::bench
