#include "vanetagg/sim/engine.hpp"

#include <charconv>
#include <deque>
#include <memory>
#include <optional>
#include <set>

#include "vanetagg/cpk.hpp"
#include "vanetagg/elgamal.hpp"
#include "vanetagg/protocol.hpp"
#include "vanetagg/sim/event_queue.hpp"
#include "vanetagg/sim/mobility.hpp"
#include "vanetagg/sim/random.hpp"

namespace vanetagg::sim {

namespace {

namespace proto = vanetagg::protocol;

// Stream labels.
constexpr std::uint64_t kVehicle = 1;
constexpr std::uint64_t kWorld = 2;

constexpr std::size_t kPlateBytes = 8;  // "ABC-1234"

// Per-vehicle radio draws, taken up front so that the sequence does not
// depend on which branches a run takes.
struct RadioDraws {
  bool request_lost;
  double request_jitter;
  double backoff;
  bool reply_lost;
  double reply_jitter;
};

// Live crypto for CryptoMode::kReal.
struct RealCrypto {
  cpk::KeySetup keys;
  std::vector<std::string> plates;
  Rng rng;

  static cpk::KeySetup master_for(std::uint64_t seed) {
    Rng r = Rng(seed).fork("sim/master");
    return cpk::setup(cpk::kDigestBits, r);
  }

  RealCrypto(const SimScenario& s, std::size_t vehicles)
      : keys(master_for(s.seed)), rng(Rng(s.seed).fork("sim/crypto")) {
    Rng ids = Rng(s.seed).fork("sim/plates");
    std::set<std::string> seen;
    while (plates.size() < vehicles) {
      auto p = cpk::random_plate(ids);
      if (seen.insert(p).second) plates.push_back(std::move(p));
    }
  }

  cpk::IdentityKey key(std::size_t vehicle, bool variant) {
    return variant ? cpk::derive_private_v2(keys.master, plates[vehicle], rng)
                   : cpk::derive_private(keys.master, plates[vehicle]);
  }
};

// Validation or finalization on the initiator's single CPU.
struct CpuJob {
  double cost;
  int prev_job;  // job this one queued behind, or -1
  int reply;     // reply that started it on an idle CPU, or -1
};

struct ReplyInFlight {
  std::size_t vehicle;
  double build_cost;
  std::optional<proto::ReplyPacket> packet;
};

proto::EventType event_type_from(std::uint64_t v) { return static_cast<proto::EventType>(1 + v % 5); }
proto::Direction direction_from(std::uint64_t v) { return static_cast<proto::Direction>(1 + v % 5); }

std::size_t event_bytes(std::size_t road_name_bytes) { return 8 + 8 + 1 + 1 + 2 + road_name_bytes + 8; }

}  // namespace

WireSizes wire_sizes(const SimScenario& s, std::size_t road_name_bytes) {
  const auto& curve = ec::Curve::p256();
  const std::size_t point = curve.point_bytes();
  const std::size_t header = 4 + 1 + 1;
  const std::size_t member = 2 + kPlateBytes + gf2::Gf256::kBytes + elgamal::encoded_size(curve) +
                             (s.variant_keys ? point : 0);
  const std::size_t ring_head = header + 4 + event_bytes(road_name_bytes) + 4 + 4 + (s.encrypt_replies ? point : 0);
  const std::size_t fraction = header + member;
  WireSizes w;
  w.request = 1 + ring_head + (s.r - s.t) * member;
  w.reply = 1 + (s.encrypt_replies ? header + point + 4 + fraction + 32 : fraction);
  w.aggregation = 1 + ring_head + s.r * member;
  return w;
}

SimMetrics run_scenario(const SimScenario& s) {
  validate(s);
  SimMetrics m;
  const ManhattanGrid grid(s.area_width, s.area_height, s.grid_blocks);
  const double mean_speed = s.mean_speed_kmh / 3.6;
  const double horizon = s.duration + s.session_timeout + 1;

  std::vector<Trajectory> paths;
  std::vector<bool> honest;
  std::vector<RadioDraws> radio;
  paths.reserve(s.vehicle_count);
  for (std::uint32_t i = 0; i < s.vehicle_count; ++i) {
    // Fixed-count draws first so the mobility draws that follow cannot shift them.
    Stream own{s.seed, kVehicle, i};
    honest.push_back(own.chance(s.honest_fraction));
    RadioDraws d;
    d.request_lost = own.chance(s.loss_rate);
    d.request_jitter = own.uniform(0, s.latency_jitter);
    d.backoff = own.uniform(0, s.reply_backoff);
    d.reply_lost = own.chance(s.loss_rate);
    d.reply_jitter = own.uniform(0, s.latency_jitter);
    radio.push_back(d);
    const double speed = mean_speed * own.uniform(0.8, 1.2);
    paths.push_back(random_trajectory(grid, speed, horizon, own));
  }

  // The event.
  Stream world{s.seed, kWorld};
  const RoadPoint spot = grid.random_point(world);
  const double event_time = world.uniform(0.1, 0.5) * s.duration;
  proto::EventDescription event{spot.pos.x,
                                spot.pos.y,
                                event_type_from(world.next()),
                                direction_from(world.next()),
                                ManhattanGrid::road_name(spot.axis, spot.line),
                                event_time};
  m.event_time = event_time;

  // Nearest vehicle within the detection radius, else the first to arrive.
  std::optional<std::size_t> initiator;
  double detect_time = event_time;
  double best = kNever;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const double d = distance(paths[i].at(event_time), spot.pos);
    if (d <= s.detection_radius && d < best) {
      best = d;
      initiator = i;
    }
  }
  if (!initiator) {
    detect_time = kNever;
    for (std::size_t i = 0; i < paths.size(); ++i) {
      const double at = paths[i].first_within(spot.pos, s.detection_radius, event_time, s.duration);
      if (at < detect_time) {
        detect_time = at;
        initiator = i;
      }
    }
  }
  if (!initiator) return m;
  m.initiated = true;
  const std::size_t init = *initiator;
  const Trajectory& init_path = paths[init];

  std::unique_ptr<RealCrypto> real;
  std::optional<proto::AggregationSession> session;
  WireSizes sizes = wire_sizes(s, event.road_name.size());
  const auto& curve = ec::Curve::p256();

  const double sent = detect_time + s.costs.request(s.t, s.r);
  const double deadline = sent + s.session_timeout;
  m.request_sent = sent;

  if (s.crypto_mode == CryptoMode::kReal) {
    real = std::make_unique<RealCrypto>(s, paths.size());
    proto::SessionConfig config{s.session_timeout, s.encrypt_replies, s.variant_keys};
    session.emplace(proto::initiate(real->keys.params, real->key(init, s.variant_keys), event, s.t, s.r, sent,
                                    config, real->rng));
    sizes.request = proto::encode_packet(curve, session->request()).size();
  }

  auto hop_latency = [&](std::size_t bytes, double jitter) {
    return s.base_latency + 8.0 * static_cast<double>(bytes) / s.bitrate_bps + jitter;
  };

  EventQueue queue;
  std::vector<ReplyInFlight> replies;
  std::vector<CpuJob> jobs;
  std::deque<int> pending;  // replies waiting for the CPU
  std::optional<int> running;
  std::uint32_t accepted = 0;
  bool closed = false;
  std::optional<int> finalize_job;
  double medium_free = 0;

  auto finish = [&](double now, bool ok, bool timed_out) {
    closed = true;
    queue.clear();
    m.success = ok;
    m.timed_out = timed_out;
    m.aggregation_delay = ok ? now - sent : s.session_timeout;
    if (!ok) return;
    double crypto = 0;
    int j = *finalize_job;
    for (;;) {
      crypto += jobs[j].cost;
      if (jobs[j].prev_job >= 0) {
        j = jobs[j].prev_job;
        continue;
      }
      if (jobs[j].reply >= 0) crypto += replies[jobs[j].reply].build_cost;
      break;
    }
    m.crypto_time = crypto;
    m.non_crypto_delay = std::max(0.0, m.aggregation_delay - crypto);
  };

  auto start_finalize = [&](double now, int after) {
    finalize_job = static_cast<int>(jobs.size());
    jobs.push_back(CpuJob{s.costs.finalize(s.t, s.r), after, -1});
    running = *finalize_job;
    pending.clear();
    queue.schedule(now + jobs.back().cost, [&](double done) {
      const bool in_time = done <= deadline;
      bool ok = in_time;
      if (ok && real) {
        try {
          auto packet = session->finalize(real->rng);
          ok = proto::verify_announcement(real->keys.params, packet, done) == proto::AnnouncementVerdict::kAccept;
        } catch (const Error&) {
          ok = false;
        }
      }
      finish(done, ok, !in_time);
    });
  };

  std::function<void(double, int)> start_validation = [&](double now, int after) {
    const int reply = pending.front();
    pending.pop_front();
    const int id = static_cast<int>(jobs.size());
    jobs.push_back(CpuJob{s.costs.validate(), after, after < 0 ? reply : -1});
    running = id;
    queue.schedule(now + jobs.back().cost, [&, id, reply](double done) {
      running.reset();
      bool ok = true;
      if (real) {
        ok = session->handle_reply(*replies[reply].packet, done) == proto::ReplyOutcome::kAccepted;
      }
      if (ok) {
        ++accepted;
        m.replies_accepted = accepted;
      }
      if (accepted + 1 >= s.t) {
        start_finalize(done, id);
      } else if (!pending.empty()) {
        start_validation(done, id);
      }
    });
  };

  // A finalization still running at the deadline settles the outcome itself.
  queue.schedule(deadline, [&](double now) {
    if (!closed && !finalize_job) finish(now, false, true);
  });

  if (s.t <= 1) {
    queue.schedule(sent, [&](double now) { start_finalize(now, -1); });
  }

  // One broadcast of the Request Packet; receivers are fixed at send time.
  const Vec2 origin = init_path.at(sent);
  for (std::size_t j = 0; j < paths.size(); ++j) {
    if (j == init || radio[j].request_lost) continue;
    if (distance(paths[j].at(sent), origin) > s.comm_range) continue;
    const double arrive = sent + hop_latency(sizes.request, radio[j].request_jitter);
    queue.schedule(arrive, [&, j](double now) {
      if (!honest[j] || distance(paths[j].at(now), spot.pos) > s.detection_radius) return;
      ++m.willing_receivers;

      // Algorithm 1 over this vehicle's pending requests (just this one).
      proto::ReplierState state;
      proto::RequestPacket stub;
      const proto::RequestPacket* request = &stub;
      if (real) {
        request = &session->request();
      } else {
        stub.event = event;
        stub.omega.t = s.t;
        stub.omega.r = s.r;
      }
      const proto::ReceivedRequest received{now, request};
      if (proto::reply_policy(state, std::span(&received, 1)).front() != proto::ReplyDecision::kReply) return;

      ReplyInFlight flight{j, s.costs.reply(s.t, s.r), std::nullopt};
      std::size_t reply_bytes = sizes.reply;
      if (real) {
        try {
          proto::Replier replier(real->keys.params, real->key(j, s.variant_keys));
          flight.packet = replier.build(*request, real->rng);
        } catch (const Error&) {
          return;
        }
        reply_bytes = proto::encode_packet(curve, *flight.packet).size();
      }
      const int reply = static_cast<int>(replies.size());
      replies.push_back(std::move(flight));

      // Replies share the medium around the initiator: in order of
      // readiness, each waits its backoff once the medium is free, then
      // holds it for its transmission time.
      queue.schedule(now + replies.back().build_cost, [&, j, reply, reply_bytes](double ready) {
        const double airtime = 8.0 * static_cast<double>(reply_bytes) / s.bitrate_bps;
        const double start = std::max(ready, medium_free) + radio[j].backoff;
        medium_free = start + airtime;
        queue.schedule(start, [&, j, reply, airtime](double at) {
          if (radio[j].reply_lost || distance(paths[j].at(at), init_path.at(at)) > s.comm_range) return;
          queue.schedule(at + airtime + s.base_latency + radio[j].reply_jitter, [&, reply](double arrived) {
            if (closed || finalize_job) return;
            ++m.replies_received;
            pending.push_back(reply);
            if (!running) start_validation(arrived, -1);
          });
        });
      });
    });
  }

  queue.run_until_empty();
  if (!closed) finish(deadline, false, true);
  return m;
}

namespace {

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

std::string metrics_csv_header() {
  return "initiated,success,timed_out,event_time,request_sent,aggregation_delay,crypto_time,non_crypto_delay,"
         "willing_receivers,replies_received,replies_accepted";
}

std::string metrics_csv_row(const SimMetrics& m) {
  return std::to_string(m.initiated) + "," + std::to_string(m.success) + "," + std::to_string(m.timed_out) + "," +
         num(m.event_time) + "," + num(m.request_sent) + "," + num(m.aggregation_delay) + "," + num(m.crypto_time) +
         "," + num(m.non_crypto_delay) + "," + std::to_string(m.willing_receivers) + "," +
         std::to_string(m.replies_received) + "," + std::to_string(m.replies_accepted);
}

}  // namespace vanetagg::sim
