// vanetagg: key ceremonies, end-to-end demos, benchmarks, anonymity tables
// and simulation sweeps. Data goes to stdout or --out files, diagnostics to
// stderr; the exit code is 0 only on success.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "manifest.hpp"
#include "vanetagg/bench.hpp"
#include "vanetagg/cpk.hpp"
#include "vanetagg/error.hpp"
#include "vanetagg/protocol.hpp"
#include "vanetagg/sim/anonymity.hpp"
#include "vanetagg/sim/engine.hpp"
#include "vanetagg/sim/sweep.hpp"

#ifndef VANETAGG_VERSION
#define VANETAGG_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace vanetagg;

namespace {

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

void check_writable(const std::string& path, bool force) {
  if (!force && fs::exists(path)) fail(ErrorCode::kIoError, path + " exists (use --force to overwrite)");
}

void write_file(const std::string& path, ByteView data, bool force) {
  check_writable(path, force);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) fail(ErrorCode::kIoError, "short write to " + path);
}

void write_text(const std::string& path, const std::string& text, bool force) { write_file(path, as_bytes(text), force); }

// Writes to `path`, or to stdout when path is empty or "-".
void emit(const std::string& path, const std::string& text, bool force) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text(path, text, force);
  }
}

void write_manifest(cli::RunManifest m, bool force) {
  m.tool_version = VANETAGG_VERSION;
  std::erase_if(m.outputs, [](const std::string& p) { return p.empty() || p == "-"; });
  if (m.outputs.empty()) return;
  write_text(cli::manifest_path(m), m.to_json().dump(2) + "\n", force);
}

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

ec::CurveId parse_curve(const std::string& name) {
  if (name == "p256") return ec::CurveId::kP256;
  if (name == "toy97") return ec::CurveId::kToy97;
  fail(ErrorCode::kConfigError, "unknown curve '" + name + "' (p256 or toy97)");
}

// Common flags.
struct Common {
  std::string params;
  std::string out;
  std::uint64_t seed = 1;
  bool force = false;
};

// ---------------------------------------------------------------- keygen

struct KeygenOpts : Common {
  std::size_t n = cpk::kDigestBits;
  std::string curve = "p256";
  std::string master_out;
  bool seeded = false;
};

int cmd_keygen(const KeygenOpts& o) {
  check_writable(o.out, o.force);
  if (!o.master_out.empty()) check_writable(o.master_out, o.force);
  Rng rng = o.seeded ? Rng(o.seed) : Rng::from_entropy();
  cpk::KeySetup keys = cpk::setup(o.n, rng, parse_curve(o.curve));
  write_file(o.out, cpk::encode_params(keys.params), o.force);
  if (!o.master_out.empty()) write_file(o.master_out, cpk::export_master_secret(keys.master), o.force);

  cli::RunManifest m;
  m.command = "keygen";
  if (o.seeded) m.seed = o.seed;
  m.config = {{"n", o.n}, {"curve", o.curve}, {"seeded", o.seeded}};
  if (!o.seeded) m.config["note"] = "seeded from OS entropy; outputs are not reproducible";
  m.outputs = {o.out, o.master_out};
  write_manifest(m, o.force);
  std::cerr << "wrote " << o.out << (o.master_out.empty() ? "" : " and " + o.master_out) << "\n";
  return 0;
}

// ---------------------------------------------------------------- roundtrip

struct RoundtripOpts : Common {
  std::string master;
  std::string msg = "Main St";
  std::uint32_t t = 3;
  std::uint32_t r = 20;
  std::uint32_t repliers = 5;
  double time = 0;
  bool variant_keys = false;
  bool encrypt = false;
};

cpk::IdentityKey issue_key(const cpk::MasterKeyMaterial& master, const std::string& id, bool variant, Rng& rng) {
  return variant ? cpk::derive_private_v2(master, id, rng) : cpk::derive_private(master, id);
}

int cmd_roundtrip(const RoundtripOpts& o) {
  if (!o.out.empty()) check_writable(o.out, o.force);
  const cpk::SystemParams params = cpk::decode_params(read_file(o.params));
  const cpk::MasterKeyMaterial master = cpk::import_master_secret(read_file(o.master));
  if (master.curve_id != params.curve_id || master.x.size() != params.n) {
    fail(ErrorCode::kConfigError, "master secret does not match the parameters");
  }
  const auto& curve = params.curve();
  Rng rng(o.seed);

  protocol::EventDescription event{0, 0, protocol::EventType::kJam, protocol::Direction::kBoth, o.msg, o.time};
  protocol::SessionConfig config{120.0, o.encrypt, o.variant_keys};
  const auto own = issue_key(master, cpk::random_plate(rng), o.variant_keys, rng);

  auto start = std::chrono::steady_clock::now();
  auto session = protocol::initiate(params, own, event, o.t, o.r, o.time, config, rng);
  const double request_ms = ms_since(start);
  const Bytes request_wire = protocol::encode_packet(curve, session.request());

  double reply_ms = 0;
  std::size_t reply_bytes = 0;
  for (std::uint32_t i = 0; i < o.repliers; ++i) {
    protocol::Replier replier(params, issue_key(master, cpk::random_plate(rng), o.variant_keys, rng));
    auto received = std::get<protocol::RequestPacket>(protocol::decode_packet(curve, request_wire));
    start = std::chrono::steady_clock::now();
    auto reply = replier.build(received, rng);
    reply_ms += ms_since(start);
    const Bytes wire = protocol::encode_packet(curve, reply);
    reply_bytes = wire.size();
    auto outcome = session.handle_reply(std::get<protocol::ReplyPacket>(protocol::decode_packet(curve, wire)), o.time);
    if (outcome != protocol::ReplyOutcome::kAccepted) std::cerr << "reply " << i << " " << to_string(outcome) << "\n";
  }

  start = std::chrono::steady_clock::now();
  const auto packet = session.finalize(rng);
  const double generate_ms = ms_since(start);
  const Bytes wire = protocol::encode_packet(curve, packet);

  start = std::chrono::steady_clock::now();
  const auto verdict = protocol::verify_announcement(params, packet, o.time);
  const double verify_ms = ms_since(start);

  if (!o.out.empty()) write_file(o.out, wire, o.force);
  std::cout << "verdict: " << to_string(verdict) << "\n"
            << "t: " << o.t << "\nr: " << o.r << "\nreplies_accepted: " << session.accepted().size() << "\n"
            << "request_bytes: " << request_wire.size() << "\nreply_bytes: " << reply_bytes
            << "\nannouncement_bytes: " << wire.size() << "\n"
            << "aggregation_request_ms: " << request_ms << "\n"
            << "request_reply_ms: " << (o.repliers ? reply_ms / o.repliers : 0.0) << "\n"
            << "announcement_generate_ms: " << generate_ms << "\n"
            << "announcement_verify_ms: " << verify_ms << "\n";

  cli::RunManifest m;
  m.command = "roundtrip";
  m.seed = o.seed;
  m.config = {{"params", o.params}, {"master", o.master},        {"msg", o.msg},
              {"t", o.t},           {"r", o.r},                  {"repliers", o.repliers},
              {"time", o.time},     {"variant_keys", o.variant_keys}, {"encrypt_replies", o.encrypt}};
  m.outputs = {o.out};
  write_manifest(m, o.force);
  return verdict == protocol::AnnouncementVerdict::kAccept ? 0 : 1;
}

// ---------------------------------------------------------------- verify

struct VerifyOpts : Common {
  std::string in;
  double now = 0;
  double window = protocol::kDefaultReplayWindow;
};

int cmd_verify(const VerifyOpts& o) {
  const cpk::SystemParams params = cpk::decode_params(read_file(o.params));
  const auto packet = protocol::decode_packet(params.curve(), read_file(o.in));
  const auto* agg = std::get_if<protocol::AggregationPacket>(&packet);
  if (agg == nullptr) fail(ErrorCode::kMalformedPacket, o.in + " is not an aggregation packet");
  const auto verdict = protocol::verify_announcement(params, *agg, o.now, o.window);
  const auto ring = itrs::verify_ring(params, agg->announcement);
  std::cout << "verdict: " << to_string(verdict) << "\nring: " << to_string(ring)
            << "\nt: " << agg->announcement.t << "\nr: " << agg->announcement.r() << "\n";
  return verdict == protocol::AnnouncementVerdict::kAccept ? 0 : 1;
}

// ---------------------------------------------------------------- bench

struct BenchOpts : Common {
  std::string master;
  std::string t = "2..10";
  std::string r = "20";
  std::size_t reps = 30;
  bool fit_costs = false;
};

int cmd_bench(const BenchOpts& o) {
  if (!o.out.empty() && o.out != "-") check_writable(o.out, o.force);
  cpk::KeySetup keys;
  if (!o.params.empty() || !o.master.empty()) {
    if (o.params.empty() || o.master.empty()) fail(ErrorCode::kConfigError, "--params and --master go together");
    keys.params = cpk::decode_params(read_file(o.params));
    keys.master = cpk::import_master_secret(read_file(o.master));
  } else {
    keys = cpk::setup(cpk::kDigestBits, o.seed);
  }
  bench::BenchConfig config;
  config.thresholds = sim::parse_count_list(o.t);
  config.ring_sizes = sim::parse_count_list(o.r);
  config.repetitions = o.reps;
  config.seed = o.seed;
  const auto cells = bench::run(keys, config);
  std::ostringstream csv;
  bench::write_csv(csv, cells);
  emit(o.out, csv.str(), o.force);
  if (o.fit_costs) {
    const auto c = bench::fit_costs(cells);
    std::cerr << "# fitted cost model, seconds\n"
              << "cost.request_base = " << c.request_base << "\ncost.request_per_fake = " << c.request_per_fake
              << "\ncost.reply_base = " << c.reply_base << "\ncost.reply_per_fake = " << c.reply_per_fake
              << "\ncost.validate_base = " << c.validate_base << "\ncost.finalize_base = " << c.finalize_base
              << "\ncost.finalize_per_member = " << c.finalize_per_member << "\n";
  }
  cli::RunManifest m;
  m.command = "bench";
  m.seed = o.seed;
  m.config = {{"t", o.t}, {"r", o.r}, {"reps", o.reps}, {"params", o.params}, {"master", o.master},
              {"note", "timings are wall-clock measurements and vary between runs"}};
  m.outputs = {o.out};
  write_manifest(m, o.force);
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts : Common {
  std::string config;
  std::string format = "csv";
  std::string runs_out;
  std::optional<std::string> t;
  std::optional<std::string> r;
  std::optional<std::string> vehicles;
  std::optional<std::uint32_t> runs;
  std::optional<std::string> crypto_mode;
  bool seed_given = false;
};

int cmd_simulate(const SimulateOpts& o) {
  if (!o.out.empty() && o.out != "-") check_writable(o.out, o.force);
  if (!o.runs_out.empty()) check_writable(o.runs_out, o.force);
  sim::SweepSpec spec = o.config.empty() ? sim::SweepSpec{} : sim::load_sweep(o.config);
  if (o.seed_given) spec.base.seed = o.seed;
  if (o.t) spec.thresholds = sim::parse_count_list(*o.t);
  if (o.r) spec.ring_sizes = sim::parse_count_list(*o.r);
  if (o.vehicles) spec.vehicle_counts = sim::parse_count_list(*o.vehicles);
  if (o.runs) spec.runs = *o.runs;
  if (o.crypto_mode) {
    if (*o.crypto_mode == "real") {
      spec.base.crypto_mode = sim::CryptoMode::kReal;
    } else if (*o.crypto_mode == "modeled") {
      spec.base.crypto_mode = sim::CryptoMode::kModeled;
    } else {
      fail(ErrorCode::kConfigError, "--crypto-mode must be modeled or real");
    }
  }
  // Round-trip through the parser so overrides are validated like the file.
  spec = sim::parse_sweep(sim::format_sweep(spec));

  std::ostringstream per_run;
  sim::RunCallback on_run;
  if (!o.runs_out.empty()) {
    per_run << "vehicle_count,ring_size,threshold,run," << sim::metrics_csv_header() << "\n";
    on_run = [&](const sim::CellSummary& c, std::uint32_t i, const sim::SimMetrics& m) {
      per_run << c.vehicle_count << ',' << c.r << ',' << c.t << ',' << i << ',' << sim::metrics_csv_row(m) << '\n';
    };
  }
  const auto cells = sim::sweep(spec, on_run);
  std::ostringstream out;
  if (o.format == "csv") {
    sim::write_csv(out, cells);
  } else if (o.format == "jsonl") {
    sim::write_jsonl(out, cells);
  } else {
    fail(ErrorCode::kConfigError, "--format must be csv or jsonl");
  }
  emit(o.out, out.str(), o.force);
  if (!o.runs_out.empty()) write_text(o.runs_out, per_run.str(), o.force);

  cli::RunManifest m;
  m.command = "simulate";
  m.seed = spec.base.seed;
  m.config = {{"scenario", sim::format_sweep(spec)}, {"format", o.format}, {"source", o.config}};
  m.outputs = {o.out, o.runs_out};
  write_manifest(m, o.force);
  return 0;
}

// ---------------------------------------------------------------- anonymity

struct AnonymityOpts : Common {
  std::string t = "2..5";
  std::string r = "20";
  std::optional<std::string> j;
};

int cmd_anonymity(const AnonymityOpts& o) {
  if (!o.out.empty() && o.out != "-") check_writable(o.out, o.force);
  std::ostringstream csv;
  csv.precision(15);
  csv << "ring_size,threshold,at_least_j,probability,exact\n";
  for (auto r : sim::parse_count_list(o.r)) {
    for (auto t : sim::parse_count_list(o.t)) {
      if (t > r) continue;
      std::vector<std::uint32_t> js;
      if (o.j) {
        js = sim::parse_count_list(*o.j);
      } else {
        for (std::uint32_t j = 1; j <= t; ++j) js.push_back(j);
      }
      for (auto j : js) {
        if (j > t) continue;
        csv << r << ',' << t << ',' << j << ',' << sim::anonymity_prob(t, r, j) << ',';
        try {
          const auto f = sim::anonymity_prob_exact(t, r, j);
          csv << f.num << '/' << f.den;
        } catch (const Error&) {
          // Too large for an exact 64-bit fraction.
        }
        csv << '\n';
      }
    }
  }
  emit(o.out, csv.str(), o.force);
  cli::RunManifest m;
  m.command = "anonymity";
  m.config = {{"t", o.t}, {"r", o.r}, {"j", o.j.value_or("1..t")}};
  m.outputs = {o.out};
  write_manifest(m, o.force);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-preserving vehicular announcement aggregation"};
  app.set_version_flag("--version", VANETAGG_VERSION);
  app.require_subcommand(1);

  KeygenOpts keygen;
  auto* kg = app.add_subcommand("keygen", "Generate system parameters and the master secret");
  kg->add_option("--out", keygen.out, "Parameters file")->required();
  kg->add_option("--master-out", keygen.master_out, "Master secret file (omit to discard the secret)");
  kg->add_option("--n", keygen.n, "Key vector length (must equal the digest width, 256)");
  kg->add_option("--curve", keygen.curve, "p256 or toy97");
  auto* kg_seed = kg->add_option("--seed", keygen.seed, "Deterministic seed (default: OS entropy)");
  kg->add_flag("--force", keygen.force, "Overwrite existing files");

  RoundtripOpts rt;
  auto* rtc = app.add_subcommand("roundtrip", "Run initiator, repliers and verifier in-process");
  rtc->add_option("--params", rt.params, "Parameters file")->required();
  rtc->add_option("--master", rt.master, "Master secret file (to issue vehicle keys)")->required();
  rtc->add_option("--msg", rt.msg, "Event road name carried in the announcement");
  rtc->add_option("--t", rt.t, "Threshold");
  rtc->add_option("--r", rt.r, "Ring size");
  rtc->add_option("--repliers", rt.repliers, "Number of replying vehicles");
  rtc->add_option("--time", rt.time, "Event time and clock, seconds");
  rtc->add_option("--seed", rt.seed, "Seed");
  rtc->add_flag("--variant-keys", rt.variant_keys, "Collusion-resistant keys");
  rtc->add_flag("--encrypt", rt.encrypt, "Encrypt replies to an ephemeral key");
  rtc->add_option("--out", rt.out, "Write the aggregation packet here");
  rtc->add_flag("--force", rt.force, "Overwrite existing files");

  VerifyOpts vf;
  auto* vfc = app.add_subcommand("verify", "Verify an aggregation packet");
  vfc->add_option("--params", vf.params, "Parameters file")->required();
  vfc->add_option("--in", vf.in, "Aggregation packet file")->required();
  vfc->add_option("--now", vf.now, "Verifier clock, seconds");
  vfc->add_option("--window", vf.window, "Replay window, seconds");

  BenchOpts bn;
  auto* bnc = app.add_subcommand("bench", "Time the protocol phases over a (t, r) grid");
  bnc->add_option("--params", bn.params, "Parameters file (with --master; default: fresh keys from --seed)");
  bnc->add_option("--master", bn.master, "Master secret file");
  bnc->add_option("--t", bn.t, "Thresholds, e.g. 2..10");
  bnc->add_option("--r", bn.r, "Ring sizes, e.g. 20,50");
  bnc->add_option("--reps", bn.reps, "Repetitions per cell");
  bnc->add_option("--seed", bn.seed, "Seed");
  bnc->add_flag("--fit-costs", bn.fit_costs, "Print a fitted simulator cost model to stderr");
  bnc->add_option("--out", bn.out, "CSV output (default stdout)");
  bnc->add_flag("--force", bn.force, "Overwrite existing files");

  SimulateOpts sm;
  auto* smc = app.add_subcommand("simulate", "Run a simulation sweep");
  smc->add_option("config", sm.config, "Scenario file (key = value)")->envname("VANETAGG_CONFIG");
  smc->add_option("--t", sm.t, "Override thresholds");
  smc->add_option("--r", sm.r, "Override ring sizes");
  smc->add_option("--vehicles", sm.vehicles, "Override vehicle counts");
  smc->add_option("--runs", sm.runs, "Override runs per cell");
  smc->add_option("--crypto-mode", sm.crypto_mode, "modeled or real");
  auto* sm_seed = smc->add_option("--seed", sm.seed, "Override the base seed");
  smc->add_option("--format", sm.format, "csv or jsonl");
  smc->add_option("--runs-out", sm.runs_out, "Per-run CSV");
  smc->add_option("--out", sm.out, "Summary output (default stdout)");
  smc->add_flag("--force", sm.force, "Overwrite existing files");

  AnonymityOpts an;
  auto* anc = app.add_subcommand("anonymity", "Tabulate P[adversary names >= j actual signers]");
  anc->add_option("--t", an.t, "Thresholds");
  anc->add_option("--r", an.r, "Ring sizes");
  anc->add_option("--j", an.j, "Values of j (default 1..t)");
  anc->add_option("--out", an.out, "CSV output (default stdout)");
  anc->add_flag("--force", an.force, "Overwrite existing files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (kg->parsed()) {
      keygen.seeded = kg_seed->count() > 0;
      return cmd_keygen(keygen);
    }
    if (rtc->parsed()) return cmd_roundtrip(rt);
    if (vfc->parsed()) return cmd_verify(vf);
    if (bnc->parsed()) return cmd_bench(bn);
    if (smc->parsed()) {
      sm.seed_given = sm_seed->count() > 0;
      return cmd_simulate(sm);
    }
    if (anc->parsed()) return cmd_anonymity(an);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
