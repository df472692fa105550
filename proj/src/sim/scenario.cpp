#include "vanetagg/sim/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "vanetagg/error.hpp"

namespace vanetagg::sim {

std::string_view to_string(CryptoMode m) { return m == CryptoMode::kReal ? "real" : "modeled"; }

void validate(const SimScenario& s) {
  auto require = [](bool ok, const char* what) {
    if (!ok) fail(ErrorCode::kConfigError, what);
  };
  require(s.area_width > 0 && s.area_height > 0, "area dimensions must be positive");
  require(s.grid_blocks > 0, "grid_blocks must be positive");
  require(s.mean_speed_kmh > 0, "mean_speed_kmh must be positive");
  require(s.comm_range > 0, "comm_range must be positive");
  require(s.comm_range < std::min(s.area_width, s.area_height), "comm_range must be below the area size");
  require(s.duration > 0, "duration must be positive");
  require(s.t >= 1 && s.t <= s.r, "need 1 <= t <= r");
  require(s.base_latency >= 0 && s.latency_jitter >= 0 && s.reply_backoff >= 0, "delays must be nonnegative");
  require(s.bitrate_bps > 0, "bitrate_bps must be positive");
  require(s.loss_rate >= 0 && s.loss_rate <= 1, "loss_rate must lie in [0, 1]");
  require(s.honest_fraction >= 0 && s.honest_fraction <= 1, "honest_fraction must lie in [0, 1]");
  require(s.detection_radius > 0, "detection_radius must be positive");
  require(s.session_timeout > 0, "session_timeout must be positive");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T v{};
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    fail(ErrorCode::kConfigError, std::string(key) + ": not a number: '" + std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  fail(ErrorCode::kConfigError, std::string(key) + ": expected true or false");
}

std::vector<std::uint32_t> parse_list(std::string_view key, std::string_view text) {
  std::vector<std::uint32_t> out;
  if (auto dots = text.find(".."); dots != std::string_view::npos) {
    auto lo = parse_number<std::uint32_t>(key, trim(text.substr(0, dots)));
    auto hi = parse_number<std::uint32_t>(key, trim(text.substr(dots + 2)));
    if (lo > hi) fail(ErrorCode::kConfigError, std::string(key) + ": empty range");
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    auto item = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    out.push_back(parse_number<std::uint32_t>(key, item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

using Setter = std::function<void(SweepSpec&, std::string_view key, std::string_view value)>;

template <class T>
Setter number(T SimScenario::*field) {
  return [field](SweepSpec& s, std::string_view k, std::string_view v) { s.base.*field = parse_number<T>(k, v); };
}

template <class T>
Setter cost(T CostModel::*field) {
  return [field](SweepSpec& s, std::string_view k, std::string_view v) {
    s.base.costs.*field = parse_number<T>(k, v);
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"area_width", number(&SimScenario::area_width)},
      {"area_height", number(&SimScenario::area_height)},
      {"grid_blocks", number(&SimScenario::grid_blocks)},
      {"vehicle_count",
       [](SweepSpec& s, std::string_view k, std::string_view v) { s.vehicle_counts = parse_list(k, v); }},
      {"mean_speed_kmh", number(&SimScenario::mean_speed_kmh)},
      {"comm_range", number(&SimScenario::comm_range)},
      {"duration", number(&SimScenario::duration)},
      {"r", [](SweepSpec& s, std::string_view k, std::string_view v) { s.ring_sizes = parse_list(k, v); }},
      {"t", [](SweepSpec& s, std::string_view k, std::string_view v) { s.thresholds = parse_list(k, v); }},
      {"runs", [](SweepSpec& s, std::string_view k, std::string_view v) { s.runs = parse_number<std::uint32_t>(k, v); }},
      {"base_latency", number(&SimScenario::base_latency)},
      {"bitrate_bps", number(&SimScenario::bitrate_bps)},
      {"latency_jitter", number(&SimScenario::latency_jitter)},
      {"loss_rate", number(&SimScenario::loss_rate)},
      {"reply_backoff", number(&SimScenario::reply_backoff)},
      {"detection_radius", number(&SimScenario::detection_radius)},
      {"honest_fraction", number(&SimScenario::honest_fraction)},
      {"session_timeout", number(&SimScenario::session_timeout)},
      {"variant_keys",
       [](SweepSpec& s, std::string_view k, std::string_view v) { s.base.variant_keys = parse_bool(k, v); }},
      {"encrypt_replies",
       [](SweepSpec& s, std::string_view k, std::string_view v) { s.base.encrypt_replies = parse_bool(k, v); }},
      {"seed", number(&SimScenario::seed)},
      {"crypto_mode",
       [](SweepSpec& s, std::string_view k, std::string_view v) {
         if (v == "modeled") {
           s.base.crypto_mode = CryptoMode::kModeled;
         } else if (v == "real") {
           s.base.crypto_mode = CryptoMode::kReal;
         } else {
           fail(ErrorCode::kConfigError, std::string(k) + ": expected modeled or real");
         }
       }},
      {"cost.request_base", cost(&CostModel::request_base)},
      {"cost.request_per_fake", cost(&CostModel::request_per_fake)},
      {"cost.reply_base", cost(&CostModel::reply_base)},
      {"cost.reply_per_fake", cost(&CostModel::reply_per_fake)},
      {"cost.validate_base", cost(&CostModel::validate_base)},
      {"cost.finalize_base", cost(&CostModel::finalize_base)},
      {"cost.finalize_per_member", cost(&CostModel::finalize_per_member)},
  };
  return table;
}

}  // namespace

SweepSpec parse_sweep(std::string_view text) {
  SweepSpec spec;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::kConfigError, "line " + std::to_string(line_no) + ": expected key = value");
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    auto it = setters().find(key);
    if (it == setters().end()) fail(ErrorCode::kConfigError, "unknown key '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second) {
      fail(ErrorCode::kConfigError, "key '" + std::string(key) + "' given twice");
    }
    it->second(spec, key, value);
  }
  if (spec.vehicle_counts.empty() || spec.ring_sizes.empty() || spec.thresholds.empty() || spec.runs == 0) {
    fail(ErrorCode::kConfigError, "sweep needs at least one cell and one run");
  }
  spec.base.vehicle_count = spec.vehicle_counts.front();
  spec.base.r = spec.ring_sizes.front();
  spec.base.t = spec.thresholds.front();
  validate(spec.base);
  for (auto r : spec.ring_sizes) {
    for (auto t : spec.thresholds) {
      if (t < 1 || t > r) fail(ErrorCode::kConfigError, "need 1 <= t <= r for every cell");
    }
  }
  return spec;
}

std::vector<std::uint32_t> parse_count_list(std::string_view text) { return parse_list("list", trim(text)); }

SweepSpec load_sweep(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_sweep(buf.str());
}

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string join(const std::vector<std::uint32_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
  return out;
}

}  // namespace

std::string format_sweep(const SweepSpec& spec) {
  const auto& s = spec.base;
  const auto& c = s.costs;
  std::ostringstream o;
  o << "area_width = " << fmt(s.area_width) << "\n"
    << "area_height = " << fmt(s.area_height) << "\n"
    << "grid_blocks = " << s.grid_blocks << "\n"
    << "vehicle_count = " << join(spec.vehicle_counts) << "\n"
    << "mean_speed_kmh = " << fmt(s.mean_speed_kmh) << "\n"
    << "comm_range = " << fmt(s.comm_range) << "\n"
    << "duration = " << fmt(s.duration) << "\n"
    << "r = " << join(spec.ring_sizes) << "\n"
    << "t = " << join(spec.thresholds) << "\n"
    << "runs = " << spec.runs << "\n"
    << "base_latency = " << fmt(s.base_latency) << "\n"
    << "bitrate_bps = " << fmt(s.bitrate_bps) << "\n"
    << "latency_jitter = " << fmt(s.latency_jitter) << "\n"
    << "loss_rate = " << fmt(s.loss_rate) << "\n"
    << "reply_backoff = " << fmt(s.reply_backoff) << "\n"
    << "detection_radius = " << fmt(s.detection_radius) << "\n"
    << "honest_fraction = " << fmt(s.honest_fraction) << "\n"
    << "session_timeout = " << fmt(s.session_timeout) << "\n"
    << "variant_keys = " << (s.variant_keys ? "true" : "false") << "\n"
    << "encrypt_replies = " << (s.encrypt_replies ? "true" : "false") << "\n"
    << "seed = " << s.seed << "\n"
    << "crypto_mode = " << to_string(s.crypto_mode) << "\n"
    << "cost.request_base = " << fmt(c.request_base) << "\n"
    << "cost.request_per_fake = " << fmt(c.request_per_fake) << "\n"
    << "cost.reply_base = " << fmt(c.reply_base) << "\n"
    << "cost.reply_per_fake = " << fmt(c.reply_per_fake) << "\n"
    << "cost.validate_base = " << fmt(c.validate_base) << "\n"
    << "cost.finalize_base = " << fmt(c.finalize_base) << "\n"
    << "cost.finalize_per_member = " << fmt(c.finalize_per_member) << "\n";
  return o.str();
}

}  // namespace vanetagg::sim
