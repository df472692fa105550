// Python bindings. Keys and packets cross the boundary as their wire
// encodings (bytes); crypto objects stay on the C++ side.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>


#include "vanetagg/cpk.hpp"
#include "vanetagg/elgamal.hpp"
#include "vanetagg/error.hpp"
#include "vanetagg/gf2.hpp"
#include "vanetagg/itrs.hpp"
#include "vanetagg/protocol.hpp"
#include "vanetagg/sim/anonymity.hpp"
#include "vanetagg/sim/engine.hpp"
#include "vanetagg/sim/sweep.hpp"

namespace py = pybind11;
using namespace vanetagg;

namespace {

Bytes to_vec(const py::bytes& b) {
  std::string_view s = b;
  return Bytes(s.begin(), s.end());
}

py::bytes to_py(ByteView b) { return py::bytes(reinterpret_cast<const char*>(b.data()), b.size()); }

gf2::Gf256 to_field(const py::bytes& b) { return gf2::Gf256::from_bytes(to_vec(b)); }

py::bytes field_bytes(const gf2::Gf256& e) {
  auto enc = e.to_bytes();
  return to_py(enc);
}

ec::CurveId curve_id(const std::string& name) {
  if (name == "p256") return ec::CurveId::kP256;
  if (name == "toy97") return ec::CurveId::kToy97;
  fail(ErrorCode::kConfigError, "unknown curve '" + name + "'");
}

protocol::EventType event_type(const std::string& name) {
  static const std::pair<const char*, protocol::EventType> table[] = {
      {"jam", protocol::EventType::kJam},           {"accident", protocol::EventType::kAccident},
      {"hazard", protocol::EventType::kHazard},     {"roadwork", protocol::EventType::kRoadwork},
      {"weather", protocol::EventType::kWeather}};
  for (const auto& [n, v] : table) {
    if (name == n) return v;
  }
  fail(ErrorCode::kInvalidArgument, "unknown event type '" + name + "'");
}

py::dict metrics_dict(const sim::SimMetrics& m) {
  py::dict d;
  d["initiated"] = m.initiated;
  d["success"] = m.success;
  d["timed_out"] = m.timed_out;
  d["event_time"] = m.event_time;
  d["request_sent"] = m.request_sent;
  d["aggregation_delay"] = m.aggregation_delay;
  d["crypto_time"] = m.crypto_time;
  d["non_crypto_delay"] = m.non_crypto_delay;
  d["willing_receivers"] = m.willing_receivers;
  d["replies_received"] = m.replies_received;
  d["replies_accepted"] = m.replies_accepted;
  return d;
}

py::dict cell_dict(const sim::CellSummary& c) {
  py::dict d;
  d["vehicle_count"] = c.vehicle_count;
  d["density_per_km2"] = c.density_per_km2;
  d["ring_size"] = c.r;
  d["threshold"] = c.t;
  d["runs"] = c.runs;
  d["initiated"] = c.initiated;
  d["succeeded"] = c.succeeded;
  d["validation_probability"] = c.validation_probability;
  d["validation_ci"] = py::make_tuple(c.validation_ci.low, c.validation_ci.high);
  d["aggregation_delay_ms"] = c.aggregation_delay_ms;
  d["crypto_time_ms"] = c.crypto_time_ms;
  d["non_crypto_delay_ms"] = c.non_crypto_delay_ms;
  d["mean_replies"] = c.mean_replies;
  return d;
}

// Parameters and the master secret loaded from their encodings.
struct Keys {
  cpk::SystemParams params;
  std::optional<cpk::MasterKeyMaterial> master;
};

// An initiator session plus the RNG it draws from.
struct PySession {
  std::shared_ptr<const Keys> keys;
  protocol::AggregationSession session;
  Rng rng;
};

}  // namespace

PYBIND11_MODULE(_vanetagg, m) {
  m.doc() = "Privacy-preserving vehicular announcement aggregation";

  // vanetagg.Error carries the error code name in `.code`.
  static py::handle error_type = py::register_exception<Error>(m, "Error").ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error_type(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  // GF(2^256), 32-byte big-endian encodings.
  m.def("gf_add", [](const py::bytes& a, const py::bytes& b) { return field_bytes(to_field(a) + to_field(b)); });
  m.def("gf_mul", [](const py::bytes& a, const py::bytes& b) { return field_bytes(to_field(a) * to_field(b)); });
  m.def("gf_inv", [](const py::bytes& a) { return field_bytes(to_field(a).inverse()); });
  m.def("gf_interpolate_eval",
        [](const std::vector<std::pair<py::bytes, py::bytes>>& points, const py::bytes& x) {
          std::vector<gf2::Point2<gf2::Gf256>> pts;
          for (const auto& [px, py_] : points) pts.emplace_back(to_field(px), to_field(py_));
          return field_bytes(gf2::poly_eval(gf2::interpolate(pts), to_field(x)));
        },
        "Evaluate the interpolating polynomial through `points` at `x`.");

  py::class_<Keys, std::shared_ptr<Keys>>(m, "Keys")
      .def_static(
          "generate",
          [](std::uint64_t seed, const std::string& curve) {
            auto setup = cpk::setup(cpk::kDigestBits, seed, curve_id(curve));
            return std::make_shared<Keys>(Keys{std::move(setup.params), std::move(setup.master)});
          },
          py::arg("seed"), py::arg("curve") = "p256")
      .def_static(
          "load",
          [](const py::bytes& params, std::optional<py::bytes> master) {
            auto k = std::make_shared<Keys>();
            k->params = cpk::decode_params(to_vec(params));
            if (master) k->master = cpk::import_master_secret(to_vec(*master));
            return k;
          },
          py::arg("params"), py::arg("master") = py::none())
      .def("params_bytes", [](const Keys& k) { return to_py(cpk::encode_params(k.params)); })
      .def("master_bytes",
           [](const Keys& k) {
             if (!k.master) fail(ErrorCode::kInvalidArgument, "no master secret loaded");
             return to_py(cpk::export_master_secret(*k.master));
           })
      .def("public_key", [](const Keys& k, const std::string& id) {
        return to_py(k.params.curve().encode(cpk::derive_public(k.params, id)));
      });

  m.def(
      "sign_verify",
      [](const Keys& k, const std::string& id, const py::bytes& msg, std::uint64_t seed) {
        if (!k.master) fail(ErrorCode::kInvalidArgument, "signing needs the master secret");
        const auto& curve = k.params.curve();
        Rng rng(seed);
        auto key = cpk::derive_private(*k.master, id);
        auto sig = elgamal::sign(curve, key.sk, to_field(msg), rng);
        return elgamal::verify(curve, cpk::derive_public(k.params, id), sig);
      },
      "Sign a 32-byte message under `id` and verify it against the derived public key.");

  py::class_<PySession>(m, "Session")
      .def("request", [](const PySession& s) {
        return to_py(protocol::encode_packet(s.keys->params.curve(), s.session.request()));
      })
      .def("handle_reply",
           [](PySession& s, const py::bytes& wire, double now) {
             auto packet = protocol::decode_packet(s.keys->params.curve(), to_vec(wire));
             auto* reply = std::get_if<protocol::ReplyPacket>(&packet);
             if (reply == nullptr) fail(ErrorCode::kMalformedPacket, "not a reply packet");
             return std::string(to_string(s.session.handle_reply(*reply, now)));
           })
      .def_property_readonly("ready", [](const PySession& s) { return s.session.ready(); })
      .def_property_readonly("accepted", [](const PySession& s) { return s.session.accepted().size(); })
      .def("finalize", [](PySession& s) {
        return to_py(protocol::encode_packet(s.keys->params.curve(), s.session.finalize(s.rng)));
      });

  m.def(
      "initiate",
      [](std::shared_ptr<const Keys> keys, const std::string& id, const std::string& road, const std::string& type,
         double x, double y, double now, std::uint32_t t, std::uint32_t r, bool encrypt, bool variant_keys,
         std::uint64_t seed) {
        if (!keys->master) fail(ErrorCode::kInvalidArgument, "issuing keys needs the master secret");
        Rng rng(seed);
        auto own = variant_keys ? cpk::derive_private_v2(*keys->master, id, rng) : cpk::derive_private(*keys->master, id);
        protocol::EventDescription event{x, y, event_type(type), protocol::Direction::kBoth, road, now};
        protocol::SessionConfig config{120.0, encrypt, variant_keys};
        auto session = protocol::initiate(keys->params, own, event, t, r, now, config, rng);
        return PySession{keys, std::move(session), rng.fork("session")};
      },
      py::arg("keys"), py::arg("id"), py::arg("road"), py::arg("type") = "jam", py::arg("x") = 0.0,
      py::arg("y") = 0.0, py::arg("now") = 0.0, py::arg("t") = 3, py::arg("r") = 20, py::arg("encrypt") = false,
      py::arg("variant_keys") = false, py::arg("seed") = 1);

  m.def(
      "reply",
      [](const Keys& keys, const std::string& id, const py::bytes& request, bool variant_keys, std::uint64_t seed) {
        if (!keys.master) fail(ErrorCode::kInvalidArgument, "issuing keys needs the master secret");
        Rng rng(seed);
        auto key = variant_keys ? cpk::derive_private_v2(*keys.master, id, rng) : cpk::derive_private(*keys.master, id);
        const auto& curve = keys.params.curve();
        auto packet = protocol::decode_packet(curve, to_vec(request));
        auto* req = std::get_if<protocol::RequestPacket>(&packet);
        if (req == nullptr) fail(ErrorCode::kMalformedPacket, "not a request packet");
        protocol::Replier replier(keys.params, std::move(key));
        return to_py(protocol::encode_packet(curve, replier.build(*req, rng)));
      },
      py::arg("keys"), py::arg("id"), py::arg("request"), py::arg("variant_keys") = false, py::arg("seed") = 1,
      "Build a reply to an encoded request as vehicle `id`.");

  m.def(
      "verify_announcement",
      [](const Keys& keys, const py::bytes& wire, double now, double window) {
        auto packet = protocol::decode_packet(keys.params.curve(), to_vec(wire));
        auto* agg = std::get_if<protocol::AggregationPacket>(&packet);
        if (agg == nullptr) fail(ErrorCode::kMalformedPacket, "not an aggregation packet");
        return std::string(to_string(protocol::verify_announcement(keys.params, *agg, now, window)));
      },
      py::arg("keys"), py::arg("announcement"), py::arg("now"),
      py::arg("window") = protocol::kDefaultReplayWindow);

  m.def("anonymity_prob", &sim::anonymity_prob, py::arg("t"), py::arg("r"), py::arg("j"));
  m.def(
      "anonymity_prob_exact",
      [](std::uint32_t t, std::uint32_t r, std::uint32_t j) {
        auto f = sim::anonymity_prob_exact(t, r, j);
        return py::make_tuple(f.num, f.den);
      },
      py::arg("t"), py::arg("r"), py::arg("j"));

  m.def(
      "run_scenario",
      [](const std::string& config, std::uint64_t seed) {
        auto spec = sim::parse_sweep(config);
        spec.base.seed = seed;
        return metrics_dict(sim::run_scenario(spec.base));
      },
      py::arg("config") = "", py::arg("seed") = 1,
      "Run one simulation of the first cell of a `key = value` scenario.");

  m.def(
      "sweep",
      [](const std::string& config) {
        auto spec = sim::parse_sweep(config);
        std::vector<sim::CellSummary> cells;
        {
          py::gil_scoped_release release;
          cells = sim::sweep(spec);
        }
        py::list out;
        for (const auto& c : cells) out.append(cell_dict(c));
        return out;
      },
      py::arg("config"), "Run a sweep and return one dict per cell.");

  m.def("format_scenario", [](const std::string& config) { return sim::format_sweep(sim::parse_sweep(config)); });
}
