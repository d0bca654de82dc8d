#pragma once

// JSON forms of descriptors, schedules and reports, and the trace CSV writer.
// Vectors are JSON arrays of numbers; descriptors are tagged unions keyed by
// "type"; schedules are keyed by "family".

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "fixedpoint/functions.hpp"
#include "fixedpoint/iterate.hpp"
#include "fixedpoint/oracle.hpp"
#include "fixedpoint/report.hpp"
#include "fixedpoint/schedule.hpp"
#include "fixedpoint/sets.hpp"

namespace fixedpoint {

using json = nlohmann::json;

/// Validation failure in an input document; `pointer` is the JSON pointer
/// of the offending value.
class SpecError : public std::invalid_argument {
 public:
  SpecError(std::string pointer, const std::string& message)
      : std::invalid_argument(pointer + ": " + message), pointer_(std::move(pointer)) {}

  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

namespace io {

inline const json& field(const json& j, const std::string& key, const std::string& at) {
  if (!j.is_object()) throw SpecError(at, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SpecError(at + "/" + key, "missing required field");
  return *it;
}

inline double number(const json& j, const std::string& at) {
  if (!j.is_number()) throw SpecError(at, "expected a number");
  return j.get<double>();
}

inline double number_field(const json& j, const std::string& key, const std::string& at) {
  return number(field(j, key, at), at + "/" + key);
}

inline double number_or(const json& j, const std::string& key, double fallback,
                        const std::string& at) {
  if (!j.contains(key)) return fallback;
  return number(j.at(key), at + "/" + key);
}

inline std::string string_field(const json& j, const std::string& key, const std::string& at) {
  const json& v = field(j, key, at);
  if (!v.is_string()) throw SpecError(at + "/" + key, "expected a string");
  return v.get<std::string>();
}

/// Integer >= lo, accepting both signed and unsigned JSON integers.
inline std::uint64_t integer_at_least(const json& j, std::uint64_t lo, const std::string& at,
                                      const std::string& what) {
  if (!j.is_number_integer()) throw SpecError(at, "expected " + what);
  if (!j.is_number_unsigned() && j.get<std::int64_t>() < 0) throw SpecError(at, "expected " + what);
  const auto v = j.get<std::uint64_t>();
  if (v < lo) throw SpecError(at, "expected " + what);
  return v;
}

/// Rethrows library validation errors as SpecError anchored at `at`.
template <class F>
auto anchored(const std::string& at, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SpecError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw SpecError(at, e.what());
  }
}

}  // namespace io

inline json to_json(const Vector& v) { return json(v.values()); }

inline Vector vector_from_json(const json& j, const std::string& at = "") {
  if (!j.is_array()) throw SpecError(at, "expected an array of numbers");
  std::vector<double> values;
  for (std::size_t i = 0; i < j.size(); ++i) values.push_back(io::number(j[i], at + "/" + std::to_string(i)));
  return io::anchored(at, [&] { return Vector(std::move(values)); });
}

inline json to_json(const ConvexSet& set) {
  struct J {
    json operator()(const Halfspace& h) const {
      return {{"type", "halfspace"}, {"a", to_json(h.a)}, {"b", h.b}};
    }
    json operator()(const Ball& b) const {
      return {{"type", "ball"}, {"center", to_json(b.center)}, {"radius", b.radius}};
    }
    json operator()(const Box& b) const {
      return {{"type", "box"}, {"lo", to_json(b.lo)}, {"hi", to_json(b.hi)}};
    }
    json operator()(const Affine& a) const {
      json normals = json::array();
      for (const auto& n : a.normals) normals.push_back(to_json(n));
      return {{"type", "affine"}, {"point", to_json(a.point)}, {"normals", normals}};
    }
    json operator()(const Intersection& s) const {
      json sets = json::array();
      for (const auto& p : s.parts) sets.push_back(to_json(p));
      return {{"type", "intersection"}, {"sets", sets}};
    }
  };
  return std::visit(J{}, set);
}

inline ConvexSet set_from_json(const json& j, const std::string& at = "") {
  const std::string type = io::string_field(j, "type", at);
  if (type == "halfspace") {
    Vector a = vector_from_json(io::field(j, "a", at), at + "/a");
    const double b = io::number_field(j, "b", at);
    return io::anchored(at, [&] { return make_halfspace(a, b); });
  }
  if (type == "ball") {
    Vector c = vector_from_json(io::field(j, "center", at), at + "/center");
    const double r = io::number_field(j, "radius", at);
    return io::anchored(at + "/radius", [&] { return make_ball(c, r); });
  }
  if (type == "box") {
    Vector lo = vector_from_json(io::field(j, "lo", at), at + "/lo");
    Vector hi = vector_from_json(io::field(j, "hi", at), at + "/hi");
    return io::anchored(at, [&] { return make_box(lo, hi); });
  }
  if (type == "affine") {
    Vector p = vector_from_json(io::field(j, "point", at), at + "/point");
    std::vector<Vector> normals;
    const json& ns = io::field(j, "normals", at);
    if (!ns.is_array()) throw SpecError(at + "/normals", "expected an array");
    for (std::size_t i = 0; i < ns.size(); ++i)
      normals.push_back(vector_from_json(ns[i], at + "/normals/" + std::to_string(i)));
    return io::anchored(at, [&] { return make_affine(p, normals); });
  }
  if (type == "intersection") {
    const json& ss = io::field(j, "sets", at);
    if (!ss.is_array()) throw SpecError(at + "/sets", "expected an array");
    std::vector<ConvexSet> parts;
    for (std::size_t i = 0; i < ss.size(); ++i)
      parts.push_back(set_from_json(ss[i], at + "/sets/" + std::to_string(i)));
    return io::anchored(at, [&] { return make_intersection(std::move(parts)); });
  }
  throw SpecError(at + "/type", "unknown set type '" + type + "'");
}

inline json to_json(const ScalarFunction& f) {
  struct J {
    json operator()(const AbsValue&) const { return {{"type", "abs_value"}}; }
    json operator()(const Quadratic& q) const {
      return {{"type", "quadratic"}, {"curvature", q.curvature}, {"center", q.center}};
    }
    json operator()(const Indicator& s) const {
      return {{"type", "indicator"}, {"lo", s.lo}, {"hi", s.hi}};
    }
  };
  return std::visit(J{}, f);
}

inline ScalarFunction function_from_json(const json& j, const std::string& at = "") {
  const std::string type = io::string_field(j, "type", at);
  if (type == "abs_value") return AbsValue{};
  if (type == "quadratic") {
    const double c = io::number_field(j, "curvature", at);
    const double m = io::number_or(j, "center", 0.0, at);
    return io::anchored(at + "/curvature", [&] { return make_quadratic(c, m); });
  }
  if (type == "indicator") {
    const double lo = io::number_field(j, "lo", at);
    const double hi = io::number_field(j, "hi", at);
    return io::anchored(at, [&] { return make_indicator(lo, hi); });
  }
  throw SpecError(at + "/type", "unknown function type '" + type + "'");
}

inline json to_json(const ScheduleFlags& f) {
  return {{"tends_to_zero", f.tends_to_zero},
          {"sum_diverges", f.sum_diverges},
          {"inf_positive", f.inf_positive},
          {"sup_below_one", f.sup_below_one}};
}

inline json to_json(const ScheduleFamily& family) {
  struct J {
    json operator()(const PowerFamily& p) const {
      return {{"family", "power"}, {"c", p.c}, {"p", p.p}, {"offset", p.offset}};
    }
    json operator()(const ConstantFamily& c) const {
      return {{"family", "constant"}, {"value", c.v}};
    }
    json operator()(const HarmonicShiftedFamily& h) const {
      return {{"family", "harmonic_shifted"}, {"shift", h.shift}};
    }
    json operator()(const CustomFamily& c) const {
      return {{"family", "custom"}, {"values", c.values}, {"flags", to_json(c.asserted)}};
    }
  };
  return std::visit(J{}, family);
}

inline ScheduleFamily schedule_family_from_json(const json& j, const std::string& at = "") {
  const std::string family = io::string_field(j, "family", at);
  if (family == "power")
    return PowerFamily{io::number_or(j, "c", 1.0, at), io::number_field(j, "p", at),
                       io::number_or(j, "offset", 0.0, at)};
  if (family == "constant") return ConstantFamily{io::number_field(j, "value", at)};
  if (family == "harmonic_shifted") return HarmonicShiftedFamily{io::number_or(j, "shift", 1.0, at)};
  if (family == "custom") {
    CustomFamily c;
    const json& vs = io::field(j, "values", at);
    if (!vs.is_array()) throw SpecError(at + "/values", "expected an array");
    for (std::size_t i = 0; i < vs.size(); ++i)
      c.values.push_back(io::number(vs[i], at + "/values/" + std::to_string(i)));
    if (j.contains("flags")) {
      const json& f = j.at("flags");
      auto flag = [&](const char* key) {
        if (!f.contains(key)) return false;
        if (!f.at(key).is_boolean()) throw SpecError(at + "/flags/" + key, "expected a boolean");
        return f.at(key).get<bool>();
      };
      c.asserted = {flag("tends_to_zero"), flag("sum_diverges"), flag("inf_positive"),
                    flag("sup_below_one")};
    }
    return c;
  }
  throw SpecError(at + "/family", "unknown schedule family '" + family + "'");
}

inline Schedule schedule_from_json(const json& j, ScheduleRole role, const std::string& at = "") {
  ScheduleFamily fam = schedule_family_from_json(j, at);
  return io::anchored(at, [&] { return make_schedule(std::move(fam), role); });
}

/// Short human-readable label, free of commas so it can sit in a CSV cell.
inline std::string describe(const ScheduleFamily& family) {
  auto num = [](double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  };
  struct D {
    decltype(num)& n;
    std::string operator()(const PowerFamily& p) const {
      return "power c=" + n(p.c) + " p=" + n(p.p) + " offset=" + n(p.offset);
    }
    std::string operator()(const ConstantFamily& c) const { return "constant " + n(c.v); }
    std::string operator()(const HarmonicShiftedFamily& h) const {
      return "harmonic_shifted " + n(h.shift);
    }
    std::string operator()(const CustomFamily& c) const {
      return "custom n=" + std::to_string(c.values.size());
    }
  };
  return std::visit(D{num}, family);
}

inline json to_json(const ProbeReport& r) {
  json j = {{"property", r.property},
            {"trials", r.trials},
            {"worst_violation", r.worst_violation},
            {"tolerance", r.tolerance},
            {"pass", r.pass},
            {"rejected", r.rejected},
            {"seed", r.seed}};
  if (!r.note.empty()) j["note"] = r.note;
  if (r.witness) j["witness"] = {to_json(r.witness->first), to_json(r.witness->second)};
  return j;
}

inline json to_json(const OracleResult& r) {
  return {{"value", to_json(r.value)},
          {"method", to_string(r.method)},
          {"certified_tol", r.certified_tol},
          {"certified", r.certified},
          {"kkt_residual", r.kkt_residual},
          {"cross_check_gap", r.cross_check_gap}};
}

/// Shortest decimal form that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, res.ptr);
}

/// CSV with header n,residual_S,residual_T,dist_to_ref; the last column is
/// empty when the run had no reference point. Rows are written for n = 1,
/// every multiple of `stride`, and the final step.
inline void write_trace_csv(std::ostream& os, const IterationTrace& trace, std::size_t stride = 1) {
  if (stride < 1) throw std::invalid_argument("write_trace_csv: stride must be >= 1");
  os << "n,residual_S,residual_T,dist_to_ref\n";
  const bool has_ref = !trace.dist_to_ref.empty();
  for (std::size_t i = 0; i < trace.iterations(); ++i) {
    const std::size_t n = i + 1;
    if (n != 1 && n % stride != 0 && n != trace.iterations()) continue;
    os << (i + 1) << ',' << format_double(trace.residual_S[i]) << ','
       << format_double(trace.residual_T[i]) << ',';
    if (has_ref) os << format_double(trace.dist_to_ref[i]);
    os << '\n';
  }
}

inline json trace_summary(const IterationTrace& trace) {
  json j = {{"stop_reason", to_string(trace.stop_reason)},
            {"iters", trace.iterations()},
            {"final_residual", trace.residual_T.empty() ? 0.0 : trace.residual_T.back()},
            {"final_iterate", to_json(trace.final_iterate)}};
  j["final_dist"] = trace.dist_to_ref.empty() ? json(nullptr) : json(trace.dist_to_ref.back());
  return j;
}

}  // namespace fixedpoint
