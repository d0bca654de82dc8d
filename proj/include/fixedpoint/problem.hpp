#pragma once

// Problem files: a JSON document naming an operator sequence, its schedules,
// the anchor and start points and a stop rule. Parsing gates every
// convergence hypothesis that can be checked up front (schedule flags,
// dimensions, domain invariance).

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "fixedpoint/io.hpp"
#include "fixedpoint/iterate.hpp"
#include "fixedpoint/oracle.hpp"
#include "fixedpoint/sequences.hpp"
#include "fixedpoint/verify.hpp"

namespace fixedpoint {

/// Recursive description of an operator, mirroring the operator constructors.
struct OperatorSpec {
  std::string type;  // identity|projection|prox|relax|combo|geometric_combo|constant|rotation
  std::optional<ConvexSet> set;
  std::optional<ScalarFunction> function;
  double lambda = 1.0;
  double gamma = 0.5;
  double angle = 0.0;
  std::vector<double> weights;
  std::optional<Vector> point;
  std::vector<OperatorSpec> children;
};

struct SequenceSpec {
  std::string kind;  // constant|resolvent|cfp
  std::optional<OperatorSpec> op;
  std::optional<ScalarFunction> function;
  std::vector<OperatorSpec> ops;
  std::string beta = "geometric";
};

struct ContractionSpec {
  std::string type;  // constant|affine|perturbed_anchor
  double theta = 0.0;
  std::optional<Vector> offset;
  std::optional<Vector> direction;
};

struct ProblemSpec {
  std::size_t dimension = 0;
  SequenceSpec sequence;
  ScheduleFamily alpha = PowerFamily{1.0, 1.0, 0.0};
  std::optional<ScheduleFamily> gamma;
  std::optional<ScheduleFamily> lambda;
  Vector anchor;
  Vector start;
  std::optional<ContractionSpec> contraction;
  StopRule stop;
  /// "none", "oracle" or an explicit point.
  std::string reference_mode = "oracle";
  std::optional<Vector> reference_point;
  std::optional<ConvexSet> domain;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
};

// ---------------------------------------------------------------- parsing

inline OperatorSpec operator_spec_from_json(const json& j, const std::string& at) {
  OperatorSpec s;
  s.type = io::string_field(j, "type", at);
  auto children = [&](const char* key) {
    const json& arr = io::field(j, key, at);
    if (!arr.is_array() || arr.empty())
      throw SpecError(at + "/" + key, "expected a nonempty array of operators");
    for (std::size_t i = 0; i < arr.size(); ++i)
      s.children.push_back(
          operator_spec_from_json(arr[i], at + "/" + key + "/" + std::to_string(i)));
  };
  if (s.type == "identity") {
  } else if (s.type == "projection") {
    s.set = set_from_json(io::field(j, "set", at), at + "/set");
  } else if (s.type == "prox") {
    s.function = function_from_json(io::field(j, "function", at), at + "/function");
    s.lambda = io::number_field(j, "lambda", at);
  } else if (s.type == "relax") {
    s.gamma = io::number_field(j, "gamma", at);
    s.children.push_back(operator_spec_from_json(io::field(j, "operator", at), at + "/operator"));
  } else if (s.type == "combo") {
    const json& w = io::field(j, "weights", at);
    if (!w.is_array()) throw SpecError(at + "/weights", "expected an array");
    for (std::size_t i = 0; i < w.size(); ++i)
      s.weights.push_back(io::number(w[i], at + "/weights/" + std::to_string(i)));
    children("operators");
  } else if (s.type == "geometric_combo") {
    children("operators");
  } else if (s.type == "constant") {
    s.point = vector_from_json(io::field(j, "point", at), at + "/point");
  } else if (s.type == "rotation") {
    s.angle = io::number_field(j, "angle", at);
  } else {
    throw SpecError(at + "/type", "unknown operator type '" + s.type + "'");
  }
  return s;
}

inline json to_json(const OperatorSpec& s) {
  json j = {{"type", s.type}};
  if (s.type == "projection") j["set"] = to_json(*s.set);
  if (s.type == "prox") {
    j["function"] = to_json(*s.function);
    j["lambda"] = s.lambda;
  }
  if (s.type == "relax") {
    j["gamma"] = s.gamma;
    j["operator"] = to_json(s.children.front());
  }
  if (s.type == "combo") j["weights"] = s.weights;
  if (s.type == "combo" || s.type == "geometric_combo") {
    json ops = json::array();
    for (const auto& c : s.children) ops.push_back(to_json(c));
    j["operators"] = ops;
  }
  if (s.type == "constant") j["point"] = to_json(*s.point);
  if (s.type == "rotation") j["angle"] = s.angle;
  return j;
}

inline Operator build_operator(const OperatorSpec& s, std::size_t dim, const std::string& at) {
  return io::anchored(at, [&]() -> Operator {
    Operator op = [&]() -> Operator {
      if (s.type == "identity") return identity_operator(dim);
      if (s.type == "projection") return projection_operator(*s.set);
      if (s.type == "prox") return prox_operator(*s.function, s.lambda, dim);
      if (s.type == "relax") return relax(s.gamma, build_operator(s.children.front(), dim, at + "/operator"));
      if (s.type == "constant") return constant_operator(*s.point);
      if (s.type == "rotation") return rotation_operator(s.angle);
      std::vector<Operator> ops;
      for (std::size_t i = 0; i < s.children.size(); ++i)
        ops.push_back(build_operator(s.children[i], dim, at + "/operators/" + std::to_string(i)));
      if (s.type == "combo") return convex_combo(s.weights, std::move(ops));
      return truncated_geometric_combo(std::move(ops));
    }();
    require_same_dim(dim, op.dim());
    return op;
  });
}

inline ProblemSpec problem_from_json(const json& j) {
  if (!j.is_object()) throw SpecError("", "problem file must be a JSON object");
  ProblemSpec p;
  const json& dim = io::field(j, "dimension", "");
  p.dimension = io::integer_at_least(dim, 1, "/dimension", "an integer in [1, 64]");
  if (p.dimension > max_dimension) throw SpecError("/dimension", "expected an integer in [1, 64]");

  const json& seq = io::field(j, "sequence", "");
  p.sequence.kind = io::string_field(seq, "kind", "/sequence");
  if (p.sequence.kind == "constant") {
    p.sequence.op = operator_spec_from_json(io::field(seq, "operator", "/sequence"), "/sequence/operator");
  } else if (p.sequence.kind == "resolvent") {
    p.sequence.function =
        function_from_json(io::field(seq, "function", "/sequence"), "/sequence/function");
  } else if (p.sequence.kind == "cfp") {
    const json& ops = io::field(seq, "operators", "/sequence");
    if (!ops.is_array() || ops.empty())
      throw SpecError("/sequence/operators", "expected a nonempty array of operators");
    for (std::size_t i = 0; i < ops.size(); ++i)
      p.sequence.ops.push_back(
          operator_spec_from_json(ops[i], "/sequence/operators/" + std::to_string(i)));
    if (seq.contains("beta")) {
      p.sequence.beta = io::string_field(seq, "beta", "/sequence");
      if (p.sequence.beta != "geometric")
        throw SpecError("/sequence/beta", "only the 'geometric' beta table is available");
    }
  } else {
    throw SpecError("/sequence/kind", "unknown sequence kind '" + p.sequence.kind + "'");
  }

  if (j.contains("alpha")) p.alpha = schedule_family_from_json(j.at("alpha"), "/alpha");
  if (j.contains("gamma")) p.gamma = schedule_family_from_json(j.at("gamma"), "/gamma");
  if (j.contains("lambda")) p.lambda = schedule_family_from_json(j.at("lambda"), "/lambda");

  p.anchor = vector_from_json(io::field(j, "anchor", ""), "/anchor");
  p.start = j.contains("start") ? vector_from_json(j.at("start"), "/start") : p.anchor;

  if (j.contains("contraction")) {
    const json& c = j.at("contraction");
    ContractionSpec cs;
    cs.type = io::string_field(c, "type", "/contraction");
    if (cs.type == "affine") {
      cs.theta = io::number_field(c, "theta", "/contraction");
      cs.offset = c.contains("offset") ? vector_from_json(c.at("offset"), "/contraction/offset")
                                       : Vector(p.dimension);
    } else if (cs.type == "perturbed_anchor") {
      cs.direction = vector_from_json(io::field(c, "direction", "/contraction"), "/contraction/direction");
    } else if (cs.type != "constant") {
      throw SpecError("/contraction/type", "unknown contraction type '" + cs.type + "'");
    }
    p.contraction = cs;
  }

  if (j.contains("stop")) {
    const json& s = j.at("stop");
    if (s.contains("max_iters")) {
      p.stop.max_iters = io::integer_at_least(s.at("max_iters"), 1, "/stop/max_iters", "a positive integer");
    }
    p.stop.residual_tol = io::number_or(s, "residual_tol", p.stop.residual_tol, "/stop");
    if (s.contains("target_tol")) p.stop.target_tol = io::number(s.at("target_tol"), "/stop/target_tol");
    io::anchored("/stop", [&] { p.stop.validate(); });
  }

  if (j.contains("reference")) {
    const json& r = j.at("reference");
    if (r.is_string()) {
      p.reference_mode = r.get<std::string>();
      if (p.reference_mode != "oracle" && p.reference_mode != "none")
        throw SpecError("/reference", "expected \"oracle\", \"none\" or a point");
    } else {
      p.reference_mode = "point";
      p.reference_point = vector_from_json(r, "/reference");
    }
  }

  if (j.contains("domain")) {
    p.domain = set_from_json(j.at("domain"), "/domain");
    if (!std::holds_alternative<Box>(*p.domain))
      throw SpecError("/domain/type", "the iteration domain must be a box");
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    if (o.contains("dir")) p.output_dir = io::string_field(o, "dir", "/output");
    if (o.contains("stride")) {
      p.stop.stride = io::integer_at_least(o.at("stride"), 1, "/output/stride", "a positive integer");
    }
  }
  if (j.contains("seed")) {
    p.seed = io::integer_at_least(j.at("seed"), 0, "/seed", "a nonnegative integer");
  }
  return p;
}

inline json to_json(const ProblemSpec& p) {
  json seq = {{"kind", p.sequence.kind}};
  if (p.sequence.op) seq["operator"] = to_json(*p.sequence.op);
  if (p.sequence.function) seq["function"] = to_json(*p.sequence.function);
  if (p.sequence.kind == "cfp") {
    json ops = json::array();
    for (const auto& o : p.sequence.ops) ops.push_back(to_json(o));
    seq["operators"] = ops;
    seq["beta"] = p.sequence.beta;
  }
  json j = {{"dimension", p.dimension},
            {"sequence", seq},
            {"alpha", to_json(p.alpha)},
            {"anchor", to_json(p.anchor)},
            {"start", to_json(p.start)},
            {"seed", p.seed},
            {"output", {{"dir", p.output_dir}, {"stride", p.stop.stride}}}};
  if (p.gamma) j["gamma"] = to_json(*p.gamma);
  if (p.lambda) j["lambda"] = to_json(*p.lambda);
  if (p.contraction) {
    json c = {{"type", p.contraction->type}};
    if (p.contraction->type == "affine") {
      c["theta"] = p.contraction->theta;
      c["offset"] = to_json(*p.contraction->offset);
    }
    if (p.contraction->direction) c["direction"] = to_json(*p.contraction->direction);
    j["contraction"] = c;
  }
  json stop = {{"max_iters", p.stop.max_iters}, {"residual_tol", p.stop.residual_tol}};
  if (p.stop.target_tol) stop["target_tol"] = *p.stop.target_tol;
  j["stop"] = stop;
  j["reference"] = p.reference_point ? to_json(*p.reference_point) : json(p.reference_mode);
  if (p.domain) j["domain"] = to_json(*p.domain);
  return j;
}

// --------------------------------------------------------------- building

/// Everything a run needs, built and validated from a ProblemSpec.
struct Problem {
  ProblemSpec spec;
  OperatorSequence sequence;
  Schedule alpha;
  std::optional<ContractionFamily> contraction;
  std::optional<Vector> reference;
  std::optional<OracleResult> oracle;
};

inline OperatorSequence build_sequence(const ProblemSpec& p) {
  const std::size_t d = p.dimension;
  const auto& s = p.sequence;
  if (s.kind == "constant") {
    Operator t = build_operator(*s.op, d, "/sequence/operator");
    return io::anchored("/sequence/operator", [&] { return constant_sequence(t); });
  }
  if (s.kind == "resolvent") {
    if (!p.lambda) throw SpecError("/lambda", "resolvent sequences need a lambda schedule");
    const Schedule lambdas = schedule_from_json(to_json(*p.lambda), ScheduleRole::lambda, "/lambda");
    return resolvent_sequence(*s.function, lambdas, d);
  }
  if (!p.gamma) throw SpecError("/gamma", "cfp sequences need a gamma schedule");
  const Schedule gamma = schedule_from_json(to_json(*p.gamma), ScheduleRole::gamma, "/gamma");
  std::vector<Operator> ops;
  for (std::size_t i = 0; i < s.ops.size(); ++i)
    ops.push_back(build_operator(s.ops[i], d, "/sequence/operators/" + std::to_string(i)));
  return io::anchored("/sequence", [&] { return cfp_sequence(std::move(ops), BetaTable::geometric(), gamma); });
}

inline Problem build_problem(const ProblemSpec& spec) {
  const std::size_t d = spec.dimension;
  io::anchored("/anchor", [&] { require_same_dim(d, spec.anchor.dim()); });
  io::anchored("/start", [&] { require_same_dim(d, spec.start.dim()); });

  OperatorSequence seq = build_sequence(spec);
  Schedule alpha = schedule_from_json(to_json(spec.alpha), ScheduleRole::alpha, "/alpha");

  std::optional<ContractionFamily> contraction;
  if (spec.contraction) {
    const auto& c = *spec.contraction;
    if (c.type == "constant") {
      contraction = ContractionFamily::constant(spec.anchor);
    } else if (c.type == "affine") {
      io::anchored("/contraction/offset", [&] { require_same_dim(d, c.offset->dim()); });
      contraction = io::anchored("/contraction/theta",
                                 [&] { return ContractionFamily::affine(c.theta, *c.offset); });
    } else {
      io::anchored("/contraction/direction", [&] { require_same_dim(d, c.direction->dim()); });
      const Vector u = spec.anchor;
      const Vector dir = *c.direction;
      contraction = ContractionFamily::anchors(
          [u, dir](std::size_t n) { return u + (1.0 / static_cast<double>(n)) * dir; }, u);
    }
  }

  if (spec.domain) {
    const ConvexSet& dom = *spec.domain;
    if (!contains(dom, spec.anchor, 0.0)) throw SpecError("/anchor", "anchor lies outside the domain");
    if (!contains(dom, spec.start, 0.0)) throw SpecError("/start", "start lies outside the domain");
    for (std::size_t n : {1u, 2u, 10u, 100u}) {
      if (!probe_maps_into(seq.at(n), dom, spec.seed + n).pass)
        throw SpecError("/sequence", "S_" + std::to_string(n) + " does not map the domain into itself");
    }
  }

  std::optional<Vector> reference;
  std::optional<OracleResult> oracle;
  if (spec.reference_mode == "point") {
    io::anchored("/reference", [&] { require_same_dim(d, spec.reference_point->dim()); });
    reference = spec.reference_point;
  } else if (spec.reference_mode == "oracle") {
    if (contraction) {
      const Vector v = contraction_fixed_point_oracle(seq.common_fixed_set, contraction->limit,
                                                      contraction->theta, spec.start);
      oracle = OracleResult{v, OracleMethod::contraction_iteration, 1e-12, false, 0.0, 0.0};
    } else {
      oracle = project_intersection_oracle(seq.common_fixed_set, spec.anchor);
    }
    reference = oracle->value;
  }
  return Problem{spec, std::move(seq), std::move(alpha), std::move(contraction),
                 std::move(reference), std::move(oracle)};
}

inline IterationTrace run_problem(const Problem& p) {
  if (p.contraction)
    return viscosity(p.sequence, *p.contraction, p.spec.start, p.alpha, p.spec.stop, p.reference);
  return halpern(p.sequence, p.spec.anchor, p.spec.start, p.alpha, p.spec.stop, p.reference);
}

inline json run_summary(const Problem& p, const IterationTrace& trace) {
  json j = trace_summary(trace);
  j["driver"] = p.contraction ? "viscosity" : "halpern";
  j["sequence"] = p.spec.sequence.kind;
  if (p.reference) j["reference"] = to_json(*p.reference);
  if (p.oracle) j["oracle"] = to_json(*p.oracle);
  return j;
}

/// Exit status of a finished run: 0 when a tolerance was met, 2 otherwise.
inline int run_exit_code(const IterationTrace& trace) {
  return trace.stop_reason == StopReason::max_iters ? 2 : 0;
}

// ------------------------------------------------------------- comparison

struct CompareRow {
  std::string label;
  /// First n with dist_to_ref <= threshold * ||u - Qu||, per threshold.
  std::vector<std::optional<std::size_t>> iterations;
};

inline const std::vector<double>& compare_thresholds() {
  static const std::vector<double> t{1e-1, 1e-2, 1e-3};
  return t;
}

/// Runs the problem once per alpha schedule and records when the distance to
/// the reference first falls below each relative threshold.
inline std::vector<CompareRow> compare_schedules(const ProblemSpec& spec,
                                                 const std::vector<ScheduleFamily>& schedules) {
  if (schedules.empty()) throw SpecError("/schedules", "schedule list is empty");
  for (std::size_t i = 0; i < schedules.size(); ++i)
    schedule_from_json(to_json(schedules[i]), ScheduleRole::alpha, "/schedules/" + std::to_string(i));

  std::vector<CompareRow> rows;
  for (const auto& fam : schedules) {
    ProblemSpec s = spec;
    s.alpha = fam;
    if (s.reference_mode == "none") s.reference_mode = "oracle";
    Problem prob = build_problem(s);
    const double scale = distance(prob.spec.anchor, *prob.reference);
    const double unit = scale > 0.0 ? scale : 1.0;
    s.stop.target_tol = compare_thresholds().back() * unit;
    prob.spec.stop = s.stop;
    const IterationTrace trace = run_problem(prob);

    CompareRow row{describe(fam), {}};
    for (double thr : compare_thresholds()) {
      std::optional<std::size_t> hit;
      for (std::size_t i = 0; i < trace.dist_to_ref.size(); ++i)
        if (trace.dist_to_ref[i] <= thr * unit) {
          hit = i + 1;
          break;
        }
      row.iterations.push_back(hit);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_compare_csv(std::ostream& os, const std::vector<CompareRow>& rows) {
  os << "schedule";
  for (double t : compare_thresholds()) os << ",iters_" << format_double(t);
  os << '\n';
  for (const auto& r : rows) {
    os << r.label;
    for (const auto& it : r.iterations) {
      os << ',';
      if (it) os << *it;
    }
    os << '\n';
  }
}

// -------------------------------------------------------------- utilities

/// Best-effort line number (1-based) of the value addressed by a JSON
/// pointer inside the raw document text; 0 when it cannot be located.
inline std::size_t locate_line(const std::string& text, const std::string& pointer) {
  std::size_t pos = 0;
  bool found_any = false;
  std::size_t start = 0;
  while (start < pointer.size()) {
    if (pointer[start] == '/') ++start;
    std::size_t end = pointer.find('/', start);
    if (end == std::string::npos) end = pointer.size();
    const std::string token = pointer.substr(start, end - start);
    start = end;
    if (token.empty() || std::all_of(token.begin(), token.end(), ::isdigit)) continue;
    const std::size_t hit = text.find("\"" + token + "\"", pos);
    if (hit == std::string::npos) break;
    pos = hit;
    found_any = true;
  }
  if (!found_any) return 0;
  return static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n')) + 1;
}

}  // namespace fixedpoint
