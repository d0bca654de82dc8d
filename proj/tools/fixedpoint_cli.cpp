// fixedpoint: run, verify, compare and oracle front end.
//
//   fixedpoint run     --spec problem.json [--out DIR] [--seed N] [--max-iters N] [--tol X] [--stride N]
//   fixedpoint verify  SUITE [--out DIR] [--seed N]
//   fixedpoint compare --spec problem.json --schedules schedules.json [--out DIR]
//   fixedpoint oracle  --spec problem.json [--out DIR]
//
// Exit codes: 0 success, 1 invalid input or failed verification, 2 run hit max_iters.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "fixedpoint/io.hpp"
#include "fixedpoint/problem.hpp"
#include "fixedpoint/suites.hpp"

namespace fs = std::filesystem;
using namespace fixedpoint;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_invalid = 1;
constexpr int exit_max_iters = 2;

/// Raised for problems tied to a location in an input file.
struct InputError {
  std::string message;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("fixedpoint");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("FIXEDPOINT_LOG"))
    spdlog::set_level(spdlog::level::from_str(env));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError{path + ": cannot open file"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n')) + 1;
}

json parse_json(const std::string& path, const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError{path + ":" + std::to_string(line_of_offset(text, e.byte)) + ": " + e.what()};
  }
}

/// Runs `f`, converting validation errors into messages anchored at the
/// offending line of `path`.
template <class F>
auto with_location(const std::string& path, const std::string& text, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SpecError& e) {
    const std::size_t line = locate_line(text, e.pointer());
    throw InputError{path + ":" + (line ? std::to_string(line) : std::string("?")) + ": " + e.what()};
  } catch (const HypothesisViolation& e) {
    throw InputError{path + ": " + e.what()};
  } catch (const std::invalid_argument& e) {
    throw InputError{path + ": " + e.what()};
  }
}

struct LoadedProblem {
  std::string path;
  std::string text;
  ProblemSpec spec;
};

LoadedProblem load_problem(const std::string& path) {
  LoadedProblem lp{path, read_file(path), {}};
  const json j = parse_json(path, lp.text);
  lp.spec = with_location(path, lp.text, [&] { return problem_from_json(j); });
  return lp;
}

void write_json(const fs::path& file, const json& j) {
  std::ofstream out(file);
  if (!out) throw InputError{file.string() + ": cannot write file"};
  out << j.dump(2) << '\n';
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw InputError{dir + ": cannot create output directory: " + ec.message()};
  return p;
}

struct RunOptions {
  std::string spec;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_iters;
  std::optional<double> tol;
  std::optional<std::size_t> stride;
};

int cmd_run(const RunOptions& o) {
  LoadedProblem lp = load_problem(o.spec);
  ProblemSpec& spec = lp.spec;
  if (o.out) spec.output_dir = *o.out;
  if (o.seed) spec.seed = *o.seed;
  if (o.max_iters) spec.stop.max_iters = *o.max_iters;
  if (o.tol) {
    if (spec.stop.target_tol && spec.reference_mode != "none") spec.stop.target_tol = *o.tol;
    else spec.stop.residual_tol = *o.tol;
  }
  if (o.stride) spec.stop.stride = *o.stride;
  with_location(lp.path, lp.text, [&] { spec.stop.validate(); });

  const Problem problem = with_location(lp.path, lp.text, [&] { return build_problem(spec); });
  spdlog::info("running {} over a {} sequence in dimension {}",
               problem.contraction ? "viscosity" : "halpern", spec.sequence.kind, spec.dimension);
  if (problem.oracle)
    spdlog::info("reference from {} oracle", to_string(problem.oracle->method));

  const IterationTrace trace = run_problem(problem);
  const fs::path dir = prepare_dir(spec.output_dir);
  {
    std::ofstream csv(dir / "trace.csv");
    if (!csv) throw InputError{(dir / "trace.csv").string() + ": cannot write file"};
    write_trace_csv(csv, trace, spec.stop.stride);
  }
  const json summary = run_summary(problem, trace);
  write_json(dir / "summary.json", summary);
  std::cout << summary.dump(2) << '\n';
  spdlog::info("stopped after {} iterations: {}", trace.iterations(), to_string(trace.stop_reason));
  return run_exit_code(trace) == 0 ? exit_ok : exit_max_iters;
}

int cmd_verify(const std::string& suite, const std::optional<std::string>& out, std::uint64_t seed) {
  std::vector<std::string> names;
  if (suite == "all") {
    names = suite_names();
  } else if (std::find(suite_names().begin(), suite_names().end(), suite) != suite_names().end()) {
    names = {suite};
  } else {
    throw InputError{"unknown suite '" + suite + "' (expected sns, nst, lemmas, oracle-crosscheck or all)"};
  }

  std::optional<fs::path> dir;
  if (out) dir = prepare_dir(*out);
  bool all_ok = true;
  json summary = json::array();
  for (const auto& name : names) {
    spdlog::info("suite {}", name);
    SuiteResult result;
    try {
      result = run_suite(name, seed);
    } catch (const HypothesisViolation& e) {
      spdlog::error("suite {}: {}", name, e.what());
      all_ok = false;
      summary.push_back({{"suite", name}, {"ok", false}, {"error", e.what()}});
      continue;
    }
    json reports = json::array();
    for (const auto& e : result.entries) {
      json r = to_json(e.report);
      r["expect_fail"] = e.expect_fail;
      r["ok"] = e.ok();
      reports.push_back(r);
      std::cout << (e.ok() ? "ok    " : "FAIL  ") << name << ' ' << e.report.property
                << " worst=" << format_double(e.report.worst_violation)
                << " tol=" << format_double(e.report.tolerance)
                << (e.expect_fail ? " (negative control)" : "") << '\n';
    }
    if (dir) write_json(*dir / (name + ".json"), reports);
    summary.push_back({{"suite", name}, {"ok", result.ok()}, {"entries", result.entries.size()}});
    all_ok = all_ok && result.ok();
  }
  if (dir && names.size() > 1) write_json(*dir / "summary.json", summary);
  std::cout << (all_ok ? "all suites passed" : "some suites failed") << '\n';
  return all_ok ? exit_ok : exit_invalid;
}

std::vector<ScheduleFamily> load_schedules(const std::string& path) {
  const std::string text = read_file(path);
  const json j = parse_json(path, text);
  return with_location(path, text, [&] {
    const json& list = j.is_object() ? io::field(j, "schedules", "") : j;
    if (!list.is_array()) throw SpecError("/schedules", "expected an array of schedules");
    std::vector<ScheduleFamily> families;
    const std::string base = j.is_object() ? "/schedules/" : "/";
    for (std::size_t i = 0; i < list.size(); ++i)
      families.push_back(schedule_family_from_json(list[i], base + std::to_string(i)));
    return families;
  });
}

int cmd_compare(const std::string& spec_path, const std::string& schedules_path,
                const std::optional<std::string>& out) {
  LoadedProblem lp = load_problem(spec_path);
  const auto families = load_schedules(schedules_path);
  if (out) lp.spec.output_dir = *out;
  const auto rows = with_location(schedules_path, read_file(schedules_path),
                                  [&] { return compare_schedules(lp.spec, families); });
  const fs::path dir = prepare_dir(lp.spec.output_dir);
  std::ofstream csv(dir / "compare.csv");
  if (!csv) throw InputError{(dir / "compare.csv").string() + ": cannot write file"};
  write_compare_csv(csv, rows);
  write_compare_csv(std::cout, rows);
  return exit_ok;
}

int cmd_oracle(const std::string& spec_path, const std::optional<std::string>& out) {
  LoadedProblem lp = load_problem(spec_path);
  lp.spec.reference_mode = "oracle";
  const Problem problem = with_location(lp.path, lp.text, [&] { return build_problem(lp.spec); });
  const json result = to_json(*problem.oracle);
  if (out) write_json(prepare_dir(*out) / "oracle.json", result);
  std::cout << result.dump(2) << '\n';
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Anchored fixed-point iterations with oracle-certified limits"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run = app.add_subcommand("run", "Run a problem file; writes trace.csv and summary.json");
  run->add_option("--spec", run_opts.spec, "Problem JSON file")->required();
  run->add_option("--out", run_opts.out, "Output directory");
  run->add_option("--seed", run_opts.seed, "RNG seed");
  run->add_option("--max-iters", run_opts.max_iters, "Iteration cap")->check(CLI::PositiveNumber);
  run->add_option("--tol", run_opts.tol, "Stopping tolerance (target_tol when set, else residual_tol)")->check(CLI::PositiveNumber);
  run->add_option("--stride", run_opts.stride, "Trace stride")->check(CLI::PositiveNumber);

  std::string suite;
  std::optional<std::string> verify_out;
  std::uint64_t verify_seed = 20240601;
  auto* verify = app.add_subcommand("verify", "Run a property suite");
  verify->add_option("suite", suite, "sns, nst, lemmas, oracle-crosscheck or all")->required();
  verify->add_option("--out", verify_out, "Directory for JSON reports");
  verify->add_option("--seed", verify_seed, "RNG seed");

  std::string compare_spec, compare_schedules_path;
  std::optional<std::string> compare_out;
  auto* compare = app.add_subcommand("compare", "Iterations-to-tolerance per alpha schedule");
  compare->add_option("--spec", compare_spec, "Problem JSON file")->required();
  compare->add_option("--schedules", compare_schedules_path, "JSON list of alpha schedules")->required();
  compare->add_option("--out", compare_out, "Output directory");

  std::string oracle_spec;
  std::optional<std::string> oracle_out;
  auto* oracle = app.add_subcommand("oracle", "Independent reference limit of a problem");
  oracle->add_option("--spec", oracle_spec, "Problem JSON file")->required();
  oracle->add_option("--out", oracle_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_invalid;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*verify) return cmd_verify(suite, verify_out, verify_seed);
    if (*compare) return cmd_compare(compare_spec, compare_schedules_path, compare_out);
    if (*oracle) return cmd_oracle(oracle_spec, oracle_out);
  } catch (const InputError& e) {
    spdlog::error("{}", e.message);
    return exit_invalid;
  } catch (const EmptyIntersection& e) {
    spdlog::error("{}", e.what());
    return exit_invalid;
  } catch (const std::exception& e) {
    spdlog::critical("{}", e.what());
    return exit_invalid;
  }
  return exit_invalid;
}
