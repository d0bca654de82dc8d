#include <sstream>

#include <gtest/gtest.h>

#include "fixedpoint/io.hpp"

using namespace fixedpoint;

namespace {

std::string pointer_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const SpecError& e) {
    return e.pointer();
  }
  return "<no error>";
}

}  // namespace

TEST(Json, VectorRoundTrip) {
  const Vector v{1.5, -2.0, 1e-300};
  EXPECT_EQ(vector_from_json(to_json(v)), v);
  EXPECT_EQ(pointer_of([] { vector_from_json(json::parse(R"([1, "x"])"), "/anchor"); }), "/anchor/1");
  EXPECT_EQ(pointer_of([] { vector_from_json(json::parse("{}"), "/anchor"); }), "/anchor");
  EXPECT_EQ(pointer_of([] { vector_from_json(json::array(), "/anchor"); }), "/anchor");
}

TEST(Json, SetRoundTrip) {
  const std::vector<ConvexSet> sets{
      make_halfspace(Vector{1.0, 2.0}, 0.5),
      make_ball(Vector{0.0, 1.0}, 2.0),
      make_box(Vector{-1.0, -1.0}, Vector{1.0, 2.0}),
      make_affine(Vector{0.0, 0.0, 1.0}, {Vector{0.0, 0.0, 1.0}}),
      make_intersection({make_halfspace(Vector{1.0, 0.0}, 0.0), make_ball(Vector{0.0, 0.0}, 1.0)}),
  };
  for (const auto& s : sets) {
    const json j = to_json(s);
    EXPECT_EQ(to_json(set_from_json(j)), j) << j.dump();
  }
}

TEST(Json, SetErrorsCarryPointers) {
  EXPECT_EQ(pointer_of([] { set_from_json(json::parse(R"({"type": "ball", "center": [0], "radius": -1})"), "/s"); }),
            "/s/radius");
  EXPECT_EQ(pointer_of([] { set_from_json(json::parse(R"({"type": "blob"})"), "/s"); }), "/s/type");
  EXPECT_EQ(pointer_of([] { set_from_json(json::parse(R"({"type": "halfspace", "a": [0, 0], "b": 1})"), "/s"); }),
            "/s");
  EXPECT_EQ(pointer_of([] { set_from_json(json::parse(R"({"type": "halfspace", "a": [1]})"), "/s"); }), "/s/b");
  EXPECT_EQ(pointer_of([] {
              set_from_json(json::parse(R"({"type": "intersection", "sets": [{"type": "box", "lo": [1], "hi": [0]}]})"),
                            "/s");
            }),
            "/s/sets/0");
}

TEST(Json, FunctionRoundTrip) {
  for (const ScalarFunction& f : {ScalarFunction{AbsValue{}}, make_quadratic(2.0, -1.0), make_indicator(0.0, 3.0)}) {
    const json j = to_json(f);
    EXPECT_EQ(to_json(function_from_json(j)), j);
  }
  EXPECT_EQ(to_json(function_from_json(json::parse(R"({"type": "quadratic", "curvature": 1})"))),
            to_json(make_quadratic(1.0, 0.0)));
  EXPECT_EQ(pointer_of([] { function_from_json(json::parse(R"({"type": "quadratic", "curvature": 0})"), "/f"); }),
            "/f/curvature");
  EXPECT_EQ(pointer_of([] { function_from_json(json::parse(R"({"type": "log"})"), "/f"); }), "/f/type");
}

TEST(Json, ScheduleRoundTrip) {
  const std::vector<ScheduleFamily> families{
      PowerFamily{2.0, 0.7, 1.0}, ConstantFamily{0.5}, HarmonicShiftedFamily{3.0},
      CustomFamily{{0.5, 0.25}, {true, true, false, true}}};
  for (const auto& f : families) {
    const json j = to_json(f);
    EXPECT_EQ(to_json(schedule_family_from_json(j)), j);
  }
  const Schedule s = schedule_from_json(json::parse(R"({"family": "power", "p": 1})"), ScheduleRole::alpha);
  EXPECT_DOUBLE_EQ(s(1), 0.5);
}

TEST(Json, ScheduleErrors) {
  try {
    schedule_from_json(json::parse(R"({"family": "power", "p": 2})"), ScheduleRole::alpha, "/alpha");
    FAIL();
  } catch (const SpecError& e) {
    EXPECT_EQ(e.pointer(), "/alpha");
    EXPECT_NE(std::string(e.what()).find("diverge"), std::string::npos);
  }
  EXPECT_EQ(pointer_of([] { schedule_family_from_json(json::parse(R"({"family": "power"})"), "/alpha"); }),
            "/alpha/p");
  EXPECT_EQ(pointer_of([] { schedule_family_from_json(json::parse(R"({"family": "fib"})"), "/alpha"); }),
            "/alpha/family");
  EXPECT_EQ(pointer_of([] {
              schedule_family_from_json(json::parse(R"({"family": "custom", "values": [0.5], "flags": {"sum_diverges": 1}})"),
                                        "/alpha");
            }),
            "/alpha/flags/sum_diverges");
}

TEST(Json, ReportsSerialise) {
  ProbeReport r;
  r.property = "p";
  r.witness = std::make_pair(Vector{1.0}, Vector{2.0});
  r.finalize();
  const json j = to_json(r);
  EXPECT_EQ(j.at("witness"), json::parse("[[1.0], [2.0]]"));
  EXPECT_TRUE(j.at("pass").get<bool>());
  EXPECT_FALSE(j.contains("note"));

  const OracleResult o{Vector{0.0, 0.0}, OracleMethod::dykstra, 1e-8, false, 0.0, 0.0};
  EXPECT_EQ(to_json(o).at("method"), "dykstra");
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(1e-300), "1e-300");
  for (double v : {1.0 / 3.0, 2.0 / 7.0, 1e10 + 0.5, -4.25e-7}) EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(TraceCsv, HeaderRowsAndStride) {
  IterationTrace t;
  for (int i = 0; i < 7; ++i) {
    t.residual_S.push_back(1.0 / (i + 1));
    t.residual_T.push_back(0.5);
  }
  std::ostringstream full;
  write_trace_csv(full, t);
  std::istringstream in(full.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "n,residual_S,residual_T,dist_to_ref");
  std::getline(in, line);
  EXPECT_EQ(line, "1,1,0.5,");
  std::size_t rows = 1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 7u);

  t.dist_to_ref.assign(7, 0.25);
  std::ostringstream strided;
  write_trace_csv(strided, t, 3);
  EXPECT_EQ(strided.str(), "n,residual_S,residual_T,dist_to_ref\n"
                           "1,1,0.5,0.25\n"
                           "3," + format_double(1.0 / 3.0) + ",0.5,0.25\n"
                           "6," + format_double(1.0 / 6.0) + ",0.5,0.25\n"
                           "7," + format_double(1.0 / 7.0) + ",0.5,0.25\n");
  std::ostringstream bad;
  EXPECT_THROW(write_trace_csv(bad, t, 0), std::invalid_argument);
}

TEST(TraceSummary, Fields) {
  IterationTrace t;
  t.residual_S = {1.0, 0.5};
  t.residual_T = {1.0, 0.25};
  t.final_iterate = Vector{3.0};
  t.stop_reason = StopReason::residual_met;
  const json j = trace_summary(t);
  EXPECT_EQ(j.at("stop_reason"), "residual_met");
  EXPECT_EQ(j.at("iters"), 2);
  EXPECT_EQ(j.at("final_residual"), 0.25);
  EXPECT_TRUE(j.at("final_dist").is_null());
}
