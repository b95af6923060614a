#include "fsyn/errors.hpp"
#include "fsyn/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <numbers>
#include <random>

namespace fsyn {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(DesignJson, RoundTripIsBitExact) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  FourierDesign1D d{Variable::Epsilon, {}, true};
  for (int k = 0; k < 40; ++k) d.terms.push_back({k, u(rng) * std::pow(10.0, k % 7 - 3)});
  d.terms.push_back({40, 5e-324});
  EXPECT_EQ(std::get<FourierDesign1D>(design_from_json(to_json(Design{d}))), d);

  const FourierDesign2D j{{{0, 0, kPi}, {2, 1, -1.0 / 3.0}}};
  EXPECT_EQ(std::get<FourierDesign2D>(design_from_json(to_json(Design{j}))), j);

  const FourierDesign1D pos{Variable::Position, {{0, 0.1}, {3, 0.2}}, false};
  EXPECT_EQ(std::get<FourierDesign1D>(design_from_json(to_json(Design{pos}))), pos);
}

TEST(DesignJson, Schema) {
  const std::string text = to_json(Design{FourierDesign1D{Variable::Position, {{2, 0.5}}, false}});
  EXPECT_NE(text.find("\"variable\": \"position\""), std::string::npos);
  EXPECT_NE(text.find("\"divides_by_parameter\": false"), std::string::npos);
  EXPECT_NE(text.find("\"k\": 2"), std::string::npos);
}

TEST(DesignJson, RejectsMalformedDocuments) {
  for (const char* bad : {"", "{", "[]", R"({"variable": "time", "terms": []})",
                          R"({"variable": "epsilon", "terms": []})",
                          R"({"variable": "epsilon", "divides_by_parameter": true, "terms": [{"k": 1}]})",
                          R"({"variable": "epsilon", "divides_by_parameter": true, "terms": [{"k": -1, "beta": 1}]})",
                          R"({"variable": "epsilon", "divides_by_parameter": true, "terms": [{"k": 1.5, "beta": 1}]})",
                          R"({"variable": "epsilon", "divides_by_parameter": true,
                              "terms": [{"k": 1, "beta": 1}, {"k": 1, "beta": 2}]})",
                          R"({"variable": "joint", "terms": [{"k1": 0, "beta": 1}]})"}) {
    EXPECT_THROW(design_from_json(bad), MalformedInput) << bad;
  }
}

TEST(ProgramJson, RoundTripIsBitExact) {
  const FourierDesign1D d = design_1d(TargetProfile1D::uniform_epsilon(kPi / 2, 0.9), 5);
  const PulseProgram p = compile(d, Axis::X, 5 * kPi / 180);
  EXPECT_EQ(program_from_json(to_json(p)), p);

  const PulseProgram euler = compile_euler(Design{d}, Design{d}, Design{d}, 0.2);
  EXPECT_EQ(program_from_json(to_json(euler)), euler);

  PulseProgram bare;
  bare.beta0 = 0.1;
  bare.segments = {{SegmentKind::Grad, -3.0}};
  EXPECT_EQ(program_from_json(to_json(bare)), bare);
}

TEST(ProgramJson, RejectsMalformedDocuments) {
  for (const char* bad : {R"({"segments": []})", R"({"beta0": 0.1, "segments": {}})",
                          R"({"beta0": 0.1, "segments": [{"kind": "rf_z", "magnitude": 1}]})",
                          R"({"beta0": 0.1, "segments": [{"kind": "grad", "magnitude": "1"}]})",
                          R"({"beta0": 0.1, "segments": [], "provenance": 3})",
                          R"({"beta0": 0.1, "segments": [], "provenance": {"variable": "epsilon",
                              "divides_by_parameter": true, "terms": []}})"}) {
    EXPECT_THROW(program_from_json(bad), MalformedInput) << bad;
  }
}

TEST(StatesCsv, RoundTripIsBitExact) {
  const FourierDesign1D d = design_1d(slice_target(0.5, 0.75, kPi / 2), 12);
  const PulseProgram p = compile(d, Axis::Y, 0.2);
  const SimulationResult r =
      simulate_ensemble(p, EnsembleMesh(EnsembleMesh::uniform(0, 1, 17), {0.3, 1.0}), SpinState::ez());
  const std::string csv = states_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "s,eps,Mx,My,Mz");
  const SimulationResult back = states_from_csv(csv, SpinState::ez());
  EXPECT_EQ(back.mesh, r.mesh);
  ASSERT_EQ(back.final_states.size(), r.final_states.size());
  for (std::size_t i = 0; i < r.final_states.size(); ++i) {
    EXPECT_EQ(back.final_states[i].vector(), r.final_states[i].vector());
  }
  EXPECT_TRUE(back.propagators.empty());
  EXPECT_EQ(states_csv(back), csv);
}

TEST(StatesCsv, RejectsCorruptedFiles) {
  const std::string good = "s,eps,Mx,My,Mz\n0,1,0,0,1\n";
  EXPECT_NO_THROW(states_from_csv(good, SpinState::ez()));
  for (const char* bad : {"", "x,y\n0,1\n", "s,eps,Mx,My,Mz\n", "s,eps,Mx,My,Mz\n0,1,0,0\n",
                          "s,eps,Mx,My,Mz\n0,1,0,0,abc\n", "s,eps,Mx,My,Mz\n0,1,0,0,2\n",
                          "s,eps,Mx,My,Mz\n0,1,0,0,1\n0,0.5,0,0,1\n",
                          "s,eps,Mx,My,Mz\n0,0.5,0,0,1\n0,1,0,0,1\n1,0.5,0,0,1\n",
                          "s,eps,Mx,My,Mz\n0,1.5,0,0,1\n"}) {
    EXPECT_THROW(states_from_csv(bad, SpinState::ez()), MalformedInput) << bad;
  }
}

TEST(ReportCsv, HeaderAndRows) {
  const FigureRun run = figure_dataset(Figure::Fig3);
  const std::string csv = report_csv(*run.report);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "param,predicted_angle,achieved_angle,state_error,op_error");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 182);
}

TEST(Files, AtomicWriteAndRead) {
  const auto dir = std::filesystem::temp_directory_path() / "fsyn_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.txt";
  write_text_file_atomic(path, "first");
  write_text_file_atomic(path, "second\n");
  EXPECT_EQ(read_text_file(path), "second\n");
  EXPECT_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
  EXPECT_THROW(read_text_file(dir / "missing.txt"), MalformedInput);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace fsyn
