#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "lrising/sweep.hpp"

using namespace lrising;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SweepConfig small_config(const std::string& out, int workers) {
  SweepConfig cfg;
  cfg.theta = {0.0, 1.2, 5};
  cfg.alphas = {0.5, 2.0, kAlphaInf};
  cfg.n_spins = 6;
  cfg.workers = workers;
  cfg.out = out;
  return cfg;
}

}  // namespace

TEST(PhaseDiagram, ShapeAndColumnOrder) {
  auto records = run_phase_diagram(small_config("", 1));
  EXPECT_EQ(records.size(), 15u);  // 5 x 3 grid
  // theta-major order
  EXPECT_DOUBLE_EQ(records[0].theta, 0.0);
  EXPECT_DOUBLE_EQ(records[1].theta, 0.0);
  EXPECT_DOUBLE_EQ(records[2].theta, 0.0);
  EXPECT_DOUBLE_EQ(records[0].alpha, 0.5);
  EXPECT_DOUBLE_EQ(records[1].alpha, 2.0);
  RecordSchema schema;
  const std::string h = schema.csv_header();
  EXPECT_EQ(h.rfind("N,alpha,theta,T,f_x,f_y,f_z,f_x_st,f_y_st,f_z_st,best_label,xi2,gap,mu,nu,"
                    "phi_z,phi_z_st,",
                    0),
            0u);
  for (const auto& r : records) EXPECT_EQ(r.status, "ok");
}

TEST(PhaseDiagram, ThetaZeroColumnSeparable) {
  SweepConfig cfg;
  cfg.theta = {0.0, 0.0, 1};
  cfg.alphas = {1.0};
  cfg.sizes = {6, 8};
  cfg.n_spins = 8;
  auto records = run_phase_diagram(cfg);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_NEAR(*records[0].f_q[label_index({Axis::Y, false})], 1.0, 1e-9);
  EXPECT_NEAR(*records[0].f_q[label_index({Axis::Z, false})], 1.0, 1e-9);
  // scaling power ~ 0 on the separable line
  EXPECT_NEAR(*records[0].slope[label_index({Axis::Y, false})], 0.0, 1e-7);
}

TEST(PhaseDiagram, DeterministicAcrossWorkerCounts) {
  const std::string f1 = "sweep_w1.csv", f2 = "sweep_w2.csv";
  {
    RecordSchema schema;
    detail::RecordWriter w1(f1, schema, "csv", false);
    run_phase_diagram(small_config(f1, 1), &w1);
  }
  {
    RecordSchema schema;
    detail::RecordWriter w2(f2, schema, "csv", false);
    run_phase_diagram(small_config(f2, 2), &w2);
  }
  EXPECT_EQ(slurp(f1), slurp(f2));  // byte-identical
  std::remove(f1.c_str());
  std::remove(f2.c_str());
}

TEST(PhaseDiagram, ResumeProducesIdenticalBytes) {
  const std::string full = "sweep_full.csv", part = "sweep_part.csv";
  {
    RecordSchema schema;
    detail::RecordWriter w(full, schema, "csv", false);
    run_phase_diagram(small_config(full, 1), &w);
  }
  // truncate to header + 4 complete rows, then resume
  {
    std::ifstream in(full);
    std::ofstream out(part);
    std::string line;
    for (int i = 0; i < 5 && std::getline(in, line); ++i) out << line << '\n';
  }
  {
    RecordSchema schema;
    detail::RecordWriter w(part, schema, "csv", true);
    EXPECT_EQ(w.already_written(), 4u);
    run_phase_diagram(small_config(part, 2), &w);
  }
  EXPECT_EQ(slurp(full), slurp(part));
  std::remove(full.c_str());
  std::remove(part.c_str());
}

TEST(Serialization, InfAlphaAndRoundTrip) {
  SweepConfig cfg;
  cfg.theta = {0.3, 0.3, 1};
  cfg.alphas = {kAlphaInf};
  cfg.n_spins = 4;
  auto records = run_phase_diagram(cfg);
  RecordSchema schema;
  const std::string row = schema.csv_row(records[0]);
  EXPECT_NE(row.find(",inf,"), std::string::npos);
  const auto j = schema.json_row(records[0]);
  EXPECT_EQ(j["alpha"], "inf");
  EXPECT_EQ(j["schema"], std::string(kSweepSchema));
  EXPECT_EQ(j["version"], std::string(kVersion));
  // 17-significant-digit round trip
  const double theta = records[0].theta;
  EXPECT_EQ(std::stod(detail::format_double(theta)), theta);
  const double f = *records[0].f_q[label_index({Axis::Y, false})];
  EXPECT_EQ(std::stod(detail::format_double(f)), f);
}

TEST(Serialization, JsonNullsForUndefinedFields) {
  SweepRecord r;
  r.n_spins = 4;
  r.alpha = 1.0;
  r.theta = 0.0;
  RecordSchema schema;
  auto j = schema.json_row(r);
  EXPECT_TRUE(j["xi2"].is_null());
  EXPECT_TRUE(j["T"].is_null());
}

TEST(Thermal, RecordsOrderAndBoundColumn) {
  SweepConfig cfg;
  cfg.theta = {0.3, 0.9, 2};
  cfg.alphas = {3.0};
  cfg.temps = {0.05, 0.2, 1.0};
  cfg.n_spins = 6;
  cfg.workers = 2;
  auto records = run_thermal(cfg);
  ASSERT_EQ(records.size(), 6u);
  EXPECT_DOUBLE_EQ(records[0].theta, 0.3);
  EXPECT_DOUBLE_EQ(*records[0].temperature, 0.05);
  EXPECT_DOUBLE_EQ(*records[1].temperature, 0.2);
  EXPECT_DOUBLE_EQ(records[3].theta, 0.9);
  for (const auto& r : records) {
    ASSERT_EQ(r.status, "ok");
    ASSERT_TRUE(r.bound_eq9.has_value());
    EXPECT_GE(*r.bound_eq9, 0.0);
    EXPECT_LE(*r.bound_eq9, 1.0 + 1e-12);
    EXPECT_EQ(r.solver, "full");
  }
  // f_Q <= extensive bound and decreasing best value with T at fixed theta
  EXPECT_GE(*records[0].f_q[label_index({Axis::Y, false})],
            *records[2].f_q[label_index({Axis::Y, false})]);
}

TEST(Thermal, CapacityGuard) {
  SweepConfig cfg;
  cfg.theta = {0.3, 0.3, 1};
  cfg.alphas = {1.0};
  cfg.temps = {0.1};
  cfg.n_spins = 16;
  EXPECT_THROW(run_thermal(cfg), CapacityError);
}

TEST(Config, ValidationErrors) {
  SweepConfig cfg;
  cfg.theta = {0.0, 2.0, 4};  // beyond pi/2
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = SweepConfig{};
  cfg.n_spins = 7;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = SweepConfig{};
  cfg.n_spins = 26;
  EXPECT_THROW(cfg.validate(), CapacityError);
  cfg = SweepConfig{};
  cfg.format = "xml";
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(PointEvaluation, ThermallyRobustLongRangeParamagnet) {
  // LRPM witness survives small T: f_y(T = 0.05 J) stays above 1
  ChainParams p;
  p.n_spins = 8;
  p.alpha = 0.5;
  p.theta = 0.3;
  auto recs = evaluate_thermal_point(p, {0.05}, 1);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].status, "ok");
  EXPECT_GT(*recs[0].f_q[label_index({Axis::Y, false})], 1.0);
}

TEST(PointEvaluation, KnownValues) {
  ChainParams p;
  p.n_spins = 10;
  p.alpha = 2.0;
  p.theta = 0.0;
  auto r = evaluate_ground_point(p, 1);
  EXPECT_NEAR(*r.f_q[label_index({Axis::Y, false})], 1.0, 1e-9);
  EXPECT_NEAR(*r.f_q[label_index({Axis::Z, false})], 1.0, 1e-9);
  EXPECT_NEAR(*r.gap, 2.0, 1e-8);
  EXPECT_EQ(*r.mu, 1);
  EXPECT_NEAR(*r.phi_z, 0.0, 1e-9);
  EXPECT_NEAR(*r.xi2, 1.0, 1e-9);

  p.theta = 1.4;
  p.alpha = 1.0;
  p.n_spins = 12;
  r = evaluate_ground_point(p, 1);
  EXPECT_EQ(r.best_label, "z_st");
}
