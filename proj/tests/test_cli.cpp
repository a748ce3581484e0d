#include <gtest/gtest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "cli_runner.hpp"
#include "pqlap/io.hpp"

using namespace cli_test;
namespace fs = std::filesystem;

namespace {

std::string out_flag(const fs::path& d) { return "--out " + d.string(); }

std::vector<std::vector<double>> csv_rows(const fs::path& p, std::vector<std::string>* header = nullptr) {
  std::istringstream in(slurp(p));
  std::string line;
  std::getline(in, line);
  if (header) {
    std::istringstream hs(line);
    for (std::string c; std::getline(hs, c, ',');) header->push_back(c);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> row;
    for (std::string c; std::getline(ls, c, ',');) row.push_back(std::stod(c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST(Cli, ManufacturedDirichletSolveIsLinear) {
  const auto d = scratch_dir("solve_dnd");
  const auto cfg = write_file(d / "c.yaml",
                              "problem: {kind: dnd, p: 3.0, q: 2.0, mu: 1.0, beta: 0.0, b: 1.0}\n"
                              "mesh: {n: 16}\nsolver: {tolerance: 1.0e-12}\n");
  const auto r = run_pqlap("solve --config " + cfg.string() + " " + out_flag(d / "out"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("V-norm"), std::string::npos);
  EXPECT_NE(r.output.find("energy"), std::string::npos);

  const auto mesh = pqlap::build_unit_square_mesh(16);
  std::ifstream in(d / "out" / "solution.txt");
  const auto u = pqlap::read_nodal(in, mesh);
  double err = 0.0;
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
    err = std::max(err, std::abs(u[static_cast<Eigen::Index>(i)] - mesh.nodes()[i].x));
  EXPECT_LE(err, 1e-9);
  EXPECT_TRUE(fs::exists(d / "out" / "solve.log"));
  EXPECT_TRUE(fs::exists(d / "out" / "summary.json"));
}

TEST(Cli, ExponentOrderViolationIsConfigError) {
  const auto d = scratch_dir("bad_q");
  const auto cfg = write_file(d / "c.yaml", "problem:\n  p: 2.0\n  q: 2.5\n");
  const auto r = run_pqlap("solve --config " + cfg.string() + " " + out_flag(d / "out"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("problem.q"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("1 < q < p"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find(":3:"), std::string::npos) << "line of the offending key: " << r.output;
}

TEST(Cli, SupercriticalThetaIsConfigError) {
  const auto d = scratch_dir("bad_theta");
  const auto cfg = write_file(d / "c.yaml", "problem: {p: 1.5, q: 1.2, theta: 6.5}\n");
  const auto r = run_pqlap("solve --config " + cfg.string() + " " + out_flag(d / "out"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("problem.theta"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("subcritical"), std::string::npos) << r.output;
}

TEST(Cli, UnknownKeyIsConfigError) {
  const auto d = scratch_dir("unknown_key");
  const auto cfg = write_file(d / "c.yaml", "solver:\n  tolerence: 1.0e-9\n");
  const auto r = run_pqlap("solve --config " + cfg.string() + " " + out_flag(d / "out"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("solver.tolerence"), std::string::npos) << r.output;
}

TEST(Cli, MissingConfigFileIsConfigError) {
  const auto d = scratch_dir("missing_file");
  const auto r = run_pqlap("solve --config " + (d / "nope.yaml").string());
  EXPECT_EQ(r.status, 2);
}

TEST(Cli, SolverFailureExitsThree) {
  const auto d = scratch_dir("solver_failure");
  const auto cfg = write_file(d / "c.yaml",
                              "problem: {kind: dnn, p: 4.0, q: 2.5, mu: 0.5, beta: 1.0, theta: 3.0, alpha: 50.0}\n"
                              "source: {g: -3.0, r: 1.0}\n"
                              "solver: {max_iterations: 1, tolerance: 1.0e-14}\n");
  const auto r = run_pqlap("solve --config " + cfg.string() + " " + out_flag(d / "out"));
  EXPECT_EQ(r.status, 3) << r.output;
  EXPECT_TRUE(fs::exists(d / "out" / "solve.log"));
}

TEST(Cli, DefaultVerifyPassesWithFullSweepTable) {
  const auto d = scratch_dir("verify_default");
  const auto r = run_pqlap("verify " + out_flag(d));
  ASSERT_EQ(r.status, 0) << r.output;
  std::vector<std::string> header;
  const auto rows = csv_rows(d / "sweep.csv", &header);
  EXPECT_EQ(header.front(), "alpha");
  EXPECT_EQ(rows.size(), 7u);
  EXPECT_TRUE(fs::exists(d / "verify.json"));
}

TEST(Cli, RandomVerifyPasses) {
  const auto d = scratch_dir("verify_random");
  const auto cfg = write_file(d / "c.yaml", "sweep: {mode: random, count: 3, tau: 1.0e-6}\nmesh: {n: 8}\nseed: 11\n");
  const auto r = run_pqlap("verify --config " + cfg.string() + " " + out_flag(d / "out"));
  EXPECT_EQ(r.status, 0) << r.output;
  for (const char* f : {"sweep_000.csv", "sweep_001.csv", "sweep_002.csv"}) EXPECT_TRUE(fs::exists(d / "out" / f));
}

TEST(Cli, ReversedAlphaScheduleIsRejected) {
  const auto d = scratch_dir("reversed");
  const auto cfg = write_file(d / "c.yaml", "sweep:\n  checks: [monotone]\n  alphas: [10.0, 1.0]\n");
  const auto r = run_pqlap("verify --config " + cfg.string() + " " + out_flag(d / "out"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("sweep.alphas"), std::string::npos) << r.output;
}

TEST(Cli, DegenerateAsymptoticsIsIdenticallyZero) {
  const auto d = scratch_dir("degenerate");
  const auto cfg = write_file(d / "c.yaml",
                              "mesh: {n: 6}\ncontrol:\n  mode: asymptotics\n  lambda: 0.0\n  rho: 1.0\n"
                              "  grid: [2, 2]\n  alphas: [1, 10, 100]\n");
  const auto r = run_pqlap("asymptotics --config " + cfg.string() + " " + out_flag(d / "out"));
  ASSERT_EQ(r.status, 0) << r.output;
  std::vector<std::string> header;
  const auto rows = csv_rows(d / "out" / "asymptotics.csv", &header);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& row : rows) {
    EXPECT_EQ(row[1], 0.0);
    EXPECT_EQ(row[3], 0.0);
  }
}

TEST(Cli, ReachableControlDescends) {
  const auto d = scratch_dir("reachable");
  const auto cfg = write_file(d / "c.yaml",
                              "problem: {p: 2.0, q: 1.5, alpha: 100.0}\nmesh: {n: 8}\n"
                              "control:\n  governing: dnn\n  z_d: {source: reachable, g_tilde: -1.0}\n"
                              "  rho: 1.0e-2\n  grid: [2, 2]\n  optimizer: {method: lbfgs, starts: 2}\n");
  const auto r = run_pqlap("control --config " + cfg.string() + " " + out_flag(d / "out"));
  ASSERT_EQ(r.status, 0) << r.output;
  const auto j = nlohmann::json::parse(slurp(d / "out" / "control.json"));
  EXPECT_LT(j["value"].get<double>(), j["value_at_zero"].get<double>());
  EXPECT_TRUE(fs::exists(d / "out" / "control.csv"));
  EXPECT_TRUE(fs::exists(d / "out" / "optimizer_log.csv"));
}

TEST(Cli, MissingTargetIsConfigError) {
  const auto d = scratch_dir("missing_zd");
  const auto cfg = write_file(d / "c.yaml", "control:\n  lambda: 1.0\n  rho: 1.0\n");
  const auto r = run_pqlap("control --config " + cfg.string() + " " + out_flag(d / "out"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("control.z_d"), std::string::npos) << r.output;
}

TEST(Cli, CsvFilesCarryMetadataBlock) {
  const auto d = scratch_dir("metadata");
  ASSERT_EQ(run_pqlap("verify --mesh-n 6 " + out_flag(d)).status, 0);
  const std::string text = slurp(d / "sweep.csv");
  for (const char* key : {"# config_hash: ", "# pqlap_version: ", "# eigen_version: ", "# seed: "})
    EXPECT_NE(text.find(key), std::string::npos) << key;
  EXPECT_EQ(text.find("time"), std::string::npos);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  const auto d = scratch_dir("determinism");
  const auto cfg = write_file(d / "c.yaml", "sweep: {mode: random, count: 2}\nmesh: {n: 6}\n");
  for (const char* o : {"a", "b"})
    ASSERT_EQ(run_pqlap("sweep --config " + cfg.string() + " --seed 5 --threads 1 " + out_flag(d / o)).status, 0);
  for (const char* f : {"sweep_000.csv", "sweep_001.csv", "sweep.json"})
    EXPECT_EQ(slurp(d / "a" / f), slurp(d / "b" / f)) << f;
}

TEST(Cli, MeshInfoRoundTrips) {
  const auto d = scratch_dir("mesh_info");
  const auto r = run_pqlap("mesh-info --mesh-n 5 " + out_flag(d));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("nodes 36"), std::string::npos) << r.output;
  std::ifstream in(d / "mesh.txt");
  const auto m = pqlap::read_mesh(in);
  EXPECT_EQ(m.num_triangles(), 50u);
}

TEST(Cli, MissingSubcommandIsUsageError) { EXPECT_EQ(run_pqlap("").status, 2); }
