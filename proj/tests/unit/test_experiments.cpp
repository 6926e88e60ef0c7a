#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "vcplab/experiments.hpp"

using namespace vcplab;
using nlohmann::json;

namespace {

std::string csv_of(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

std::map<std::string, ResultRow> by_metric(const std::vector<ResultRow>& rows) {
  std::map<std::string, ResultRow> out;
  for (const auto& r : rows) {
    std::string key = r.metric;
    if (r.L) key += "@" + std::to_string(*r.L);
    out[key] = r;
  }
  return out;
}

}  // namespace

TEST(Config, ParsesGridsAndSeeds) {
  const ExperimentConfig c = parse_config(json::parse(R"({
    "experiment": "fig3c", "N": 3, "D": {"start": 20, "stop": 60, "count": 3},
    "p": [0.001, 0.002], "L": 1, "seeds": {"start": 7, "count": 3}, "output": "out.csv"})"));
  EXPECT_EQ(c.D, (std::vector<int>{20, 40, 60}));
  EXPECT_EQ(c.p, (std::vector<double>{0.001, 0.002}));
  EXPECT_EQ(c.L, (std::vector<int>{1}));
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{7, 8, 9}));
  EXPECT_EQ(c.output, "out.csv");
  EXPECT_EQ(c.alpha, 5.0);
}

TEST(Config, NoiseForms) {
  const ExperimentConfig a = parse_config(json::parse(R"({"experiment": "variance-mc", "noise": "I 0.8\nZ 0.2"})"));
  const ExperimentConfig b = parse_config(json::parse(R"({"experiment": "variance-mc", "noise": {"I": 0.8, "Z": 0.2}})"));
  ASSERT_TRUE(a.noise && b.noise);
  EXPECT_EQ(max_abs_diff(*a.noise, *b.noise), 0.0);
  EXPECT_EQ(a.output, "variance-mc.csv");
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config(json::parse(R"({"experiment": "fig9"})")), InvalidArgument);
  EXPECT_THROW(parse_config(json::parse(R"({"experiment": "fig7", "colour": 1})")), InvalidArgument);
  EXPECT_THROW(parse_config(json::parse(R"({"experiment": "fig3c", "D": [20], "p": [0.01]})")), InvalidArgument);
  EXPECT_THROW(parse_config(json::parse(R"({"experiment": "fig3c", "D": [], "p": [0.01], "seeds": [1]})")),
               InvalidArgument);
  EXPECT_THROW(parse_config(json::parse(R"({"experiment": "fig3b", "D": [30], "p": [0.01], "seeds": [1]})")),
               InvalidArgument);
  EXPECT_THROW(parse_config(json::parse(R"({"experiment": "fig3e", "D": [20], "p": [0.01], "seeds": [1], "L": [0]})")),
               InvalidArgument);
  EXPECT_THROW(parse_config(json::parse(R"({"experiment": "fig7", "P": []})")), InvalidArgument);
  EXPECT_THROW(parse_config(json::parse(R"({"experiment": "fig7", "M": 1, "P": [0.1]})")), InvalidArgument);
  EXPECT_THROW(load_config("/nonexistent/config.json"), InvalidArgument);
}

TEST(Config, SeedOverride) {
  ExperimentConfig c = parse_config(json::parse(R"({"experiment": "fig3c", "D": [4], "p": [0.01], "seeds": [5, 9]})"));
  override_seed(c, 100);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{100, 101}));
  EXPECT_EQ(c.seed, 100u);
}

TEST(Summaries, MeanAndStandardError) {
  const Summary s = summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.stderr_, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_EQ(s.n, 4);
  EXPECT_TRUE(std::isnan(summarize({}).mean));
  const Summary r = ratio_of_means({2.0, 4.0}, {1.0, 2.0});
  EXPECT_DOUBLE_EQ(r.mean, 2.0);
  // Perfectly proportional pairs carry no ratio uncertainty.
  EXPECT_NEAR(r.stderr_, 0.0, 1e-12);
}

TEST(Summaries, DegenerateReplicatesAreFlagged) {
  std::vector<ResultRow> rows;
  ResultRow base;
  base.metric = "infid_vcp";
  detail::add_summary(rows, base, {0.1, std::nullopt, 0.3});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].value, 0.2);
  EXPECT_EQ(rows[0].n, 2);
  EXPECT_NE(rows[0].error.find("1 replicate"), std::string::npos);
}

TEST(Circuits, SameSeedSameCircuit) {
  const Circuit a = build_random_circuit(3, 5, 0.01, 77), b = build_random_circuit(3, 5, 0.01, 77);
  const Circuit c = build_random_circuit(3, 5, 0.01, 78);
  ASSERT_EQ(a.size(), b.size());
  double diff_same = 0, diff_other = 0;
  for (std::size_t t = 0; t < a.size(); ++t)
    for (std::size_t g = 0; g < a[t].ops.size(); ++g) {
      if (a[t].ops[g].gate.matrix.size() == 0) continue;
      diff_same += max_abs_diff(a[t].ops[g].gate.matrix, b[t].ops[g].gate.matrix);
      diff_other += max_abs_diff(a[t].ops[g].gate.matrix, c[t].ops[g].gate.matrix);
    }
  EXPECT_EQ(diff_same, 0.0);
  EXPECT_GT(diff_other, 0.1);
}

TEST(Circuits, NoiselessPointIsExact) {
  const CircuitPoint pt = run_circuit_point(3, 6, 0.0, 0.0, 5, {1, 2, 3}, 2);
  EXPECT_NEAR(pt.raw, 0.0, 1e-12);
  ASSERT_TRUE(pt.vsp);
  EXPECT_NEAR(*pt.vsp, 0.0, 1e-12);
  for (int L : {1, 2, 3}) {
    ASSERT_TRUE(pt.vcp.at(L));
    EXPECT_NEAR(*pt.vcp.at(L), 0.0, 1e-12);
  }
}

TEST(Circuits, FaultRateOfReferenceSetting) {
  EXPECT_NEAR(BudgetParams::depolarizing_preset(4, 80, 0.005).lambda(), 1.6, 1e-15);
}

TEST(Runners, Fig3bSmall) {
  const ExperimentConfig c = parse_config(json::parse(
      R"({"experiment": "fig3b", "N": 2, "D": [2, 4], "layer_depth": 2, "p": [0.01], "seeds": [1, 2]})"));
  const auto rows = run_experiment(c);
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.n, 2);
    EXPECT_TRUE(r.error.empty());
    if (r.metric == "infid_vcp") { EXPECT_EQ(*r.L, *r.D / 2); }
  }
  // The incremental runner agrees with the one-shot circuit point.
  const CircuitPoint pt = run_circuit_point(2, 4, 0.01, 0.05, 1, {2}, 2);
  const CircuitPoint pt2 = run_circuit_point(2, 4, 0.01, 0.05, 2, {2}, 2);
  for (const auto& r : rows)
    if (*r.D == 4) {
      if (r.metric == "infid_raw") { EXPECT_NEAR(r.value, (pt.raw + pt2.raw) / 2, 1e-12); }
      if (r.metric == "infid_vsp") { EXPECT_NEAR(r.value, (*pt.vsp + *pt2.vsp) / 2, 1e-12); }
      if (r.metric == "infid_vcp") { EXPECT_NEAR(r.value, (*pt.vcp.at(2) + *pt2.vcp.at(2)) / 2, 1e-12); }
    }
}

TEST(Runners, Fig3GridMetrics) {
  const ExperimentConfig c = parse_config(json::parse(
      R"({"experiment": "fig3fg", "N": 2, "D": [6], "p": [0.01], "L": [1, 2, 3], "seeds": [3, 4, 5]})"));
  const auto m = by_metric(run_experiment(c));
  EXPECT_TRUE(m.count("infid_raw") && m.count("infid_vsp"));
  for (int L : {1, 2, 3}) EXPECT_TRUE(m.count("infid_vcp@" + std::to_string(L)));
  ASSERT_TRUE(m.count("L_optimal"));
  const int best = static_cast<int>(m.at("L_optimal").value);
  for (int L : {1, 2, 3}) EXPECT_LE(m.at("infid_vcp@" + std::to_string(best)).value, m.at("infid_vcp@" + std::to_string(L)).value);
  EXPECT_TRUE(m.count("ratio_vsp_over_vcp_single@1"));
  EXPECT_TRUE(m.count("ratio_vsp_over_vcp_optimal@" + std::to_string(best)));
}

TEST(Runners, Fig3dDisablesGateNoise) {
  const ExperimentConfig c = parse_config(json::parse(
      R"({"experiment": "fig3d", "N": 2, "D": [4], "p": [0.01], "L": [1], "seeds": [3]})"));
  const auto m = by_metric(run_experiment(c));
  EXPECT_NEAR(m.at("infid_raw").value, 0.0, 1e-12);
  EXPECT_GT(m.at("infid_vcp@1").value, 0.0);
}

TEST(Runners, ThreadCountDoesNotChangeOutput) {
  const ExperimentConfig c = parse_config(json::parse(
      R"({"experiment": "fig3c", "N": 2, "D": [4, 6], "p": [0.005, 0.02], "L": [1, 2], "seeds": [1, 2, 3]})"));
  EXPECT_EQ(csv_of(run_experiment(c, 1)), csv_of(run_experiment(c, 3)));
}

TEST(Runners, Fig7) {
  const ExperimentConfig c = parse_config(json::parse(R"({"experiment": "fig7", "qubits": [1], "P": [0.6666666666666666]})"));
  const auto m = by_metric(run_experiment(c));
  EXPECT_NEAR(m.at("F_direct").value, 0.5, 1e-12);
  EXPECT_NEAR(m.at("F_purified").value, 0.5625, 1e-12);
  EXPECT_NEAR(m.at("F_virtual").value, 0.75, 1e-12);
  EXPECT_NEAR(m.at("success_probability").value, (1 + 0.5 * 0.5 + 3 * (1.0 / 36)) / 2, 1e-12);
  const ExperimentConfig c2 = parse_config(json::parse(R"({"experiment": "fig7", "qubits": [1], "P": [0.5, 0.7]})"));
  for (const auto& r : run_experiment(c2))
    if (r.metric == "activation") { EXPECT_EQ(r.value, *r.P == 0.7 ? 1.0 : 0.0); }
}

TEST(Runners, BudgetTableAndFigA6) {
  const ExperimentConfig c = parse_config(
      json::parse(R"({"experiment": "budget-table", "N": 1, "D": [200], "p": [0.01], "L": [2], "n_c": [4], "n_s": [1]})"));
  const auto m = by_metric(run_experiment(c));
  EXPECT_NEAR(m.at("P_c_cir[n_c=4,n_s=1]@2").value, 0.189809, 1e-6);
  EXPECT_EQ(m.at("L_star_numeric[n_c=4,n_s=1]").value, 1.0);
  const ExperimentConfig a = parse_config(json::parse(R"({"experiment": "figA6", "N": 1, "D": [200], "p": [0.01]})"));
  const auto ma = by_metric(run_experiment(a));
  EXPECT_NEAR(ma.at("L_star_closed_form").value, optimal_layers(BudgetParams::depolarizing_preset(1, 200, 0.01)).closed_form.value_or(-1), 1e-12);
}

TEST(Runners, QecMergeAndDetectors) {
  const auto q = by_metric(run_experiment(parse_config(json::parse(R"({"experiment": "qec-merge", "samples": 2})"))));
  EXPECT_LT(q.at("max_diff_merge").value, 1e-10);
  EXPECT_NEAR(q.at("sampling_factor_merge").value, 1 / (0.52 * 0.52), 1e-9);
  const auto d = by_metric(run_experiment(parse_config(json::parse(R"({"experiment": "detectors", "samples": 3})"))));
  EXPECT_NEAR(d.at("coherent_minus_probability_00").value, 0.09, 1e-12);
}

TEST(Runners, VarianceMcSmall) {
  const auto m = by_metric(run_experiment(
      parse_config(json::parse(R"({"experiment": "variance-mc", "shots": 20000, "bootstrap": 50, "seed": 3})"))));
  EXPECT_NEAR(m.at("variance_formula").value, 0.581259 / 20000, 1e-8);
  EXPECT_NEAR(m.at("C_em").value, 1 / (0.82 * 0.82), 1e-12);
  EXPECT_NEAR(m.at("estimate_exact").value, 0.8 / 0.82, 1e-12);
}

TEST(Schema, RunnersEmitDeclaredColumnsAndMetrics) {
  std::ifstream in(std::string(VCPLAB_SOURCE_DIR) + "/schema/results.schema.json");
  ASSERT_TRUE(in);
  const json schema = json::parse(in);
  std::vector<std::string> cols;
  for (const auto& c : schema.at("columns")) cols.push_back(c.at("name"));
  EXPECT_EQ(cols, csv_columns());
  const std::vector<std::string> cheap{
      R"({"experiment": "fig3c", "N": 2, "D": [2], "p": [0.01], "seeds": [1]})",
      R"({"experiment": "fig3fg", "N": 2, "D": [2], "p": [0.01], "L": [1, 2], "seeds": [1]})",
      R"({"experiment": "figA6", "N": 2, "D": [4], "p": [0.01], "L": [1, 2], "seeds": [1], "simulate": true})",
      R"({"experiment": "fig7", "P": [0.5]})",
      R"({"experiment": "budget-table", "N": 2, "D": [10], "p": [0.01], "L": [1]})",
      R"({"experiment": "variance-mc", "shots": 100, "bootstrap": 2})",
      R"({"experiment": "qec-merge", "samples": 1})",
      R"({"experiment": "detectors", "samples": 1})"};
  for (const auto& text : cheap) {
    const ExperimentConfig c = parse_config(json::parse(text));
    const auto& declared = schema.at("metrics").at(c.experiment);
    for (const auto& r : run_experiment(c)) {
      const std::string base = r.metric.substr(0, r.metric.find('['));
      EXPECT_NE(std::find(declared.begin(), declared.end(), base), declared.end()) << c.experiment << " " << r.metric;
    }
  }
}
