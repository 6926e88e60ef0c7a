#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vcplab/vcplab.hpp"

namespace fs = std::filesystem;
using namespace vcplab;

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir, int threads, std::optional<std::uint64_t> seed) {
  ExperimentConfig cfg = load_config(config_path);
  if (seed) override_seed(cfg, *seed);
  const auto rows = run_experiment(cfg, threads);
  fs::create_directories(out_dir);
  const fs::path out = fs::path(out_dir) / cfg.output;
  std::ofstream os(out, std::ios::binary);
  if (!os) throw Error("cannot write " + out.string());
  write_csv(os, rows);
  std::size_t failed = 0;
  for (const auto& r : rows) failed += !r.error.empty();
  std::cerr << "wrote " << rows.size() << " rows to " << out.string();
  if (failed) std::cerr << " (" << failed << " with errors)";
  std::cerr << "\n";
  return 0;
}

// Params file: BudgetParams fields, plus an optional "L" list (default 1..D).
int cmd_budget(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open params " + path);
  const nlohmann::json j = nlohmann::json::parse(in, nullptr, true, true);
  const std::vector<nlohmann::json> sets = j.is_array() ? j.get<std::vector<nlohmann::json>>() : std::vector{j};
  std::vector<ResultRow> rows;
  for (const auto& s : sets) {
    BudgetParams b;
    if (s.contains("lambda")) {
      b = BudgetParams::from_lambda(s.at("lambda").get<double>(), s.value("D", b.D), s.value("alpha", b.alpha),
                                    s.value("M", b.M), s.value("n_c", b.n_c), s.value("n_s", b.n_s), s.value("N", 1));
    } else {
      b = {s.value("N", b.N), s.value("D", b.D), s.value("p", b.p), s.value("alpha", b.alpha),
           s.value("M", b.M), s.value("n_c", b.n_c), s.value("n_s", b.n_s)};
    }
    b.validate();
    std::vector<int> Ls;
    if (s.contains("L")) Ls = s.at("L").get<std::vector<int>>();
    else
      for (int L = 1; L <= b.D; ++L) Ls.push_back(L);
    ResultRow base;
    base.experiment = "budget";
    base.N = b.N;
    base.M = b.M;
    base.D = b.D;
    base.p = b.p;
    base.alpha = b.alpha;
    for (int L : Ls) {
      if (L < 1 || L > b.D) throw InvalidArgument("L must lie in [1, D]");
      const VcpBudget vb = vcp_budget(b, L);
      for (auto [name, v] : {std::pair{"P_c_cir", vb.P_c_cir}, {"P_c_sw", vb.P_c_sw}, {"P_c_tot", vb.P_c_tot},
                             {"P_c_tot_union", vb.P_c_tot_union}}) {
        ResultRow r = base;
        r.L = L;
        r.metric = name;
        r.value = v;
        rows.push_back(r);
      }
    }
    if (b.p > 0.0) {
      const OptimalLayers ol = optimal_layers(b);
      ResultRow r = base;
      r.metric = "L_star_numeric";
      r.value = ol.numeric;
      rows.push_back(r);
      r.metric = "L_star_closed_form";
      r.value = ol.closed_form.value_or(std::nan(""));
      if (!ol.closed_form) r.error = "closed form outside its domain";
      rows.push_back(r);
    }
  }
  write_csv(std::cout, rows);
  return 0;
}

int cmd_validate(const ValidationOptions& opt) {
  int failed = 0;
  for (const auto& c : primary_criteria()) {
    const CriterionResult r = c.run(opt);
    std::printf("[%s] %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    std::fflush(stdout);
    failed += !r.pass;
  }
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vcplab: virtual channel purification laboratory"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  std::string config, out_dir = ".";
  int threads = 1;
  std::optional<std::uint64_t> seed;
  run->add_option("--config", config, "Experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Override the seed origin");

  auto* budget = app.add_subcommand("budget", "Evaluate the error budget per (params, L)");
  std::string params;
  budget->add_option("--params", params, "Budget params file")->required()->check(CLI::ExistingFile);

  auto* validate = app.add_subcommand("validate", "Run the acceptance oracle suite");
  ValidationOptions vopt;
  validate->add_option("--seeds", vopt.seeds, "Circuit replicates for the random-circuit checks");
  validate->add_option("--threads", vopt.threads, "Worker threads");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config, out_dir, threads, seed);
    if (*budget) return cmd_budget(params);
    return cmd_validate(vopt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
