// Named-experiment runner. Exit codes: 0 all checks passed (inconclusive
// tolerated), 1 at least one failed check, 2 bad usage or config, 3 I/O
// error.
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gradlim/experiments.hpp"
#include "gradlim/report.hpp"

namespace {

std::vector<int> parse_n_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stoi(tok));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using gradlim::experiments::ExperimentConfig;

  CLI::App app{"gradlim: Monte Carlo checks of graduation-error and Euler "
               "scheme limit theorems"};
  app.require_subcommand(0, 1);

  ExperimentConfig cfg;
  std::string n_csv;
  std::string config_path;
  int single_n = 0;
  bool seed_given = false;

  auto add_flags = [&](CLI::App* cmd) {
    cmd->add_option("--experiment", cfg.experiment, "experiment name");
    cmd->add_option("--law", cfg.law, "law preset");
    cmd->add_option("--law-pair", cfg.law_pair,
                    "second law of the pair-form uniformity test");
    cmd->add_option("--scheme", cfg.scheme, "graduation scheme preset");
    cmd->add_option("--phi", cfg.phi, "test function preset");
    cmd->add_option("--chi", cfg.chi, "pairing function preset");
    cmd->add_option("--sde", cfg.sde, "mechanical system preset");
    cmd->add_option("--n-list", n_csv, "comma-separated resolutions");
    cmd->add_option("--n", single_n, "single resolution");
    cmd->add_option("--samples", cfg.samples,
                    "samples or replications (0 = experiment default)");
    cmd->add_option("--seed", cfg.seed, "master seed")
        ->each([&](const std::string&) { seed_given = true; });
    cmd->add_option("--out", cfg.out_path, "report output path");
    cmd->add_option("--format", cfg.format, "json or csv");
    cmd->add_option("--level", cfg.level, "KS test level");
    cmd->add_option("--k-sigma", cfg.k_sigma, "verdict width in stderr units");
    cmd->add_option("--config", config_path,
                    "JSON config file mirroring the flags");
  };

  add_flags(&app);
  CLI::App* run = app.add_subcommand("run", "run a named experiment");
  run->add_option("name", cfg.experiment, "experiment name");
  add_flags(run);

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "cannot read config file: " << config_path << "\n";
        return 3;
      }
      nlohmann::json j;
      in >> j;
      ExperimentConfig file_cfg = gradlim::experiments::config_from_json(j);
      // explicit flags win over the file
      if (cfg.experiment.empty()) cfg.experiment = file_cfg.experiment;
      if (cfg.law == "normal") cfg.law = file_cfg.law;
      if (cfg.law_pair.empty()) cfg.law_pair = file_cfg.law_pair;
      if (cfg.scheme == "nearest") cfg.scheme = file_cfg.scheme;
      if (cfg.phi == "sin") cfg.phi = file_cfg.phi;
      if (cfg.chi == "sin") cfg.chi = file_cfg.chi;
      if (cfg.sde == "sine_mechanical") cfg.sde = file_cfg.sde;
      if (cfg.n_list.empty() && n_csv.empty()) cfg.n_list = file_cfg.n_list;
      if (cfg.samples == 0) cfg.samples = file_cfg.samples;
      if (!seed_given) {
        cfg.seed = file_cfg.seed;
        seed_given = j.contains("seed");
      }
      if (cfg.out_path.empty()) cfg.out_path = file_cfg.out_path;
      if (cfg.format == "json") cfg.format = file_cfg.format;
    }
    if (!n_csv.empty()) cfg.n_list = parse_n_list(n_csv);
    if (single_n > 0) cfg.n_list.push_back(single_n);

    if (cfg.experiment.empty()) {
      std::cerr << "no experiment given; known names:";
      for (const auto& n : gradlim::experiments::kExperimentNames)
        std::cerr << ' ' << n;
      std::cerr << "\n";
      return 2;
    }
    if (cfg.experiment == "all" && !seed_given) {
      std::cerr << "--seed is required for the full suite\n";
      return 2;
    }
    if (cfg.format != "json" && cfg.format != "csv") {
      std::cerr << "unknown format: " << cfg.format << "\n";
      return 2;
    }

    const auto reports = gradlim::experiments::run_experiment(cfg);

    std::string rendered;
    if (cfg.format == "csv") {
      rendered = gradlim::report::run_to_csv(reports);
    } else {
      rendered = gradlim::report::run_to_json(reports, cfg.seed).dump(2);
      rendered += '\n';
    }

    if (cfg.out_path.empty()) {
      std::cout << rendered;
    } else {
      try {
        gradlim::report::write_file(cfg.out_path, rendered);
      } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 3;
      }
    }

    int pass = 0, fail = 0, inconclusive = 0;
    for (const auto& rep : reports) {
      pass += rep.count(gradlim::stats::Verdict::pass);
      fail += rep.count(gradlim::stats::Verdict::fail);
      inconclusive += rep.count(gradlim::stats::Verdict::inconclusive);
    }
    std::cerr << "checks: " << pass << " pass, " << fail << " fail, "
              << inconclusive << " inconclusive\n";
    return fail > 0 ? 1 : 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
}
