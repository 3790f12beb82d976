#ifndef GRADLIM_EXPERIMENTS_HPP
#define GRADLIM_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "gradlim/euler.hpp"
#include "gradlim/graduation.hpp"
#include "gradlim/measures.hpp"
#include "gradlim/report.hpp"

namespace gradlim::experiments {

/// Declarative description of one experiment run. Empty n_list or zero
/// samples means "use the experiment's default budget".
struct ExperimentConfig {
  std::string experiment;
  std::string law = "normal";
  std::string law_pair;  // second factor of the pair-form uniformity test
  std::string scheme = "nearest";
  std::string phi = "sin";
  std::string chi = "sin";
  std::string sde = "sine_mechanical";
  std::vector<int> n_list;
  std::uint64_t samples = 0;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string format = "json";
  double level = 0.01;
  double k_sigma = 3.0;
};

extern const std::vector<std::string> kExperimentNames;

/// Named presets. Unknown names throw std::invalid_argument.
measures::ProbabilityLaw law_preset(const std::string& name);
/// Declarative record {kind: normal|uniform|dirac|cantor|product, ...}.
measures::ProbabilityLaw law_from_config(const nlohmann::json& cfg);
graduation::GraduationScheme scheme_preset(const std::string& name);
TestFunction function_preset(const std::string& name);
euler::MechanicalSDE sde_preset(const std::string& name);

/// Parses a JSON config file mirroring ExperimentConfig field-for-field.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);

report::ExperimentReport run_rajchman(const ExperimentConfig& cfg);
report::ExperimentReport run_uniformity(const ExperimentConfig& cfg);
report::ExperimentReport run_gamma(const ExperimentConfig& cfg);
report::ExperimentReport run_bias(const ExperimentConfig& cfg);
report::ExperimentReport run_change_of_measure(const ExperimentConfig& cfg);
report::ExperimentReport run_rootzen(const ExperimentConfig& cfg);
report::ExperimentReport run_eq19(const ExperimentConfig& cfg);
report::ExperimentReport run_quadratic_form(const ExperimentConfig& cfg);
report::ExperimentReport run_euler_error(const ExperimentConfig& cfg);

/// Dispatch by cfg.experiment; "all" runs every experiment with its default
/// budget. Throws std::invalid_argument for unknown names.
std::vector<report::ExperimentReport> run_experiment(
    const ExperimentConfig& cfg);

}  // namespace gradlim::experiments

#endif
