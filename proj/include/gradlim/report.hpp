#ifndef GRADLIM_REPORT_HPP
#define GRADLIM_REPORT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "gradlim/stats.hpp"

namespace gradlim::report {

using json = nlohmann::ordered_json;

/// One scalar comparison inside an experiment. `n` is the resolution the
/// check is tied to (0 when not applicable).
struct Check {
  std::string name;
  int n = 0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  double target = 0.0;
  stats::Verdict verdict = stats::Verdict::inconclusive;
  std::string note;
};

struct ExperimentReport {
  std::string experiment;
  /// Plain-language statement of the limit being checked.
  std::string claim;
  json config;  // echo of the fully resolved configuration
  std::uint64_t seed = 0;
  std::vector<Check> checks;
  json detail;  // experiment-specific evidence tables

  int count(stats::Verdict v) const;
  bool failed() const { return count(stats::Verdict::fail) > 0; }
};

/// Two-estimate comparison: pass iff the difference is within k_sigma
/// combined standard errors. Never inconclusive (the scale is the
/// difference's own error, not an external target).
Check compare_estimates(std::string name, int n, const stats::MCEstimate& a,
                        const stats::MCEstimate& b, double k_sigma,
                        std::string note = {});

/// Significance check of an estimate against zero: pass iff
/// |value| <= k_sigma * stderr.
Check significance_check(std::string name, int n,
                         const stats::MCEstimate& est, double k_sigma,
                         std::string note = {});

/// Target check routed through stats::verdict (can be inconclusive).
Check target_check(std::string name, int n, const stats::MCEstimate& est,
                   double target, double k_sigma, double inconclusive_frac,
                   std::string note = {});

/// Boolean predicate recorded as a check (1 = holds).
Check predicate_check(std::string name, int n, bool holds,
                      std::string note = {});

Check ks_check(std::string name, int n, const stats::KSResult& ks,
               std::string note = {});

json to_json(const Check& check);
json to_json(const ExperimentReport& rep);
/// Top-level run document: seed, verdict tally, one block per experiment.
json run_to_json(const std::vector<ExperimentReport>& reports,
                 std::uint64_t seed);

/// Tidy long format, one row per check:
/// experiment,check,n,estimate,stderr,target,verdict
std::string run_to_csv(const std::vector<ExperimentReport>& reports);

/// Writes `content` atomically enough for this tool (truncate + write);
/// throws std::runtime_error on any I/O failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace gradlim::report

#endif
