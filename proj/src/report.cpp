#include "gradlim/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gradlim::report {

namespace {

// round-trip exact and locale independent
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int ExperimentReport::count(stats::Verdict v) const {
  int c = 0;
  for (const auto& check : checks)
    if (check.verdict == v) ++c;
  return c;
}

Check compare_estimates(std::string name, int n, const stats::MCEstimate& a,
                        const stats::MCEstimate& b, double k_sigma,
                        std::string note) {
  Check c;
  c.name = std::move(name);
  c.n = n;
  c.estimate = a.value;
  c.target = b.value;
  c.stderr_ = std::hypot(a.stderr_, b.stderr_);
  c.verdict = std::abs(a.value - b.value) <= k_sigma * c.stderr_
                  ? stats::Verdict::pass
                  : stats::Verdict::fail;
  c.note = std::move(note);
  return c;
}

Check significance_check(std::string name, int n, const stats::MCEstimate& est,
                         double k_sigma, std::string note) {
  Check c;
  c.name = std::move(name);
  c.n = n;
  c.estimate = est.value;
  c.stderr_ = est.stderr_;
  c.target = 0.0;
  c.verdict = std::abs(est.value) <= k_sigma * est.stderr_
                  ? stats::Verdict::pass
                  : stats::Verdict::fail;
  c.note = std::move(note);
  return c;
}

Check target_check(std::string name, int n, const stats::MCEstimate& est,
                   double target, double k_sigma, double inconclusive_frac,
                   std::string note) {
  Check c;
  c.name = std::move(name);
  c.n = n;
  c.estimate = est.value;
  c.stderr_ = est.stderr_;
  c.target = target;
  c.verdict = stats::verdict(est, target, k_sigma, inconclusive_frac);
  c.note = std::move(note);
  return c;
}

Check predicate_check(std::string name, int n, bool holds, std::string note) {
  Check c;
  c.name = std::move(name);
  c.n = n;
  c.estimate = holds ? 1.0 : 0.0;
  c.target = 1.0;
  c.verdict = holds ? stats::Verdict::pass : stats::Verdict::fail;
  c.note = std::move(note);
  return c;
}

Check ks_check(std::string name, int n, const stats::KSResult& ks,
               std::string note) {
  Check c;
  c.name = std::move(name);
  c.n = n;
  c.estimate = ks.statistic;
  c.target = ks.critical_value;
  c.verdict = ks.pass ? stats::Verdict::pass : stats::Verdict::fail;
  c.note = std::move(note);
  return c;
}

json to_json(const Check& check) {
  json j;
  j["name"] = check.name;
  j["n"] = check.n;
  j["estimate"] = check.estimate;
  j["stderr"] = check.stderr_;
  j["target"] = check.target;
  j["verdict"] = stats::to_string(check.verdict);
  if (!check.note.empty()) j["note"] = check.note;
  return j;
}

json to_json(const ExperimentReport& rep) {
  json j;
  j["experiment"] = rep.experiment;
  j["claim"] = rep.claim;
  j["seed"] = rep.seed;
  j["config"] = rep.config;
  j["summary"] = {{"pass", rep.count(stats::Verdict::pass)},
                  {"fail", rep.count(stats::Verdict::fail)},
                  {"inconclusive", rep.count(stats::Verdict::inconclusive)}};
  j["checks"] = json::array();
  for (const auto& check : rep.checks) j["checks"].push_back(to_json(check));
  if (!rep.detail.is_null()) j["detail"] = rep.detail;
  return j;
}

json run_to_json(const std::vector<ExperimentReport>& reports,
                 std::uint64_t seed) {
  int pass = 0, fail = 0, inconclusive = 0;
  for (const auto& rep : reports) {
    pass += rep.count(stats::Verdict::pass);
    fail += rep.count(stats::Verdict::fail);
    inconclusive += rep.count(stats::Verdict::inconclusive);
  }
  json j;
  j["tool"] = "gradlim";
  j["seed"] = seed;
  j["summary"] = {
      {"pass", pass}, {"fail", fail}, {"inconclusive", inconclusive}};
  j["experiments"] = json::array();
  for (const auto& rep : reports) j["experiments"].push_back(to_json(rep));
  return j;
}

std::string run_to_csv(const std::vector<ExperimentReport>& reports) {
  std::ostringstream out;
  out << "experiment,check,n,estimate,stderr,target,verdict\n";
  for (const auto& rep : reports)
    for (const auto& check : rep.checks)
      out << rep.experiment << ',' << check.name << ',' << check.n << ','
          << num(check.estimate) << ',' << num(check.stderr_) << ','
          << num(check.target) << ',' << stats::to_string(check.verdict)
          << '\n';
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace gradlim::report
