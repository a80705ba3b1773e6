#pragma once

#include <string>
#include <vector>

namespace robopainter {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double runtime_s = 0.0;
};

struct VerifyPaths {
  std::string params_path;  // robot parameter file
  std::string rooms_dir;    // directory with the room descriptions
  std::string golden_dir;   // frozen reference traces ("" skips the match)
};

// The eight release criteria, in order. Each runs self-contained and returns
// a pass/fail verdict with a one-line quantitative detail string.
CriterionResult check_parameter_fidelity(const VerifyPaths& p);
CriterionResult check_reachability(const VerifyPaths& p);
CriterionResult check_dynamics_consistency(const VerifyPaths& p);
CriterionResult check_energy_conservation(const VerifyPaths& p);
CriterionResult check_strip_economics(const VerifyPaths& p);
CriterionResult check_planner(const VerifyPaths& p);
CriterionResult check_localization(const VerifyPaths& p);
CriterionResult check_fsm_safety(const VerifyPaths& p);

std::vector<CriterionResult> run_acceptance(const VerifyPaths& p);

}  // namespace robopainter
