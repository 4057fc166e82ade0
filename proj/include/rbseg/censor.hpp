#ifndef RBSEG_CENSOR_HPP
#define RBSEG_CENSOR_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rbseg/optimizer_kind.hpp"
#include "rbseg/synthgen.hpp"

namespace rbseg::censor {

enum class PlanMode { LesionCensor, PatientSubsample, Full };

const char* plan_mode_name(PlanMode m);
PlanMode plan_mode_from_name(const std::string& name);

// Per-patient lesion id listing; the only cohort information plan
// construction needs.
struct CohortLesionIndex {
  std::map<std::string, std::vector<int>> lesions;  // patient id -> lesion ids

  static CohortLesionIndex from_cases(const std::vector<synth::PatientCase>& cases);
  std::size_t total_lesions() const;
};

// One ensemble member's training view. Fixed for the whole of training:
// resampling per epoch would change the induced false-negative statistics.
struct CensorPlan {
  int member_id = 0;
  PlanMode mode = PlanMode::Full;
  double rate = 0.0;  // lesion-censor probability rho; 0 for other modes
  std::map<std::string, std::set<int>> kept_lesions;  // per patient
  std::set<std::string> kept_patients;
  std::uint64_t seed = 0;

  bool includes_patient(const std::string& patient_id) const {
    return kept_patients.count(patient_id) > 0;
  }
  std::size_t kept_lesion_count() const;
};

// n plans; each lesion kept independently with probability 1 - rho.
std::vector<CensorPlan> make_lesion_plans(const CohortLesionIndex& cohort,
                                          int n, double rho,
                                          std::uint64_t seed);

// n plans; each patient kept independently with probability 0.5 (the 0.5^n
// omission arithmetic assumes independence). exact_halves selects a random
// floor(P/2)-subset instead.
std::vector<CensorPlan> make_patient_plans(const CohortLesionIndex& cohort,
                                           int n, std::uint64_t seed,
                                           bool exact_halves = false);

CensorPlan make_full_plan(const CohortLesionIndex& cohort, int member_id);

// Censored lesions are relabeled as background; image channels are never
// touched. Throws ConfigError("patient not in plan: ...") when a
// patient-subsample plan excludes the case.
MaskVolume apply_plan(const CensorPlan& plan, const synth::PatientCase& c);

struct HyperparameterPoint {
  double learning_rate = 3e-3;
  double l2_lambda = 1e-2;
  OptimizerKind optimizer = OptimizerKind::Adam;

  bool operator==(const HyperparameterPoint&) const = default;
};

// Full Cartesian product of the search grid: 5 learning rates x 2 weight
// decays x 3 optimizers = 30 points, in a fixed order.
std::vector<HyperparameterPoint> enumerate_grid();

nlohmann::json plan_to_json(const CensorPlan& plan);
CensorPlan plan_from_json(const nlohmann::json& j);
nlohmann::json hyperparameter_to_json(const HyperparameterPoint& hp);
HyperparameterPoint hyperparameter_from_json(const nlohmann::json& j);

}  // namespace rbseg::censor

#endif  // RBSEG_CENSOR_HPP
