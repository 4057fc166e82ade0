#include "rbseg/censor.hpp"

#include <nlohmann/json.hpp>

#include "rbseg/rng.hpp"

namespace rbseg::censor {

using nlohmann::json;

const char* plan_mode_name(PlanMode m) {
  switch (m) {
    case PlanMode::LesionCensor: return "lesion_censor";
    case PlanMode::PatientSubsample: return "patient_subsample";
    default: return "full";
  }
}

PlanMode plan_mode_from_name(const std::string& name) {
  if (name == "lesion_censor") return PlanMode::LesionCensor;
  if (name == "patient_subsample") return PlanMode::PatientSubsample;
  if (name == "full") return PlanMode::Full;
  throw ConfigError("unknown plan mode: " + name);
}

CohortLesionIndex CohortLesionIndex::from_cases(
    const std::vector<synth::PatientCase>& cases) {
  CohortLesionIndex out;
  for (const auto& c : cases) {
    auto& ids = out.lesions[c.id];
    ids.reserve(c.lesion_index.size());
    for (const auto& lesion : c.lesion_index) ids.push_back(lesion.id);
  }
  return out;
}

std::size_t CohortLesionIndex::total_lesions() const {
  std::size_t n = 0;
  for (const auto& [id, ids] : lesions) n += ids.size();
  return n;
}

std::size_t CensorPlan::kept_lesion_count() const {
  std::size_t n = 0;
  for (const auto& [id, ids] : kept_lesions) n += ids.size();
  return n;
}

std::vector<CensorPlan> make_lesion_plans(const CohortLesionIndex& cohort,
                                          int n, double rho,
                                          std::uint64_t seed) {
  if (n < 1) throw ConfigError("plan count must be >= 1");
  if (rho < 0.0 || rho >= 1.0) throw ConfigError("censor rate must be in [0, 1)");
  std::vector<CensorPlan> plans;
  plans.reserve(n);
  for (int m = 0; m < n; ++m) {
    CensorPlan plan;
    plan.member_id = m;
    plan.mode = PlanMode::LesionCensor;
    plan.rate = rho;
    plan.seed = derive_seed(seed, static_cast<std::uint64_t>(m));
    Rng rng(plan.seed);
    for (const auto& [patient, ids] : cohort.lesions) {
      plan.kept_patients.insert(patient);
      auto& kept = plan.kept_lesions[patient];
      for (int id : ids) {
        if (!rng.bernoulli(rho)) kept.insert(id);
      }
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

std::vector<CensorPlan> make_patient_plans(const CohortLesionIndex& cohort,
                                           int n, std::uint64_t seed,
                                           bool exact_halves) {
  if (n < 1) throw ConfigError("plan count must be >= 1");
  if (cohort.lesions.empty()) throw ConfigError("cohort is empty");
  std::vector<CensorPlan> plans;
  plans.reserve(n);
  for (int m = 0; m < n; ++m) {
    CensorPlan plan;
    plan.member_id = m;
    plan.mode = PlanMode::PatientSubsample;
    plan.seed = derive_seed(seed, static_cast<std::uint64_t>(m));
    // An all-empty Bernoulli draw (probability 2^-P) is redrawn from the
    // next derived stream so training always has at least one patient.
    std::uint64_t draw_seed = plan.seed;
    for (;;) {
      plan.kept_patients.clear();
      Rng rng(draw_seed);
      if (exact_halves) {
        std::vector<std::string> ids;
        ids.reserve(cohort.lesions.size());
        for (const auto& [patient, lesion_ids] : cohort.lesions)
          ids.push_back(patient);
        rng.shuffle(ids);
        const std::size_t keep = std::max<std::size_t>(1, ids.size() / 2);
        for (std::size_t i = 0; i < keep; ++i) plan.kept_patients.insert(ids[i]);
      } else {
        for (const auto& [patient, lesion_ids] : cohort.lesions) {
          if (rng.bernoulli(0.5)) plan.kept_patients.insert(patient);
        }
      }
      if (!plan.kept_patients.empty()) break;
      draw_seed = splitmix64(draw_seed);
    }
    for (const auto& patient : plan.kept_patients) {
      const auto& ids = cohort.lesions.at(patient);
      plan.kept_lesions[patient] = std::set<int>(ids.begin(), ids.end());
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

CensorPlan make_full_plan(const CohortLesionIndex& cohort, int member_id) {
  CensorPlan plan;
  plan.member_id = member_id;
  plan.mode = PlanMode::Full;
  for (const auto& [patient, ids] : cohort.lesions) {
    plan.kept_patients.insert(patient);
    plan.kept_lesions[patient] = std::set<int>(ids.begin(), ids.end());
  }
  return plan;
}

MaskVolume apply_plan(const CensorPlan& plan, const synth::PatientCase& c) {
  if (!plan.includes_patient(c.id))
    throw ConfigError("patient not in plan: " + c.id);
  MaskVolume out = c.truth;
  if (plan.mode == PlanMode::Full || plan.mode == PlanMode::PatientSubsample)
    return out;
  auto it = plan.kept_lesions.find(c.id);
  const std::set<int> empty;
  const std::set<int>& kept = it == plan.kept_lesions.end() ? empty : it->second;
  // Plans must not reference lesions the case does not have.
  std::set<int> case_ids;
  for (const auto& lesion : c.lesion_index) case_ids.insert(lesion.id);
  for (int id : kept) {
    if (!case_ids.count(id))
      throw ConfigError("plan references unknown lesion id " +
                        std::to_string(id) + " for patient " + c.id);
  }
  for (const auto& lesion : c.lesion_index) {
    if (kept.count(lesion.id)) continue;
    for (const auto& v : lesion.voxels) out.set(v.x, v.y, v.z, 0);
  }
  return out;
}

std::vector<HyperparameterPoint> enumerate_grid() {
  static const double kLearningRates[] = {3e-2, 1e-2, 3e-3, 1e-3, 3e-4};
  static const double kL2[] = {1e-2, 1e-3};
  static const OptimizerKind kOpts[] = {OptimizerKind::Momentum,
                                        OptimizerKind::RMSProp,
                                        OptimizerKind::Adam};
  std::vector<HyperparameterPoint> grid;
  grid.reserve(30);
  for (double lr : kLearningRates)
    for (double l2 : kL2)
      for (OptimizerKind opt : kOpts)
        grid.push_back(HyperparameterPoint{lr, l2, opt});
  return grid;
}

json plan_to_json(const CensorPlan& plan) {
  json j;
  j["member_id"] = plan.member_id;
  j["mode"] = plan_mode_name(plan.mode);
  j["rate"] = plan.rate;
  j["seed"] = plan.seed;
  json kept = json::object();
  for (const auto& [patient, ids] : plan.kept_lesions)
    kept[patient] = std::vector<int>(ids.begin(), ids.end());
  j["kept_lesions"] = std::move(kept);
  j["kept_patients"] =
      std::vector<std::string>(plan.kept_patients.begin(), plan.kept_patients.end());
  return j;
}

CensorPlan plan_from_json(const json& j) {
  CensorPlan plan;
  try {
    plan.member_id = j.at("member_id").get<int>();
    plan.mode = plan_mode_from_name(j.at("mode").get<std::string>());
    plan.rate = j.at("rate").get<double>();
    plan.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [patient, ids] : j.at("kept_lesions").items()) {
      auto vec = ids.get<std::vector<int>>();
      plan.kept_lesions[patient] = std::set<int>(vec.begin(), vec.end());
    }
    for (const auto& patient : j.at("kept_patients"))
      plan.kept_patients.insert(patient.get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad censor plan JSON: ") + e.what());
  }
  return plan;
}

json hyperparameter_to_json(const HyperparameterPoint& hp) {
  return json{{"learning_rate", hp.learning_rate},
              {"l2_lambda", hp.l2_lambda},
              {"optimizer", optimizer_name(hp.optimizer)}};
}

HyperparameterPoint hyperparameter_from_json(const json& j) {
  HyperparameterPoint hp;
  try {
    hp.learning_rate = j.at("learning_rate").get<double>();
    hp.l2_lambda = j.at("l2_lambda").get<double>();
    hp.optimizer = optimizer_from_name(j.at("optimizer").get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad hyperparameter JSON: ") + e.what());
  }
  return hp;
}

}  // namespace rbseg::censor
