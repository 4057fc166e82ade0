#ifndef RBSEG_ENSEMBLE_HPP
#define RBSEG_ENSEMBLE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rbseg/censor.hpp"
#include "rbseg/neural/train.hpp"
#include "rbseg/synthgen.hpp"

namespace rbseg::ens {

enum class Strategy { Single, Hyperparameter, PatientSubsample, LesionCensor };

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

// Mean is the contract default; the alternatives exist for comparison runs.
enum class FusionRule { Mean, Majority, Max };

const char* fusion_name(FusionRule f);
FusionRule fusion_from_name(const std::string& name);

struct MemberRecord {
  int member_id = 0;
  neural::ModelSpec model_spec;
  std::vector<float> params;
  censor::CensorPlan plan;
  censor::HyperparameterPoint hp;
  std::uint64_t train_seed = 0;

  neural::NetworkModel model() const { return {model_spec, params}; }
};

struct Bundle {
  Strategy strategy = Strategy::Single;
  FusionRule fusion = FusionRule::Mean;
  int z_slices = 5;
  neural::LossConfig loss;
  std::uint64_t base_seed = 0;
  std::vector<MemberRecord> members;  // sorted by member_id
};

struct TrainBundleOptions {
  Strategy strategy = Strategy::Single;
  int n = 1;
  std::uint64_t seed = 0;
  censor::HyperparameterPoint hp;  // shared hp (all strategies but Hyperparameter)
  double censor_rate = 0.5;
  bool patient_exact_halves = false;
  neural::LossConfig loss;
  neural::TrainSchedule schedule;        // sampling_seed derived per member
  neural::ModelSpec arch;                // init_seed derived per member
  FusionRule fusion = FusionRule::Mean;
  int workers = 1;
};

// Trains n members, each on its own censor plan / hyperparameter point, in
// parallel across members. Fully reproducible from opts.seed.
Bundle train_bundle(const std::vector<synth::PatientCase>& train_cases,
                    const TrainBundleOptions& opts);

// One member's foreground-probability volume.
Volume member_probability_volume(const MemberRecord& member, const Volume& image,
                                 int z_slices);

// Fuses per-member probability volumes. Members are consumed in ascending
// member_id order with pairwise summation, so fusion is bit-exactly
// invariant to input permutation.
Volume fuse_member_volumes(const std::vector<const Volume*>& member_probs,
                           const std::vector<int>& member_ids, FusionRule rule);

// Full bundle inference: per z-slice, run every member and fuse.
// Parallelizes over slices; output independent of worker count.
Volume predict_volume(const Bundle& bundle, const Volume& image, int workers = 1);

// Sub-bundle with the members at the given indices (paper-style random
// subsets of a trained ensemble are selected by the harness).
Bundle bundle_subset(const Bundle& bundle, const std::vector<std::size_t>& indices);

// Directory layout: manifest.json + one checkpoint and one plan JSON per
// member. Round-trips are lossless.
void save_bundle(const Bundle& bundle, const std::string& dir);
Bundle load_bundle(const std::string& dir);

}  // namespace rbseg::ens

#endif  // RBSEG_ENSEMBLE_HPP
