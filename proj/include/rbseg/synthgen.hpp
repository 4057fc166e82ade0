#ifndef RBSEG_SYNTHGEN_HPP
#define RBSEG_SYNTHGEN_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rbseg/morphology.hpp"
#include "rbseg/volume.hpp"

namespace rbseg::synth {

// Test-set strata by ground-truth lesion count.
enum class Stratum { Low, Mid, High };  // 1-3, 4-10, >10

const char* stratum_name(Stratum s);
Stratum stratum_for_count(int lesion_count);

struct LesionInfo {
  int id = 0;  // component id, 1-based, raster order
  std::vector<Coord> voxels;
  std::array<double, 3> centroid_mm{};
};

using LesionIndex = std::vector<LesionInfo>;

struct PatientCase {
  std::string id;
  Volume image;
  MaskVolume truth;
  LesionIndex lesion_index;
  Stratum stratum = Stratum::Low;
};

struct CohortSpec {
  int n_train = 40;
  int n_test = 21;  // must be divisible by 3 (equal strata)
  Dims dims{64, 64, 16};
  int channels = 4;
  Spacing spacing_mm{1.0, 1.0, 1.0};

  // Lesion-count ranges per stratum (inclusive).
  std::array<int, 2> low_count{1, 3};
  std::array<int, 2> mid_count{4, 10};
  std::array<int, 2> high_count{11, 15};

  // Ellipsoid semi-axes, log-uniform (mm). z is kept flatter so high-count
  // patients still pack into thin volumes.
  std::array<double, 2> radius_xy_mm{1.0, 4.5};
  std::array<double, 2> radius_z_mm{1.0, 2.5};

  // Additive lesion peak intensity per channel; emulates distinct pulse
  // sequences without claiming MR realism.
  std::vector<double> lesion_contrast{1.0, 0.8, 0.6, 1.2};
  double contrast_floor = 0.15;

  double noise_scale = 1.0;

  // Channel-inconsistent bright bumps added to the image only; ambiguous
  // lookalikes that make detection non-trivial.
  int distractors_min = 5;
  int distractors_max = 12;
  double distractor_strength = 0.6;  // relative to channel contrast

  morph::Connectivity connectivity = morph::Connectivity::Full26;
  std::uint64_t seed = 1;

  void validate() const;
};

struct Cohort {
  std::vector<PatientCase> train;
  std::vector<PatientCase> test;
};

// Deterministic given spec.seed; every patient is generated from a derived
// per-patient stream so generation order (or concurrency) cannot change the
// result.
Cohort generate_cohort(const CohortSpec& spec, int workers = 1);

std::size_t total_lesion_count(const std::vector<PatientCase>& cases);

nlohmann::json cohort_spec_to_json(const CohortSpec& spec);
CohortSpec cohort_spec_from_json(const nlohmann::json& j);

}  // namespace rbseg::synth

#endif  // RBSEG_SYNTHGEN_HPP
