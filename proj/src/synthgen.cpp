#include "rbseg/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <nlohmann/json.hpp>

#include "rbseg/parallel.hpp"
#include "rbseg/rng.hpp"

namespace rbseg::synth {

namespace {

using nlohmann::json;

// Gaussian intensity falloff over normalized ellipsoid distance d; the truth
// mask is d <= 1.
constexpr double kFalloffTwoSigmaSq = 0.605;  // 2 * 0.55^2
constexpr double kEvalRadius = 2.5;           // skip voxels beyond this d
constexpr double kBoundaryMarginVox = 2.0;
constexpr double kSeparationVox = 3.0;
constexpr int kPlacementAttempts = 2000;

struct Blob {
  double cx, cy, cz;  // voxel units, continuous
  double rx, ry, rz;  // voxel units
};

// True if along some axis the center gap exceeds the summed extents plus a
// separation margin, which guarantees the rasterized sets cannot touch even
// under 26-connectivity.
bool separated(const Blob& a, const Blob& b, double margin) {
  if (std::abs(a.cx - b.cx) >= a.rx + b.rx + margin) return true;
  if (std::abs(a.cy - b.cy) >= a.ry + b.ry + margin) return true;
  if (std::abs(a.cz - b.cz) >= a.rz + b.rz + margin) return true;
  return false;
}

Blob sample_blob(Rng& rng, const CohortSpec& spec) {
  Blob b;
  b.rx = rng.log_uniform(spec.radius_xy_mm[0], spec.radius_xy_mm[1]) /
         spec.spacing_mm[0];
  b.ry = rng.log_uniform(spec.radius_xy_mm[0], spec.radius_xy_mm[1]) /
         spec.spacing_mm[1];
  b.rz = rng.log_uniform(spec.radius_z_mm[0], spec.radius_z_mm[1]) /
         spec.spacing_mm[2];
  const double mx = kBoundaryMarginVox + b.rx;
  const double my = kBoundaryMarginVox + b.ry;
  const double mz = kBoundaryMarginVox + b.rz;
  if (spec.dims.x - 2 * mx <= 0 || spec.dims.y - 2 * my <= 0 ||
      spec.dims.z - 2 * mz <= 0) {
    b.cx = -1e9;  // infeasible; caller treats as failed attempt
    return b;
  }
  b.cx = rng.uniform(mx, spec.dims.x - mx);
  b.cy = rng.uniform(my, spec.dims.y - my);
  b.cz = rng.uniform(mz, spec.dims.z - mz);
  return b;
}

double blob_distance(const Blob& b, double x, double y, double z) {
  const double dx = (x - b.cx) / b.rx;
  const double dy = (y - b.cy) / b.ry;
  const double dz = (z - b.cz) / b.rz;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void add_blob_intensity(Volume& img, const Blob& b,
                        const std::vector<double>& amplitude) {
  const int x0 = std::max(0, static_cast<int>(std::floor(b.cx - b.rx * kEvalRadius)));
  const int x1 = std::min(img.dims.x - 1,
                          static_cast<int>(std::ceil(b.cx + b.rx * kEvalRadius)));
  const int y0 = std::max(0, static_cast<int>(std::floor(b.cy - b.ry * kEvalRadius)));
  const int y1 = std::min(img.dims.y - 1,
                          static_cast<int>(std::ceil(b.cy + b.ry * kEvalRadius)));
  const int z0 = std::max(0, static_cast<int>(std::floor(b.cz - b.rz * kEvalRadius)));
  const int z1 = std::min(img.dims.z - 1,
                          static_cast<int>(std::ceil(b.cz + b.rz * kEvalRadius)));
  for (int z = z0; z <= z1; ++z) {
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double d = blob_distance(b, x + 0.5, y + 0.5, z + 0.5);
        if (d > kEvalRadius) continue;
        const double g = std::exp(-d * d / kFalloffTwoSigmaSq);
        for (int c = 0; c < img.channels; ++c) {
          img.at(c, x, y, z) += static_cast<float>(amplitude[c] * g);
        }
      }
    }
  }
}

void rasterize_mask(MaskVolume& mask, const Blob& b) {
  const int x0 = std::max(0, static_cast<int>(std::floor(b.cx - b.rx - 1)));
  const int x1 = std::min(mask.dims.x - 1, static_cast<int>(std::ceil(b.cx + b.rx + 1)));
  const int y0 = std::max(0, static_cast<int>(std::floor(b.cy - b.ry - 1)));
  const int y1 = std::min(mask.dims.y - 1, static_cast<int>(std::ceil(b.cy + b.ry + 1)));
  const int z0 = std::max(0, static_cast<int>(std::floor(b.cz - b.rz - 1)));
  const int z1 = std::min(mask.dims.z - 1, static_cast<int>(std::ceil(b.cz + b.rz + 1)));
  for (int z = z0; z <= z1; ++z)
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        if (blob_distance(b, x + 0.5, y + 0.5, z + 0.5) <= 1.0)
          mask.set(x, y, z, 1);
}

// Low-frequency structured background: coarse lattice of normal deviates,
// trilinearly interpolated.
struct LowFreqField {
  int cell = 8;
  int gx, gy, gz;
  std::vector<double> values;

  LowFreqField(const Dims& dims, Rng& rng, double sigma) {
    gx = dims.x / cell + 2;
    gy = dims.y / cell + 2;
    gz = dims.z / cell + 2;
    values.resize(static_cast<std::size_t>(gx) * gy * gz);
    for (auto& v : values) v = rng.normal(0.0, sigma);
  }

  double grid(int i, int j, int k) const {
    return values[(static_cast<std::size_t>(k) * gy + j) * gx + i];
  }

  double sample(double x, double y, double z) const {
    const double fx = x / cell, fy = y / cell, fz = z / cell;
    const int i = static_cast<int>(fx), j = static_cast<int>(fy),
              k = static_cast<int>(fz);
    const double tx = fx - i, ty = fy - j, tz = fz - k;
    double acc = 0.0;
    for (int dk = 0; dk <= 1; ++dk)
      for (int dj = 0; dj <= 1; ++dj)
        for (int di = 0; di <= 1; ++di) {
          const double w = (di ? tx : 1 - tx) * (dj ? ty : 1 - ty) *
                           (dk ? tz : 1 - tz);
          acc += w * grid(std::min(i + di, gx - 1), std::min(j + dj, gy - 1),
                          std::min(k + dk, gz - 1));
        }
    return acc;
  }
};

PatientCase generate_patient(const CohortSpec& spec, const std::string& id,
                             Stratum stratum, std::uint64_t patient_seed) {
  Rng rng(patient_seed);
  const std::array<int, 2> range = stratum == Stratum::Low   ? spec.low_count
                                   : stratum == Stratum::Mid ? spec.mid_count
                                                             : spec.high_count;
  const int n_lesions =
      range[0] + static_cast<int>(rng.uniform_index(
                     static_cast<std::uint64_t>(range[1] - range[0] + 1)));

  // Place lesions by rejection so no two can ever touch.
  std::vector<Blob> lesions;
  for (int i = 0; i < n_lesions; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
      Blob cand = sample_blob(rng, spec);
      if (cand.cx < -1e8) continue;
      bool ok = true;
      for (const auto& other : lesions) {
        if (!separated(cand, other, kSeparationVox)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        lesions.push_back(cand);
        placed = true;
        break;
      }
    }
    if (!placed)
      throw ConfigError("cannot place lesions: dims too small for requested "
                        "counts (patient " + id + ")");
  }

  PatientCase out;
  out.id = id;
  out.stratum = stratum;
  out.image = Volume(spec.dims, spec.channels, spec.spacing_mm);
  out.truth = MaskVolume(spec.dims, spec.spacing_mm);

  // Background: base level + per-channel low-frequency field + white noise.
  std::vector<LowFreqField> lowfreq;
  lowfreq.reserve(spec.channels);
  for (int c = 0; c < spec.channels; ++c)
    lowfreq.emplace_back(spec.dims, rng, 0.12 * spec.noise_scale);
  const double white_sigma = 0.06 * spec.noise_scale;
  for (int c = 0; c < spec.channels; ++c) {
    for (int z = 0; z < spec.dims.z; ++z)
      for (int y = 0; y < spec.dims.y; ++y)
        for (int x = 0; x < spec.dims.x; ++x)
          out.image.at(c, x, y, z) = static_cast<float>(
              0.35 + lowfreq[c].sample(x + 0.5, y + 0.5, z + 0.5) +
              rng.normal(0.0, white_sigma));
  }

  for (const auto& blob : lesions) {
    add_blob_intensity(out.image, blob, spec.lesion_contrast);
    rasterize_mask(out.truth, blob);
  }

  // Distractor bumps: image only, never annotated, kept clear of lesions.
  const int n_distract =
      spec.distractors_min +
      static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(
          spec.distractors_max - spec.distractors_min + 1)));
  std::vector<double> bump_amp(spec.channels);
  for (int i = 0; i < n_distract; ++i) {
    for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
      Blob cand = sample_blob(rng, spec);
      if (cand.cx < -1e8) continue;
      bool ok = true;
      for (const auto& lesion : lesions) {
        if (!separated(cand, lesion, kSeparationVox)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      // Random channel subset with random strength: the cross-channel
      // signature is what separates bumps from real lesions.
      bool any = false;
      for (int c = 0; c < spec.channels; ++c) {
        const bool on = rng.bernoulli(0.5);
        const double strength =
            rng.uniform(0.4, 1.0) * spec.distractor_strength;
        bump_amp[c] = on ? spec.lesion_contrast[c] * strength : 0.0;
        any = any || on;
      }
      if (!any) bump_amp[static_cast<std::size_t>(
          rng.uniform_index(spec.channels))] =
          spec.lesion_contrast[0] * spec.distractor_strength;
      add_blob_intensity(out.image, cand, bump_amp);
      break;
    }
    // A bump that cannot be placed is simply skipped.
  }

  // Truth-derived lesion identity must equal the CC decomposition.
  auto components = morph::label_components(out.truth, spec.connectivity);
  if (static_cast<int>(components.size()) != n_lesions)
    throw NumericError("lesion rasterization produced " +
                       std::to_string(components.size()) + " components, expected " +
                       std::to_string(n_lesions) + " (patient " + id + ")");
  out.lesion_index.reserve(components.size());
  for (auto& comp : components) {
    LesionInfo info;
    info.id = comp.id;
    info.voxels = std::move(comp.voxel_list);
    info.centroid_mm = comp.centroid_mm;
    out.lesion_index.push_back(std::move(info));
  }
  return out;
}

std::string case_id(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%03d", prefix, i);
  return buf;
}

}  // namespace

const char* stratum_name(Stratum s) {
  switch (s) {
    case Stratum::Low: return "low";
    case Stratum::Mid: return "mid";
    default: return "high";
  }
}

Stratum stratum_for_count(int lesion_count) {
  if (lesion_count <= 3) return Stratum::Low;
  if (lesion_count <= 10) return Stratum::Mid;
  return Stratum::High;
}

void CohortSpec::validate() const {
  if (n_train < 0 || n_test < 0) throw ConfigError("cohort sizes must be >= 0");
  if (n_test % 3 != 0)
    throw ConfigError("n_test must be divisible by 3 for equal strata");
  if (dims.x < 1 || dims.y < 1 || dims.z < 1)
    throw ConfigError("cohort dims must be >= 1");
  if (channels < 1) throw ConfigError("cohort channels must be >= 1");
  if (static_cast<int>(lesion_contrast.size()) != channels)
    throw ConfigError("lesion_contrast must have one entry per channel");
  if (spacing_mm[0] <= 0 || spacing_mm[1] <= 0 || spacing_mm[2] <= 0)
    throw ConfigError("spacing must be strictly positive");
  auto check_range = [](const std::array<int, 2>& r, const char* what) {
    if (r[0] < 0 || r[1] < r[0])
      throw ConfigError(std::string("bad lesion count range for ") + what);
  };
  check_range(low_count, "low stratum");
  check_range(mid_count, "mid stratum");
  check_range(high_count, "high stratum");
  if (low_count[0] < 1 || low_count[1] > 3)
    throw ConfigError("low stratum counts must stay within 1-3");
  if (mid_count[0] < 4 || mid_count[1] > 10)
    throw ConfigError("mid stratum counts must stay within 4-10");
  if (high_count[0] < 11)
    throw ConfigError("high stratum counts must be > 10");
  auto check_radius = [&](const std::array<double, 2>& r, double spacing,
                          const char* what) {
    if (r[0] <= 0 || r[1] < r[0])
      throw ConfigError(std::string("bad radius range for ") + what);
    if (r[0] / spacing < 1.0)
      throw ConfigError(std::string("minimum radius must cover >= 1 voxel "
                                    "along ") + what);
  };
  check_radius(radius_xy_mm, std::max(spacing_mm[0], spacing_mm[1]), "xy");
  check_radius(radius_z_mm, spacing_mm[2], "z");
  if (distractors_min < 0 || distractors_max < distractors_min)
    throw ConfigError("bad distractor count range");
}

Cohort generate_cohort(const CohortSpec& spec, int workers) {
  spec.validate();
  Cohort cohort;
  cohort.train.resize(spec.n_train);
  cohort.test.resize(spec.n_test);
  const std::size_t total = static_cast<std::size_t>(spec.n_train) + spec.n_test;
  parallel_for(total, workers, [&](std::size_t i) {
    const std::uint64_t patient_seed = derive_seed(spec.seed, i);
    const Stratum stratum = static_cast<Stratum>(i % 3);
    if (i < static_cast<std::size_t>(spec.n_train)) {
      cohort.train[i] = generate_patient(
          spec, case_id("train", static_cast<int>(i)), stratum, patient_seed);
    } else {
      const int t = static_cast<int>(i) - spec.n_train;
      cohort.test[t] =
          generate_patient(spec, case_id("test", t), stratum, patient_seed);
    }
  });
  return cohort;
}

std::size_t total_lesion_count(const std::vector<PatientCase>& cases) {
  return std::accumulate(cases.begin(), cases.end(), std::size_t{0},
                         [](std::size_t acc, const PatientCase& c) {
                           return acc + c.lesion_index.size();
                         });
}

nlohmann::json cohort_spec_to_json(const CohortSpec& s) {
  json j;
  j["n_train"] = s.n_train;
  j["n_test"] = s.n_test;
  j["dims"] = {s.dims.x, s.dims.y, s.dims.z};
  j["channels"] = s.channels;
  j["spacing_mm"] = {s.spacing_mm[0], s.spacing_mm[1], s.spacing_mm[2]};
  j["low_count"] = s.low_count;
  j["mid_count"] = s.mid_count;
  j["high_count"] = s.high_count;
  j["radius_xy_mm"] = s.radius_xy_mm;
  j["radius_z_mm"] = s.radius_z_mm;
  j["lesion_contrast"] = s.lesion_contrast;
  j["contrast_floor"] = s.contrast_floor;
  j["noise_scale"] = s.noise_scale;
  j["distractors_min"] = s.distractors_min;
  j["distractors_max"] = s.distractors_max;
  j["distractor_strength"] = s.distractor_strength;
  j["connectivity"] = s.connectivity == morph::Connectivity::Faces6 ? 6 : 26;
  j["seed"] = s.seed;
  return j;
}

CohortSpec cohort_spec_from_json(const nlohmann::json& j) {
  CohortSpec s;
  try {
    if (j.contains("n_train")) s.n_train = j.at("n_train").get<int>();
    if (j.contains("n_test")) s.n_test = j.at("n_test").get<int>();
    if (j.contains("dims")) {
      s.dims = {j.at("dims").at(0).get<int>(), j.at("dims").at(1).get<int>(),
                j.at("dims").at(2).get<int>()};
    }
    if (j.contains("channels")) s.channels = j.at("channels").get<int>();
    if (j.contains("spacing_mm")) {
      s.spacing_mm = {j.at("spacing_mm").at(0).get<double>(),
                      j.at("spacing_mm").at(1).get<double>(),
                      j.at("spacing_mm").at(2).get<double>()};
    }
    if (j.contains("low_count")) s.low_count = j.at("low_count").get<std::array<int, 2>>();
    if (j.contains("mid_count")) s.mid_count = j.at("mid_count").get<std::array<int, 2>>();
    if (j.contains("high_count")) s.high_count = j.at("high_count").get<std::array<int, 2>>();
    if (j.contains("radius_xy_mm"))
      s.radius_xy_mm = j.at("radius_xy_mm").get<std::array<double, 2>>();
    if (j.contains("radius_z_mm"))
      s.radius_z_mm = j.at("radius_z_mm").get<std::array<double, 2>>();
    if (j.contains("lesion_contrast"))
      s.lesion_contrast = j.at("lesion_contrast").get<std::vector<double>>();
    if (j.contains("contrast_floor"))
      s.contrast_floor = j.at("contrast_floor").get<double>();
    if (j.contains("noise_scale")) s.noise_scale = j.at("noise_scale").get<double>();
    if (j.contains("distractors_min"))
      s.distractors_min = j.at("distractors_min").get<int>();
    if (j.contains("distractors_max"))
      s.distractors_max = j.at("distractors_max").get<int>();
    if (j.contains("distractor_strength"))
      s.distractor_strength = j.at("distractor_strength").get<double>();
    if (j.contains("connectivity")) {
      const int c = j.at("connectivity").get<int>();
      if (c != 6 && c != 26) throw ConfigError("connectivity must be 6 or 26");
      s.connectivity = c == 6 ? morph::Connectivity::Faces6
                              : morph::Connectivity::Full26;
    }
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad cohort spec: ") + e.what());
  }
  // Default contrast vector must track a non-default channel count.
  if (!j.contains("lesion_contrast") &&
      static_cast<int>(s.lesion_contrast.size()) != s.channels) {
    s.lesion_contrast.assign(s.channels, 1.0);
    for (int c = 0; c < s.channels; ++c)
      s.lesion_contrast[c] = 0.6 + 0.2 * (c % 4);
  }
  s.validate();
  return s;
}

}  // namespace rbseg::synth
