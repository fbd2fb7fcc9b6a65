#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "featwarp/data.h"

namespace featwarp {

/// Latent-factor model for a 46-feature texture/terrain dataset.
///
/// Texture features (40) are Gabor-like settings: 5 bandwidths x 2
/// anisotropy factors x 4 aggregations. Each loads on a global texture
/// factor, a contrast factor (anisotropic min/median against the rest), a
/// scale factor (wavelength), a factor shared by its min/median or
/// max/range partner, and unique noise. Terrain features (6) come in
/// correlated pairs; slope also loads weakly on the global texture factor.
struct SurrogateSpec {
  std::size_t n_samples = 1000;

  double global_loading = 0.8;
  double contrast_positive = 0.55;
  double contrast_negative = -0.15;
  double scale_loading = 0.3;
  double pair_loading = 0.45;
  double noise = 0.26;
  // Extra noise on range-aggregated features, per bandwidth step.
  double range_noise_step = 0.06;

  double terrain_pair_loading = 0.78;
  double cross_loading = 0.30;

  // Logit coefficients on the standardized texture-block mean and on slope.
  double texture_effect = 1.6;
  double terrain_effect = 2.2;

  // false: every feature is independent standard noise (labels unchanged in form).
  bool correlated = true;
  // Throw CalibrationFailed when the generated data misses a target.
  bool check_calibration = true;
};

struct SurrogateData {
  LabeledDataset data;
  // "texture" then "terrain", as column names.
  std::vector<std::pair<std::string, std::vector<std::string>>> groups;
};

std::vector<std::string> texture_feature_names();
std::vector<std::string> terrain_feature_names();

// Labels are exactly balanced: the floor(n / 2) rows with the largest noisy logit are positive.
SurrogateData generate_surrogate(const SurrogateSpec& spec, std::uint64_t seed);

struct CalibrationCheck {
  std::string statistic;
  double target = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double actual = 0.0;
  bool within = false;
};

struct CalibrationReport {
  std::vector<CalibrationCheck> checks;
  bool all_within() const;
};

// Compares correlation statistics of the "texture" and "terrain" groups with their targets.
CalibrationReport calibration_report(const FeatureMatrix& features,
                                     const std::vector<std::pair<std::string, std::vector<std::string>>>& groups);

}  // namespace featwarp
