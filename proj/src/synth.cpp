#include "featwarp/synth.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "featwarp/error.h"
#include "featwarp/random.h"

namespace featwarp {

namespace {

constexpr int kBandwidths[] = {5, 10, 20, 30, 50};
constexpr const char* kAggregations[] = {"min", "median", "max", "range"};

}  // namespace

std::vector<std::string> texture_feature_names() {
  std::vector<std::string> names;
  for (int bw : kBandwidths)
    for (int aniso = 1; aniso <= 2; ++aniso)
      for (const char* agg : kAggregations)
        names.push_back("gabor_bw" + std::to_string(bw) + "_a" + std::to_string(aniso) + "_" + agg);
  return names;
}

std::vector<std::string> terrain_feature_names() {
  return {"slope", "solar_radiation", "catchment_slope", "log_catchment_height", "log_catchment_area", "terrain_aux"};
}

SurrogateData generate_surrogate(const SurrogateSpec& spec, std::uint64_t seed) {
  if (spec.n_samples < 10) throw Error(ErrorCode::InvalidParams, "surrogate needs at least 10 samples");
  const std::size_t n = spec.n_samples;
  const auto tex_names = texture_feature_names();
  const auto ter_names = terrain_feature_names();
  const std::size_t nt = tex_names.size(), nr = ter_names.size();

  struct Loading {
    double contrast, scale, noise;
    std::size_t pair;
  };
  std::vector<Loading> loadings;
  for (std::size_t k = 0; k < 5; ++k)
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t g = 0; g < 4; ++g) {
        const bool min_or_median = g < 2;
        const double kk = static_cast<double>(k);
        Loading l;
        l.contrast = (a == 1 && min_or_median) ? spec.contrast_positive : spec.contrast_negative;
        l.scale = min_or_median ? -spec.scale_loading * (kk - 2.0) / 4.0 : spec.scale_loading * (kk - 2.0) / 2.0;
        l.noise = spec.noise + (g == 3 ? spec.range_noise_step * kk : 0.0);
        l.pair = (k * 2 + a) * 2 + (min_or_median ? 0 : 1);
        loadings.push_back(l);
      }

  Rng rng(seed);
  Matrix x(n, nt + nr);
  std::vector<double> texture_signal(n), slope_latent(n);
  const double tp = spec.terrain_pair_loading;
  const double tu = std::sqrt(std::max(0.0, 1.0 - tp * tp));
  const double cu = std::sqrt(std::max(0.0, 1.0 - spec.cross_loading * spec.cross_loading));

  for (std::size_t r = 0; r < n; ++r) {
    if (!spec.correlated) {
      for (std::size_t j = 0; j < nt + nr; ++j) x(r, j) = rng.normal();
      double s = 0.0;
      for (std::size_t j = 0; j < nt; ++j) s += x(r, j);
      texture_signal[r] = s;
      slope_latent[r] = x(r, nt);
      continue;
    }
    const double global = rng.normal();
    const double contrast = rng.normal();
    const double scale = rng.normal();
    double pairs[20];
    for (double& v : pairs) v = rng.normal();

    double signal = 0.0;
    for (std::size_t j = 0; j < nt; ++j) {
      const auto& l = loadings[j];
      const double v = spec.global_loading * global + l.contrast * contrast + l.scale * scale +
                       spec.pair_loading * pairs[l.pair] + l.noise * rng.normal();
      const double sd = std::sqrt(spec.global_loading * spec.global_loading + l.contrast * l.contrast +
                                  l.scale * l.scale + spec.pair_loading * spec.pair_loading + l.noise * l.noise);
      x(r, j) = v / sd;
      signal += x(r, j);
    }
    texture_signal[r] = signal;

    double terrain[3];
    for (double& v : terrain) v = rng.normal();
    double t[6];
    for (std::size_t j = 0; j < 6; ++j) t[j] = tp * terrain[j % 3] + tu * rng.normal();
    // slope, solar_radiation, catchment_slope, log_catchment_height, log_catchment_area, terrain_aux
    const double slope = spec.cross_loading * global + cu * t[0];
    x(r, nt + 0) = slope;
    x(r, nt + 1) = t[1];
    x(r, nt + 2) = t[3];
    x(r, nt + 3) = t[2];
    x(r, nt + 4) = t[5];
    x(r, nt + 5) = t[4];
    slope_latent[r] = slope;
  }

  // Latent units -> plausible measurement units.
  for (std::size_t j = 0; j < nt; ++j) {
    const double centre = 40.0 + 4.0 * static_cast<double>(j % 8);
    const double spread = 6.0 + static_cast<double>(j / 8);
    for (std::size_t r = 0; r < n; ++r) x(r, j) = centre + spread * x(r, j);
  }
  const double t_centre[] = {28.0, 1500.0, 24.0, 5.5, 9.0, 0.0};
  const double t_spread[] = {7.0, 250.0, 5.0, 0.6, 1.5, 1.0};
  for (std::size_t j = 0; j < nr; ++j)
    for (std::size_t r = 0; r < n; ++r) x(r, nt + j) = t_centre[j] + t_spread[j] * x(r, nt + j);

  const double sig_mean = mean(texture_signal), sig_sd = sample_sd(texture_signal);
  std::vector<double> latent(n);
  for (std::size_t r = 0; r < n; ++r) {
    double u = rng.uniform();
    while (u == 0.0) u = rng.uniform();
    const double noise = std::log(u / (1.0 - u));
    latent[r] = spec.texture_effect * (texture_signal[r] - sig_mean) / sig_sd + spec.terrain_effect * slope_latent[r] +
                noise;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return latent[a] > latent[b]; });

  SurrogateData out;
  auto names = tex_names;
  names.insert(names.end(), ter_names.begin(), ter_names.end());
  out.data.features = FeatureMatrix(names, std::move(x));
  out.data.target.assign(n, 0.0);
  for (std::size_t k = 0; k < n / 2; ++k) out.data.target[order[k]] = 1.0;
  out.data.task = TaskKind::Classification;
  out.data.target_name = "label";
  out.data.positive_label = "1";
  out.data.negative_label = "0";
  out.groups = {{"texture", tex_names}, {"terrain", ter_names}};

  if (spec.check_calibration) {
    const auto report = calibration_report(out.data.features, out.groups);
    for (const auto& c : report.checks)
      if (!c.within)
        throw Error(ErrorCode::CalibrationFailed,
                    c.statistic + ": target " + std::to_string(c.target) + ", actual " + std::to_string(c.actual) +
                        ", accepted [" + std::to_string(c.lower) + ", " + std::to_string(c.upper) + "]");
  }
  return out;
}

bool CalibrationReport::all_within() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.within; });
}

CalibrationReport calibration_report(const FeatureMatrix& features,
                                     const std::vector<std::pair<std::string, std::vector<std::string>>>& groups) {
  CalibrationReport report;
  report.checks = {
      {"texture median strongest |r|", 0.92, 0.87, 0.97, std::nan(""), false},
      {"texture minimum strongest |r|", 0.80, 0.72, 0.88, std::nan(""), false},
      {"terrain median strongest |r|", 0.60, 0.52, 0.68, std::nan(""), false},
      {"max texture-terrain |r|", 0.32, 0.0, 0.40, std::nan(""), false},
  };
  std::vector<std::pair<std::string, std::vector<std::string>>> wanted;
  for (const auto& g : groups)
    if (g.first == "texture" || g.first == "terrain") wanted.push_back(g);

  FeatureGroups resolved;
  try {
    resolved = FeatureGroups::from_names(wanted, features.names());
  } catch (const Error&) {
    return report;
  }
  const auto summary = strongest_correlation_summary(features, resolved);
  for (const auto& g : summary.groups) {
    if (g.name == "texture") {
      report.checks[0].actual = g.median_strongest;
      report.checks[1].actual = g.min_strongest;
    } else if (g.name == "terrain") {
      report.checks[2].actual = g.median_strongest;
    }
  }
  // Cross-block maximum: texture members against terrain members only.
  const auto* tex = resolved.find("texture");
  const auto* ter = resolved.find("terrain");
  if (tex && ter) {
    const Matrix r = correlation_matrix(features);
    double worst = 0.0;
    for (auto i : tex->columns)
      for (auto j : ter->columns) worst = std::max(worst, std::abs(r(i, j)));
    report.checks[3].actual = worst;
  }
  for (auto& c : report.checks) c.within = !std::isnan(c.actual) && c.actual >= c.lower && c.actual <= c.upper;
  return report;
}

}  // namespace featwarp
