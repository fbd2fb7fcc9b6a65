#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "featwarp/data.h"
#include "featwarp/models.h"

namespace featwarp {

enum class GridStrategy { Quantile, Uniform };

struct GridSpec {
  GridStrategy strategy = GridStrategy::Quantile;
  std::size_t resolution = 20;
  // Quantile trim bounds.
  double lower = 0.01;
  double upper = 0.99;

  void validate() const;
};

// Type-7 (linear interpolation) quantile of sorted data.
double quantile_sorted(std::span<const double> sorted, double prob);

// Strictly ascending evaluation grid for `values` (duplicates removed).
std::vector<double> make_grid(std::span<const double> values, const GridSpec& spec);

enum class EffectKind { Pdp, Ale };

std::string to_string(EffectKind kind);

struct EffectCurve {
  std::string feature;
  std::vector<double> grid;
  std::vector<double> values;
  EffectKind kind = EffectKind::Pdp;
  // PDP: rows whose value is nearer to grid[k] than to its neighbours (one per grid point).
  // ALE: rows falling in each bin (grid[k], grid[k+1]] (one per interval).
  std::vector<std::size_t> support;
};

struct EffectSurface {
  std::string feature_a;
  std::string feature_b;
  std::vector<double> grid_a;
  std::vector<double> grid_b;
  // grid_a.size() x grid_b.size()
  Matrix values;
  EffectKind kind = EffectKind::Pdp;
};

/// Partial dependence: at each grid point g, the mean over all rows of the
/// prediction with `feature` set to g. Rows are averaged in data order,
/// grid point by grid point.
EffectCurve pdp_1d(const Predictor& model, const FeatureMatrix& data, const std::string& feature,
                   const GridSpec& grid = {});
EffectCurve pdp_1d(const Predictor& model, const FeatureMatrix& data, const std::string& feature,
                   std::span<const double> grid);

EffectSurface pdp_2d(const Predictor& model, const FeatureMatrix& data, const std::string& feature_a,
                     const std::string& feature_b, const GridSpec& grid = {});
EffectSurface pdp_2d(const Predictor& model, const FeatureMatrix& data, const std::string& feature_a,
                     const std::string& feature_b, std::span<const double> grid_a, std::span<const double> grid_b);

// Quantile bin edges used by ALE; coincident quantiles collapse into one edge.
std::vector<double> ale_edges(std::span<const double> values, std::size_t n_bins);

/// First-order accumulated local effects on quantile bins.
///
/// Bins that receive no rows are merged with their left neighbour. The
/// curve is centred so that sum_k support[k] * (v[k] + v[k+1]) / 2 = 0.
EffectCurve ale_1d(const Predictor& model, const FeatureMatrix& data, const std::string& feature,
                   std::size_t n_bins = 20);

/// Second-order (pure interaction) accumulated local effects.
///
/// Cells without rows take the cross-difference of the nearest non-empty
/// cell (index distance, row-major scan order on ties) before
/// accumulation; first-order effects and the overall mean are removed.
EffectSurface ale_2d(const Predictor& model, const FeatureMatrix& data, const std::string& feature_a,
                     const std::string& feature_b, std::size_t n_bins = 20);

enum class Loss { Mse, LogLoss, ErrorRate };

std::string to_string(Loss loss);
// Throws UnknownLoss listing the valid names.
Loss parse_loss(const std::string& name);
double evaluate_loss(Loss loss, std::span<const double> truth, std::span<const double> predicted);

struct FeatureImportance {
  std::string feature;
  double importance = 0.0;  // mean permuted loss - baseline
  double sd = 0.0;          // sample sd of the replicate losses
  std::vector<double> replicate_losses;
  std::size_t rank = 0;     // 1 = most important
};

struct ImportanceReport {
  std::vector<FeatureImportance> features;  // model input order (evaluated inputs only)
  Loss loss = Loss::Mse;
  std::size_t n_permutations = 0;
  std::uint64_t seed = 0;
  double baseline_loss = 0.0;

  const FeatureImportance& at(const std::string& feature) const;
  std::vector<const FeatureImportance*> ranked() const;
};

struct ImportanceOptions {
  Loss loss = Loss::LogLoss;
  std::size_t n_permutations = 20;
  std::uint64_t seed = 1;
  // Inputs to evaluate; empty means all of them. Seeds depend only on the
  // input's position in the model schema, so a subset reproduces the full run.
  std::vector<std::string> features;
  // Features are processed on up to this many threads; results do not depend on it.
  std::size_t workers = 1;
};

/// Permutation importance of every model input.
///
/// Replicate r of feature j (model input order) shuffles that column with
/// a Fisher-Yates draw seeded by derive_seed(seed, j * n_permutations + r).
ImportanceReport permutation_importance(const Predictor& model, const FeatureMatrix& data,
                                        std::span<const double> target, const ImportanceOptions& options);

}  // namespace featwarp
