#include <algorithm>
#include <cmath>
#include <limits>

#include "featwarp/diagnostics.h"
#include "featwarp/error.h"

namespace featwarp {

void GridSpec::validate() const {
  if (resolution < 2) throw Error(ErrorCode::InvalidParams, "grid resolution must be at least 2");
  if (!(lower >= 0.0 && lower < upper && upper <= 1.0))
    throw Error(ErrorCode::InvalidParams, "grid trim bounds must satisfy 0 <= lower < upper <= 1");
}

std::string to_string(EffectKind kind) { return kind == EffectKind::Pdp ? "pdp" : "ale"; }

double quantile_sorted(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw Error(ErrorCode::EmptyData, "quantile of empty data");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0 || lo == hi) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

namespace {

std::vector<double> sorted_copy(std::span<const double> values) {
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  return s;
}

std::vector<double> strictly_ascending(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x > out.back()) out.push_back(x);
  return out;
}

struct Prepared {
  Matrix x;
  std::size_t column;
};

std::size_t model_column(const Predictor& model, const std::string& feature) {
  const auto& names = model.input_names();
  auto it = std::find(names.begin(), names.end(), feature);
  if (it == names.end()) throw Error(ErrorCode::UnknownFeature, "model has no input named '" + feature + "'");
  return static_cast<std::size_t>(it - names.begin());
}

// Model-ordered copy of the data plus the column index of `feature`.
Prepared prepare(const Predictor& model, const FeatureMatrix& data, const std::string& feature) {
  if (data.rows() == 0) throw Error(ErrorCode::EmptyData, "diagnostics need at least one row");
  const std::size_t column = model_column(model, feature);
  return {data.select(model.input_names()).values(), column};
}

std::vector<double> predict(const Predictor& model, Matrix rows) {
  return model.predict(FeatureMatrix(model.input_names(), std::move(rows)));
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Bin index j with edges[j] < v <= edges[j+1]; the lowest edge belongs to bin 0.
std::size_t bin_of(const std::vector<double>& edges, double v) {
  const auto pos = static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), v) - edges.begin());
  const std::size_t bins = edges.size() - 1;
  if (pos == 0) return 0;
  return std::min(pos - 1, bins - 1);
}

}  // namespace

std::vector<double> make_grid(std::span<const double> values, const GridSpec& spec) {
  spec.validate();
  const auto sorted = sorted_copy(values);
  std::vector<double> grid;
  const double steps = static_cast<double>(spec.resolution - 1);
  if (spec.strategy == GridStrategy::Quantile) {
    for (std::size_t k = 0; k < spec.resolution; ++k)
      grid.push_back(quantile_sorted(sorted, spec.lower + (spec.upper - spec.lower) * static_cast<double>(k) / steps));
  } else {
    const double lo = quantile_sorted(sorted, spec.lower);
    const double hi = quantile_sorted(sorted, spec.upper);
    for (std::size_t k = 0; k < spec.resolution; ++k) grid.push_back(lo + (hi - lo) * static_cast<double>(k) / steps);
  }
  grid = strictly_ascending(grid);
  if (grid.size() < 2) throw Error(ErrorCode::TooFewDistinctValues, "grid collapses to a single value");
  return grid;
}

EffectCurve pdp_1d(const Predictor& model, const FeatureMatrix& data, const std::string& feature,
                   const GridSpec& grid) {
  if (data.rows() == 0) throw Error(ErrorCode::EmptyData, "diagnostics need at least one row");
  const auto g = make_grid(data.column(feature), grid);
  return pdp_1d(model, data, feature, g);
}

EffectCurve pdp_1d(const Predictor& model, const FeatureMatrix& data, const std::string& feature,
                   std::span<const double> grid) {
  const Prepared prep = prepare(model, data, feature);
  EffectCurve curve;
  curve.feature = feature;
  curve.kind = EffectKind::Pdp;
  curve.grid.assign(grid.begin(), grid.end());
  for (std::size_t k = 1; k < curve.grid.size(); ++k)
    if (!(curve.grid[k] > curve.grid[k - 1])) throw Error(ErrorCode::InvalidParams, "grid must be strictly ascending");

  for (double g : curve.grid) {
    Matrix rows = prep.x;
    for (std::size_t r = 0; r < rows.rows(); ++r) rows(r, prep.column) = g;
    curve.values.push_back(mean_of(predict(model, std::move(rows))));
  }

  curve.support.assign(curve.grid.size(), 0);
  std::vector<double> mids;
  for (std::size_t k = 1; k < curve.grid.size(); ++k) mids.push_back(curve.grid[k - 1] + (curve.grid[k] - curve.grid[k - 1]) / 2.0);
  for (std::size_t r = 0; r < prep.x.rows(); ++r) {
    const double v = prep.x(r, prep.column);
    ++curve.support[static_cast<std::size_t>(std::lower_bound(mids.begin(), mids.end(), v) - mids.begin())];
  }
  return curve;
}

EffectSurface pdp_2d(const Predictor& model, const FeatureMatrix& data, const std::string& feature_a,
                     const std::string& feature_b, const GridSpec& grid) {
  if (data.rows() == 0) throw Error(ErrorCode::EmptyData, "diagnostics need at least one row");
  const auto ga = make_grid(data.column(feature_a), grid);
  const auto gb = make_grid(data.column(feature_b), grid);
  return pdp_2d(model, data, feature_a, feature_b, ga, gb);
}

EffectSurface pdp_2d(const Predictor& model, const FeatureMatrix& data, const std::string& feature_a,
                     const std::string& feature_b, std::span<const double> grid_a, std::span<const double> grid_b) {
  const Prepared pa = prepare(model, data, feature_a);
  const std::size_t cb = model_column(model, feature_b);
  if (cb == pa.column) throw Error(ErrorCode::InvalidParams, "2-D effects need two distinct features");
  EffectSurface s;
  s.feature_a = feature_a;
  s.feature_b = feature_b;
  s.grid_a.assign(grid_a.begin(), grid_a.end());
  s.grid_b.assign(grid_b.begin(), grid_b.end());
  s.kind = EffectKind::Pdp;
  s.values = Matrix(s.grid_a.size(), s.grid_b.size());
  for (std::size_t i = 0; i < s.grid_a.size(); ++i)
    for (std::size_t j = 0; j < s.grid_b.size(); ++j) {
      Matrix rows = pa.x;
      for (std::size_t r = 0; r < rows.rows(); ++r) {
        rows(r, pa.column) = s.grid_a[i];
        rows(r, cb) = s.grid_b[j];
      }
      s.values(i, j) = mean_of(predict(model, std::move(rows)));
    }
  return s;
}

std::vector<double> ale_edges(std::span<const double> values, std::size_t n_bins) {
  if (n_bins < 1) throw Error(ErrorCode::InvalidParams, "ALE needs at least one bin");
  if (values.empty()) throw Error(ErrorCode::EmptyData, "ALE on empty data");
  const auto sorted = sorted_copy(values);
  std::vector<double> edges;
  for (std::size_t k = 0; k <= n_bins; ++k)
    edges.push_back(quantile_sorted(sorted, static_cast<double>(k) / static_cast<double>(n_bins)));
  edges = strictly_ascending(edges);
  if (edges.size() < 2) throw Error(ErrorCode::TooFewDistinctValues, "feature has fewer than 2 distinct values");
  return edges;
}

EffectCurve ale_1d(const Predictor& model, const FeatureMatrix& data, const std::string& feature,
                   std::size_t n_bins) {
  const Prepared prep = prepare(model, data, feature);
  const std::size_t n = prep.x.rows();
  const auto column = prep.x.col(prep.column);
  std::vector<double> edges = ale_edges(column, n_bins);

  // Merge empty bins into their left neighbour by dropping the shared edge.
  std::vector<std::size_t> bin(n);
  for (;;) {
    std::vector<std::size_t> counts(edges.size() - 1, 0);
    for (std::size_t r = 0; r < n; ++r) ++counts[bin[r] = bin_of(edges, column[r])];
    std::size_t empty = 0;
    for (std::size_t j = 1; j < counts.size() && empty == 0; ++j)
      if (counts[j] == 0) empty = j;
    if (empty == 0) break;
    edges.erase(edges.begin() + static_cast<std::ptrdiff_t>(empty));
  }
  const std::size_t bins = edges.size() - 1;

  Matrix hi = prep.x, lo = prep.x;
  for (std::size_t r = 0; r < n; ++r) {
    hi(r, prep.column) = edges[bin[r] + 1];
    lo(r, prep.column) = edges[bin[r]];
  }
  const auto f_hi = predict(model, std::move(hi));
  const auto f_lo = predict(model, std::move(lo));

  std::vector<double> sum(bins, 0.0);
  std::vector<std::size_t> count(bins, 0);
  for (std::size_t r = 0; r < n; ++r) {
    sum[bin[r]] += f_hi[r] - f_lo[r];
    ++count[bin[r]];
  }

  std::vector<double> acc(bins + 1, 0.0);
  for (std::size_t j = 0; j < bins; ++j) acc[j + 1] = acc[j] + sum[j] / static_cast<double>(count[j]);
  double centre = 0.0;
  for (std::size_t j = 0; j < bins; ++j) centre += static_cast<double>(count[j]) * (acc[j] + acc[j + 1]) / 2.0;
  centre /= static_cast<double>(n);

  EffectCurve curve;
  curve.feature = feature;
  curve.kind = EffectKind::Ale;
  curve.grid = edges;
  for (double a : acc) curve.values.push_back(a - centre);
  curve.support = count;
  return curve;
}

EffectSurface ale_2d(const Predictor& model, const FeatureMatrix& data, const std::string& feature_a,
                     const std::string& feature_b, std::size_t n_bins) {
  const Prepared prep = prepare(model, data, feature_a);
  const std::size_t ca = prep.column;
  const std::size_t cb = model_column(model, feature_b);
  if (ca == cb) throw Error(ErrorCode::InvalidParams, "2-D effects need two distinct features");
  const std::size_t n = prep.x.rows();
  const auto col_a = prep.x.col(ca);
  const auto col_b = prep.x.col(cb);
  const auto ea = ale_edges(col_a, n_bins);
  const auto eb = ale_edges(col_b, n_bins);
  const std::size_t ka = ea.size() - 1, kb = eb.size() - 1;

  std::vector<std::size_t> ba(n), bb(n);
  Matrix m11 = prep.x, m01 = prep.x, m10 = prep.x, m00 = prep.x;
  for (std::size_t r = 0; r < n; ++r) {
    ba[r] = bin_of(ea, col_a[r]);
    bb[r] = bin_of(eb, col_b[r]);
    m11(r, ca) = ea[ba[r] + 1], m11(r, cb) = eb[bb[r] + 1];
    m01(r, ca) = ea[ba[r]], m01(r, cb) = eb[bb[r] + 1];
    m10(r, ca) = ea[ba[r] + 1], m10(r, cb) = eb[bb[r]];
    m00(r, ca) = ea[ba[r]], m00(r, cb) = eb[bb[r]];
  }
  const auto f11 = predict(model, std::move(m11));
  const auto f01 = predict(model, std::move(m01));
  const auto f10 = predict(model, std::move(m10));
  const auto f00 = predict(model, std::move(m00));

  Matrix delta(ka, kb);
  Matrix count(ka, kb);
  for (std::size_t r = 0; r < n; ++r) {
    delta(ba[r], bb[r]) += (f11[r] - f01[r]) - (f10[r] - f00[r]);
    count(ba[r], bb[r]) += 1.0;
  }
  for (std::size_t j = 0; j < ka; ++j)
    for (std::size_t k = 0; k < kb; ++k)
      if (count(j, k) > 0.0) delta(j, k) /= count(j, k);

  Matrix filled = delta;
  for (std::size_t j = 0; j < ka; ++j)
    for (std::size_t k = 0; k < kb; ++k) {
      if (count(j, k) > 0.0) continue;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t jj = 0; jj < ka; ++jj)
        for (std::size_t kk = 0; kk < kb; ++kk) {
          if (count(jj, kk) == 0.0) continue;
          const double dj = static_cast<double>(jj) - static_cast<double>(j);
          const double dk = static_cast<double>(kk) - static_cast<double>(k);
          if (dj * dj + dk * dk < best) {
            best = dj * dj + dk * dk;
            filled(j, k) = delta(jj, kk);
          }
        }
    }

  Matrix h(ka + 1, kb + 1);
  for (std::size_t j = 1; j <= ka; ++j)
    for (std::size_t k = 1; k <= kb; ++k)
      h(j, k) = h(j - 1, k) + h(j, k - 1) - h(j - 1, k - 1) + filled(j - 1, k - 1);

  // Each row sits at fractional offsets (ta, tb) inside its cell; h is read bilinearly there so that
  // first-order effects and the centring average follow the data, not the cell midpoints.
  std::vector<double> ta(n), tb(n);
  for (std::size_t r = 0; r < n; ++r) {
    ta[r] = (col_a[r] - ea[ba[r]]) / (ea[ba[r] + 1] - ea[ba[r]]);
    tb[r] = (col_b[r] - eb[bb[r]]) / (eb[bb[r] + 1] - eb[bb[r]]);
  }
  std::vector<double> step_a(ka, 0.0), step_b(kb, 0.0), na(ka, 0.0), nb(kb, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t j = ba[r], k = bb[r];
    step_a[j] += (1.0 - tb[r]) * (h(j + 1, k) - h(j, k)) + tb[r] * (h(j + 1, k + 1) - h(j, k + 1));
    step_b[k] += (1.0 - ta[r]) * (h(j, k + 1) - h(j, k)) + ta[r] * (h(j + 1, k + 1) - h(j + 1, k));
    na[j] += 1.0;
    nb[k] += 1.0;
  }
  std::vector<double> fa(ka + 1, 0.0), fb(kb + 1, 0.0);
  for (std::size_t j = 0; j < ka; ++j) fa[j + 1] = fa[j] + (na[j] > 0.0 ? step_a[j] / na[j] : 0.0);
  for (std::size_t k = 0; k < kb; ++k) fb[k + 1] = fb[k] + (nb[k] > 0.0 ? step_b[k] / nb[k] : 0.0);

  Matrix f(ka + 1, kb + 1);
  for (std::size_t j = 0; j <= ka; ++j)
    for (std::size_t k = 0; k <= kb; ++k) f(j, k) = h(j, k) - fa[j] - fb[k];
  double centre = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t j = ba[r], k = bb[r];
    centre += (1.0 - ta[r]) * (1.0 - tb[r]) * f(j, k) + ta[r] * (1.0 - tb[r]) * f(j + 1, k) +
              (1.0 - ta[r]) * tb[r] * f(j, k + 1) + ta[r] * tb[r] * f(j + 1, k + 1);
  }
  centre /= static_cast<double>(n);
  for (double& v : f.data()) v -= centre;

  EffectSurface s;
  s.feature_a = feature_a;
  s.feature_b = feature_b;
  s.grid_a = ea;
  s.grid_b = eb;
  s.values = std::move(f);
  s.kind = EffectKind::Ale;
  return s;
}

}  // namespace featwarp
