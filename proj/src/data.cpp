#include "featwarp/data.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "featwarp/error.h"

namespace featwarp {

FeatureMatrix::FeatureMatrix(std::vector<std::string> names, Matrix values)
    : names_(std::move(names)), values_(std::move(values)) {
  if (names_.size() != values_.cols())
    throw Error(ErrorCode::SchemaMismatch, "column name count " + std::to_string(names_.size()) +
                                               " does not match column count " + std::to_string(values_.cols()));
  for (std::size_t j = 0; j < names_.size(); ++j) {
    if (names_[j].empty()) throw Error(ErrorCode::SchemaMismatch, "empty column name at index " + std::to_string(j));
    if (!index_.emplace(names_[j], j).second)
      throw Error(ErrorCode::SchemaMismatch, "duplicate column name '" + names_[j] + "'");
  }
  for (std::size_t r = 0; r < values_.rows(); ++r)
    for (std::size_t c = 0; c < values_.cols(); ++c)
      if (!std::isfinite(values_(r, c)))
        throw Error(ErrorCode::ParseError,
                    "non-finite value in column '" + names_[c] + "' at row " + std::to_string(r));
}

std::optional<std::size_t> FeatureMatrix::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t FeatureMatrix::index_of(const std::string& name) const {
  auto idx = find(name);
  if (!idx) throw Error(ErrorCode::UnknownFeature, "no column named '" + name + "'");
  return *idx;
}

std::vector<double> FeatureMatrix::column(const std::string& name) const { return values_.col(index_of(name)); }

FeatureMatrix FeatureMatrix::select(const std::vector<std::string>& names) const {
  if (names == names_) return *this;
  std::vector<std::size_t> src;
  src.reserve(names.size());
  for (const auto& n : names) {
    auto idx = find(n);
    if (!idx) throw Error(ErrorCode::SchemaMismatch, "expected column '" + n + "' is missing");
    src.push_back(*idx);
  }
  Matrix out(rows(), names.size());
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c = 0; c < src.size(); ++c) out(r, c) = values_(r, src[c]);
  return FeatureMatrix(names, std::move(out));
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  Matrix out(rows.size(), cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto src = values_.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return FeatureMatrix(names_, std::move(out));
}

FeatureMatrix FeatureMatrix::with_values(Matrix values) const {
  if (values.cols() != cols()) throw Error(ErrorCode::SchemaMismatch, "column count mismatch");
  return FeatureMatrix(names_, std::move(values));
}

FeatureMatrix FeatureMatrix::with_appended(const std::string& name, std::span<const double> values) const {
  if (values.size() != rows()) throw Error(ErrorCode::SchemaMismatch, "appended column has wrong length");
  Matrix out(rows(), cols() + 1);
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < cols(); ++c) out(r, c) = values_(r, c);
    out(r, cols()) = values[r];
  }
  auto names = names_;
  names.push_back(name);
  return FeatureMatrix(std::move(names), std::move(out));
}

void LabeledDataset::validate() const {
  if (target.size() != features.rows())
    throw Error(ErrorCode::SchemaMismatch, "target length " + std::to_string(target.size()) +
                                               " does not match row count " + std::to_string(features.rows()));
  for (double y : target) {
    if (!std::isfinite(y)) throw Error(ErrorCode::ParseError, "non-finite target value");
    if (task == TaskKind::Classification && y != 0.0 && y != 1.0)
      throw Error(ErrorCode::ParseError, "classification target must be 0/1 coded");
  }
}

LabeledDataset LabeledDataset::select_rows(std::span<const std::size_t> rows) const {
  LabeledDataset out = *this;
  out.features = features.select_rows(rows);
  out.target.clear();
  for (auto r : rows) out.target.push_back(target[r]);
  return out;
}

LabeledDataset LabeledDataset::select_features(const std::vector<std::string>& names) const {
  LabeledDataset out = *this;
  out.features = features.select(names);
  return out;
}

void StandardizationParams::validate() const {
  if (means.size() != names.size() || sds.size() != names.size())
    throw Error(ErrorCode::SchemaMismatch, "standardization vectors have inconsistent lengths");
  for (std::size_t j = 0; j < sds.size(); ++j)
    if (!(sds[j] > 0.0) || !std::isfinite(sds[j]) || !std::isfinite(means[j]))
      throw Error(ErrorCode::ConstantColumn, "invalid scale for '" + names[j] + "'");
}

FeatureGroups::FeatureGroups(std::vector<FeatureGroup> groups, std::size_t n_columns)
    : groups_(std::move(groups)), n_columns_(n_columns) {
  std::set<std::size_t> seen;
  std::set<std::string> names;
  for (const auto& g : groups_) {
    if (g.name.empty()) throw Error(ErrorCode::InvalidGroups, "group with empty name");
    if (!names.insert(g.name).second) throw Error(ErrorCode::InvalidGroups, "duplicate group '" + g.name + "'");
    if (g.columns.empty()) throw Error(ErrorCode::InvalidGroups, "group '" + g.name + "' is empty");
    for (auto c : g.columns) {
      if (c >= n_columns_)
        throw Error(ErrorCode::InvalidGroups, "group '" + g.name + "' references column " + std::to_string(c));
      if (!seen.insert(c).second)
        throw Error(ErrorCode::InvalidGroups, "column " + std::to_string(c) + " is in more than one group");
    }
  }
}

FeatureGroups FeatureGroups::from_names(
    const std::vector<std::pair<std::string, std::vector<std::string>>>& groups,
    const std::vector<std::string>& schema) {
  std::vector<FeatureGroup> out;
  for (const auto& [name, cols] : groups) {
    FeatureGroup g{name, {}};
    for (const auto& c : cols) {
      auto it = std::find(schema.begin(), schema.end(), c);
      if (it == schema.end()) throw Error(ErrorCode::InvalidGroups, "group '" + name + "' names unknown column '" + c + "'");
      g.columns.push_back(static_cast<std::size_t>(it - schema.begin()));
    }
    out.push_back(std::move(g));
  }
  return FeatureGroups(std::move(out), schema.size());
}

std::vector<std::size_t> FeatureGroups::passthrough() const {
  std::vector<bool> used(n_columns_, false);
  for (const auto& g : groups_)
    for (auto c : g.columns) used[c] = true;
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < n_columns_; ++c)
    if (!used[c]) out.push_back(c);
  return out;
}

const FeatureGroup* FeatureGroups::find(const std::string& name) const {
  for (const auto& g : groups_)
    if (g.name == name) return &g;
  return nullptr;
}

double mean(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

StandardizationParams fit_standardization(const FeatureMatrix& data) {
  if (data.rows() < 2) throw Error(ErrorCode::EmptyData, "at least two rows are needed to fit standardization");
  StandardizationParams params;
  params.names = data.names();
  for (std::size_t j = 0; j < data.cols(); ++j) {
    auto col = data.values().col(j);
    const double m = mean(col);
    const double sd = sample_sd(col);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(m))))
      throw Error(ErrorCode::ConstantColumn, "column '" + data.names()[j] + "' has zero variance");
    params.means.push_back(m);
    params.sds.push_back(sd);
  }
  return params;
}

namespace {

void check_schema(const StandardizationParams& params, const FeatureMatrix& data) {
  if (data.names() != params.names)
    throw Error(ErrorCode::SchemaMismatch, "columns do not match the standardization parameters");
}

}  // namespace

FeatureMatrix apply_standardization(const StandardizationParams& params, const FeatureMatrix& data) {
  check_schema(params, data);
  Matrix out(data.rows(), data.cols());
  for (std::size_t r = 0; r < data.rows(); ++r)
    for (std::size_t c = 0; c < data.cols(); ++c) out(r, c) = (data(r, c) - params.means[c]) / params.sds[c];
  return data.with_values(std::move(out));
}

FeatureMatrix invert_standardization(const StandardizationParams& params, const FeatureMatrix& data) {
  check_schema(params, data);
  Matrix out(data.rows(), data.cols());
  for (std::size_t r = 0; r < data.rows(); ++r)
    for (std::size_t c = 0; c < data.cols(); ++c) out(r, c) = data(r, c) * params.sds[c] + params.means[c];
  return data.with_values(std::move(out));
}

Matrix correlation_matrix(const FeatureMatrix& data) {
  const auto z = apply_standardization(fit_standardization(data), data);
  const std::size_t p = data.cols();
  const double denom = static_cast<double>(data.rows() - 1);
  Matrix r(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    r(i, i) = 1.0;
    for (std::size_t j = i + 1; j < p; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < data.rows(); ++k) s += z(k, i) * z(k, j);
      const double v = std::clamp(s / denom, -1.0, 1.0);
      r(i, j) = v;
      r(j, i) = v;
    }
  }
  return r;
}

CorrelationSummary strongest_correlation_summary(const FeatureMatrix& data, const FeatureGroups& groups) {
  if (groups.n_columns() != 0 && groups.n_columns() != data.cols())
    throw Error(ErrorCode::InvalidGroups, "groups were built for a different column count");
  const Matrix r = correlation_matrix(data);
  const std::size_t p = data.cols();
  CorrelationSummary out;
  out.names = data.names();
  out.strongest.assign(p, 0.0);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      if (i != j) out.strongest[i] = std::max(out.strongest[i], std::abs(r(i, j)));

  for (const auto& g : groups.groups()) {
    std::vector<bool> member(p, false);
    for (auto c : g.columns) member[c] = true;
    GroupCorrelationSummary s{g.name, 0.0, 0.0, 0.0};
    std::vector<double> within;
    for (auto i : g.columns) {
      double best = 0.0;
      for (auto j : g.columns)
        if (i != j) best = std::max(best, std::abs(r(i, j)));
      within.push_back(best);
      for (std::size_t j = 0; j < p; ++j)
        if (!member[j]) s.max_cross = std::max(s.max_cross, std::abs(r(i, j)));
    }
    s.median_strongest = median(within);
    s.min_strongest = *std::min_element(within.begin(), within.end());
    out.groups.push_back(s);
  }
  return out;
}

}  // namespace featwarp
