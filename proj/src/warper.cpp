#include "featwarp/warper.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>

#include "featwarp/error.h"
#include "featwarp/symmetric_eigen.h"

namespace featwarp {

std::string to_string(WarperKind kind) {
  switch (kind) {
    case WarperKind::Identity: return "identity";
    case WarperKind::Pca: return "pca";
    case WarperKind::StructuredPca: return "structured-pca";
    case WarperKind::Orthogonalization: return "orthogonalization";
    case WarperKind::Path: return "path";
  }
  return "unknown";
}

WarperKind parse_warper_kind(const std::string& text) {
  for (auto k : {WarperKind::Identity, WarperKind::Pca, WarperKind::StructuredPca, WarperKind::Orthogonalization,
                 WarperKind::Path})
    if (to_string(k) == text) return k;
  throw Error(ErrorCode::ConfigError,
              "unknown warper kind '" + text + "' (expected identity, pca, structured-pca, orthogonalization, path)");
}

std::string to_string(PathKind kind) {
  switch (kind) {
    case PathKind::ClusterLine: return "cluster-line";
    case PathKind::LinearCombination: return "linear-combination";
    case PathKind::EndpointLine: return "endpoint-line";
  }
  return "unknown";
}

PathKind parse_path_kind(const std::string& text) {
  for (auto k : {PathKind::ClusterLine, PathKind::LinearCombination, PathKind::EndpointLine})
    if (to_string(k) == text) return k;
  throw Error(ErrorCode::ConfigError,
              "unknown path kind '" + text + "' (expected cluster-line, linear-combination, endpoint-line)");
}

PathSpec PathSpec::endpoint_line(std::vector<double> from, std::vector<double> to) {
  PathSpec spec;
  spec.kind = PathKind::EndpointLine;
  spec.from = std::move(from);
  spec.to = std::move(to);
  return spec;
}

PathSpec PathSpec::cluster_line(const Matrix& centers, std::size_t from_center, std::size_t to_center) {
  if (from_center >= centers.rows() || to_center >= centers.rows())
    throw Error(ErrorCode::InvalidParams, "cluster index out of range");
  PathSpec spec;
  spec.kind = PathKind::ClusterLine;
  for (std::size_t k = 0; k < centers.rows(); ++k) {
    auto row = centers.row(k);
    spec.centers.emplace_back(row.begin(), row.end());
  }
  spec.from_center = from_center;
  spec.to_center = to_center;
  spec.from = spec.centers[from_center];
  spec.to = spec.centers[to_center];
  return spec;
}

PathSpec PathSpec::linear_combination(std::vector<double> weights) {
  PathSpec spec;
  spec.kind = PathKind::LinearCombination;
  spec.weights = std::move(weights);
  spec.t_min = -2.0;
  spec.t_max = 2.0;
  return spec;
}

LinearWarper::LinearWarper(WarperKind kind, StandardizationParams standardization,
                           std::vector<std::string> output_names, Matrix forward_matrix,
                           std::vector<double> forward_offset, Matrix inverse_matrix, WarperMetadata metadata)
    : kind_(kind),
      standardization_(std::move(standardization)),
      output_names_(std::move(output_names)),
      forward_(std::move(forward_matrix)),
      offset_(std::move(forward_offset)),
      inverse_(std::move(inverse_matrix)),
      metadata_(std::move(metadata)) {
  standardization_.validate();
  const std::size_t p = standardization_.names.size();
  const std::size_t m = forward_.rows();
  if (forward_.cols() != p || inverse_.rows() != p || inverse_.cols() != m || offset_.size() != m ||
      output_names_.size() != m)
    throw Error(ErrorCode::SchemaMismatch, "warper matrices have inconsistent shapes");
  if (kind_ == WarperKind::Path ? m != p + 1 : m != p)
    throw Error(ErrorCode::SchemaMismatch, "warper output dimension does not fit its kind");

  std::set<std::string> seen;
  for (const auto& n : output_names_)
    if (n.empty() || !seen.insert(n).second)
      throw Error(ErrorCode::SchemaMismatch, "warper output names must be unique and non-empty ('" + n + "')");
  for (double v : forward_.data())
    if (!std::isfinite(v)) throw Error(ErrorCode::RankDeficient, "non-finite forward matrix entry");
  for (double v : inverse_.data())
    if (!std::isfinite(v)) throw Error(ErrorCode::RankDeficient, "non-finite inverse matrix entry");
  for (double v : offset_)
    if (!std::isfinite(v)) throw Error(ErrorCode::RankDeficient, "non-finite forward offset");

  const double left = max_abs_diff(inverse_ * forward_, Matrix::identity(p));
  if (left > 1e-10) throw Error(ErrorCode::RankDeficient, "inverse matrix does not invert the forward matrix");
  if (m == p && max_abs_diff(forward_ * inverse_, Matrix::identity(p)) > 1e-10)
    throw Error(ErrorCode::RankDeficient, "forward matrix does not invert the inverse matrix");
}

void LinearWarper::forward_row(std::span<const double> x, std::span<double> w) const {
  const std::size_t p = input_dim();
  if (kind_ == WarperKind::Identity) {
    std::copy(x.begin(), x.end(), w.begin());
    return;
  }
  std::vector<double> z(p);
  for (std::size_t j = 0; j < p; ++j) z[j] = (x[j] - standardization_.means[j]) / standardization_.sds[j];
  for (std::size_t i = 0; i < output_dim(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < p; ++j) s += forward_(i, j) * z[j];
    w[i] = s + offset_[i];
  }
}

void LinearWarper::inverse_row(std::span<const double> w, std::span<double> x) const {
  const std::size_t p = input_dim();
  if (kind_ == WarperKind::Identity) {
    std::copy(w.begin(), w.end(), x.begin());
    return;
  }
  std::vector<double> u(output_dim());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = w[j] - offset_[j];
  for (std::size_t i = 0; i < p; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) s += inverse_(i, j) * u[j];
    x[i] = s * standardization_.sds[i] + standardization_.means[i];
  }
}

FeatureMatrix LinearWarper::forward(const FeatureMatrix& rows) const {
  const FeatureMatrix x = rows.select(input_names());
  Matrix w(x.rows(), output_dim());
  for (std::size_t r = 0; r < x.rows(); ++r) forward_row(x.values().row(r), w.row(r));
  return FeatureMatrix(output_names_, std::move(w));
}

FeatureMatrix LinearWarper::inverse(const FeatureMatrix& warped) const {
  const FeatureMatrix w = warped.select(output_names_);
  Matrix x(w.rows(), input_dim());
  for (std::size_t r = 0; r < w.rows(); ++r) inverse_row(w.values().row(r), x.row(r));
  return FeatureMatrix(input_names(), std::move(x));
}

LinearWarper identity_warper(const std::vector<std::string>& names) {
  StandardizationParams params{names, std::vector<double>(names.size(), 0.0), std::vector<double>(names.size(), 1.0)};
  const std::size_t p = names.size();
  return LinearWarper(WarperKind::Identity, std::move(params), names, Matrix::identity(p), std::vector<double>(p, 0.0),
                      Matrix::identity(p));
}

namespace {

PcaResult correlation_pca(const FeatureMatrix& data) {
  if (data.rows() <= data.cols())
    std::clog << "warning: PCA with n = " << data.rows() << " <= p = " << data.cols()
              << "; trailing components are poorly determined\n";
  PcaResult pca = symmetric_eigen(correlation_matrix(data));
  if (pca.eigenvalues.back() < kRankTolerance)
    throw Error(ErrorCode::RankDeficient, "correlation matrix eigenvalue " + std::to_string(pca.eigenvalues.back()) +
                                              " is below " + std::to_string(kRankTolerance));
  return pca;
}

std::vector<std::vector<double>> standardized_columns(const FeatureMatrix& z) {
  std::vector<std::vector<double>> cols;
  for (std::size_t j = 0; j < z.cols(); ++j) cols.push_back(z.values().col(j));
  return cols;
}

}  // namespace

LinearWarper fit_pca_warper(const FeatureMatrix& data) {
  auto params = fit_standardization(data);
  PcaResult pca = correlation_pca(data);
  const std::size_t p = data.cols();
  std::vector<std::string> names;
  for (std::size_t k = 0; k < p; ++k) names.push_back("PC" + std::to_string(k + 1));
  WarperMetadata meta;
  meta.eigenvalues = pca.eigenvalues;
  return LinearWarper(WarperKind::Pca, std::move(params), std::move(names), pca.loadings.transpose(),
                      std::vector<double>(p, 0.0), pca.loadings, std::move(meta));
}

LinearWarper fit_structured_pca_warper(const FeatureMatrix& data, const FeatureGroups& groups) {
  const std::size_t p = data.cols();
  if (groups.n_columns() != p)
    throw Error(ErrorCode::InvalidGroups, "groups were built for " + std::to_string(groups.n_columns()) +
                                              " columns, data has " + std::to_string(p));
  StandardizationParams params{data.names(), std::vector<double>(p, 0.0), std::vector<double>(p, 1.0)};
  Matrix forward(p, p);
  std::vector<std::string> names;
  WarperMetadata meta;
  std::size_t row = 0;

  for (const auto& g : groups.groups()) {
    std::vector<std::string> cols;
    for (auto c : g.columns) cols.push_back(data.names()[c]);
    const FeatureMatrix sub = data.select(cols);
    const auto sub_params = fit_standardization(sub);
    for (std::size_t l = 0; l < g.columns.size(); ++l) {
      params.means[g.columns[l]] = sub_params.means[l];
      params.sds[g.columns[l]] = sub_params.sds[l];
    }
    const PcaResult pca = correlation_pca(sub);
    for (std::size_t k = 0; k < g.columns.size(); ++k, ++row) {
      for (std::size_t l = 0; l < g.columns.size(); ++l) forward(row, g.columns[l]) = pca.loadings(l, k);
      names.push_back(g.name + "PC" + std::to_string(k + 1));
    }
    meta.blocks.push_back({g.name, g.columns, pca.eigenvalues});
  }
  for (auto c : groups.passthrough()) {
    forward(row++, c) = 1.0;
    names.push_back(data.names()[c]);
    meta.passthrough.push_back(c);
  }
  Matrix inverse = forward.transpose();
  return LinearWarper(WarperKind::StructuredPca, std::move(params), std::move(names), std::move(forward),
                      std::vector<double>(p, 0.0), std::move(inverse), std::move(meta));
}

LinearWarper fit_orthogonalization_warper(const FeatureMatrix& data, const std::string& anchor) {
  const std::size_t s = data.index_of(anchor);
  auto params = fit_standardization(data);
  const auto z = apply_standardization(params, data);
  const auto cols = standardized_columns(z);
  const std::size_t p = data.cols();

  std::vector<double> b(p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    if (i == s) continue;
    b[i] = pearson(cols[s], cols[i]);
    if (std::abs(b[i]) > 1.0 - kCollinearityEpsilon)
      throw Error(ErrorCode::NearCollinear, "feature '" + data.names()[i] + "' has correlation " +
                                                std::to_string(b[i]) + " with anchor '" + anchor + "'");
  }

  Matrix forward = Matrix::identity(p);
  Matrix inverse = Matrix::identity(p);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < p; ++i) {
    if (i != s) {
      forward(i, s) = -b[i];
      inverse(i, s) = b[i];
    }
    names.push_back(i == s ? data.names()[i] : data.names()[i] + "_resid");
  }
  WarperMetadata meta;
  meta.anchor = anchor;
  meta.coefficients = b;
  return LinearWarper(WarperKind::Orthogonalization, std::move(params), std::move(names), std::move(forward),
                      std::vector<double>(p, 0.0), std::move(inverse), std::move(meta));
}

LinearWarper fit_path_warper(const FeatureMatrix& data, const PathSpec& path) {
  const std::size_t p = data.cols();
  auto params = fit_standardization(data);
  const auto z = apply_standardization(params, data);

  // t = g . z + k in standardized units.
  std::vector<double> g(p, 0.0);
  double k = 0.0;
  std::optional<std::size_t> exempt;
  if (path.kind == PathKind::LinearCombination) {
    if (path.weights.size() != p)
      throw Error(ErrorCode::SchemaMismatch, "path weights have dimension " + std::to_string(path.weights.size()) +
                                                 ", expected " + std::to_string(p));
    std::size_t nonzero = 0;
    for (std::size_t j = 0; j < p; ++j)
      if (path.weights[j] != 0.0) {
        ++nonzero;
        exempt = j;
      }
    if (nonzero == 0) throw Error(ErrorCode::DegeneratePath, "linear-combination weights are all zero");
    if (nonzero > 1) exempt.reset();
    g = path.weights;
  } else {
    if (path.from.size() != p || path.to.size() != p)
      throw Error(ErrorCode::SchemaMismatch, "path endpoints must have dimension " + std::to_string(p));
    std::vector<double> d(p), z1(p);
    double dd = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      z1[j] = (path.from[j] - params.means[j]) / params.sds[j];
      d[j] = (path.to[j] - params.means[j]) / params.sds[j] - z1[j];
      dd += d[j] * d[j];
    }
    if (!(dd > 1e-24)) throw Error(ErrorCode::DegeneratePath, "path endpoints coincide");
    for (std::size_t j = 0; j < p; ++j) {
      g[j] = d[j] / dd;
      k -= z1[j] * d[j] / dd;
    }
  }

  std::vector<double> t(data.rows());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    double s = 0.0;
    for (std::size_t j = 0; j < p; ++j) s += g[j] * z(r, j);
    t[r] = s + k;
  }
  const double t_mean = mean(t);
  const double t_sd = sample_sd(t);
  if (!(t_sd > 1e-12 * std::max(1.0, std::abs(t_mean))))
    throw Error(ErrorCode::DegeneratePath, "path coordinate is constant on the data");

  std::vector<double> a(p);
  for (std::size_t j = 0; j < p; ++j) a[j] = g[j] / t_sd;
  const double offset = (k - t_mean) / t_sd;

  std::vector<double> ws(data.rows());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    double s = 0.0;
    for (std::size_t j = 0; j < p; ++j) s += a[j] * z(r, j);
    ws[r] = s + offset;
  }

  std::vector<double> b(p);
  for (std::size_t i = 0; i < p; ++i) {
    b[i] = pearson(ws, z.values().col(i));
    if (exempt == i) continue;
    if (std::abs(b[i]) > 1.0 - kCollinearityEpsilon)
      throw Error(ErrorCode::NearCollinear, "feature '" + data.names()[i] + "' has correlation " +
                                                std::to_string(b[i]) + " with the path coordinate");
  }

  Matrix forward(p + 1, p);
  Matrix inverse(p, p + 1);
  std::vector<double> offsets(p + 1);
  std::vector<std::string> names{path.name};
  offsets[0] = offset;
  for (std::size_t j = 0; j < p; ++j) forward(0, j) = a[j];
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) forward(i + 1, j) = (i == j ? 1.0 : 0.0) - b[i] * a[j];
    offsets[i + 1] = -b[i] * offset;
    inverse(i, 0) = b[i];
    inverse(i, i + 1) = 1.0;
    names.push_back(data.names()[i] + "_resid");
  }

  WarperMetadata meta;
  meta.coefficients = b;
  meta.path = path;
  meta.path_mean = t_mean;
  meta.path_sd = t_sd;
  return LinearWarper(WarperKind::Path, std::move(params), std::move(names), std::move(forward), std::move(offsets),
                      std::move(inverse), std::move(meta));
}

std::vector<double> path_parameter(const LinearWarper& warper, const FeatureMatrix& rows) {
  if (warper.kind() != WarperKind::Path) throw Error(ErrorCode::InvalidParams, "not a path warper");
  const auto w = warper.forward(rows);
  std::vector<double> t(w.rows());
  for (std::size_t r = 0; r < w.rows(); ++r) t[r] = w(r, 0) * warper.metadata().path_sd + warper.metadata().path_mean;
  return t;
}

}  // namespace featwarp
