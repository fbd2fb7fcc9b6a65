#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "featwarp/data.h"
#include "featwarp/matrix.h"

namespace featwarp {

enum class WarperKind { Identity, Pca, StructuredPca, Orthogonalization, Path };

std::string to_string(WarperKind kind);
WarperKind parse_warper_kind(const std::string& text);

enum class PathKind { ClusterLine, LinearCombination, EndpointLine };

std::string to_string(PathKind kind);
PathKind parse_path_kind(const std::string& text);

/// One-dimensional path through feature space.
///
/// Line paths run from `from` (t = 0) to `to` (t = 1), both in original
/// feature units; `centers` keeps the full set of cluster centers a
/// cluster line was picked from. Linear-combination paths use
/// t = weights . standardize(x).
struct PathSpec {
  PathKind kind = PathKind::EndpointLine;
  std::vector<double> from;
  std::vector<double> to;
  std::vector<std::vector<double>> centers;
  std::size_t from_center = 0;
  std::size_t to_center = 1;
  std::vector<double> weights;
  double t_min = 0.0;
  double t_max = 1.0;
  std::string name = "path";

  static PathSpec endpoint_line(std::vector<double> from, std::vector<double> to);
  static PathSpec cluster_line(const Matrix& centers, std::size_t from_center, std::size_t to_center);
  static PathSpec linear_combination(std::vector<double> weights);
};

struct StructuredBlock {
  std::string group;
  // Input columns rotated by this block, in input order.
  std::vector<std::size_t> columns;
  std::vector<double> eigenvalues;
};

// Kind-specific payload carried with a fitted warper.
struct WarperMetadata {
  std::vector<double> eigenvalues;            // pca
  std::vector<StructuredBlock> blocks;        // structured-pca
  std::vector<std::size_t> passthrough;       // structured-pca
  std::string anchor;                         // orthogonalization
  std::vector<double> coefficients;           // orthogonalization / path: b_i
  std::optional<PathSpec> path;               // path
  double path_mean = 0.0;                     // path: mean and sd of t on the fitting data
  double path_sd = 1.0;
};

/// Invertible linear map between feature space X and warped space W.
///
/// forward:  z = (x - mean) / sd,  w = A z + c
/// inverse:  z = B (w - c),        x = z * sd + mean
///
/// A is m x p and B is p x m with B A = I (m = p, or p + 1 for path
/// warpers). Construction re-validates the invariants so loaded warpers
/// are checked the same way as fitted ones.
class LinearWarper {
 public:
  LinearWarper(WarperKind kind, StandardizationParams standardization, std::vector<std::string> output_names,
               Matrix forward_matrix, std::vector<double> forward_offset, Matrix inverse_matrix,
               WarperMetadata metadata = {});

  WarperKind kind() const noexcept { return kind_; }
  const StandardizationParams& standardization() const noexcept { return standardization_; }
  const std::vector<std::string>& input_names() const noexcept { return standardization_.names; }
  const std::vector<std::string>& output_names() const noexcept { return output_names_; }
  const Matrix& forward_matrix() const noexcept { return forward_; }
  const std::vector<double>& forward_offset() const noexcept { return offset_; }
  const Matrix& inverse_matrix() const noexcept { return inverse_; }
  const WarperMetadata& metadata() const noexcept { return metadata_; }
  std::size_t input_dim() const noexcept { return forward_.cols(); }
  std::size_t output_dim() const noexcept { return forward_.rows(); }

  // Columns are matched by name; the result carries output_names().
  FeatureMatrix forward(const FeatureMatrix& rows) const;
  // Columns are matched by name; the result carries input_names().
  FeatureMatrix inverse(const FeatureMatrix& warped) const;

  void forward_row(std::span<const double> x, std::span<double> w) const;
  void inverse_row(std::span<const double> w, std::span<double> x) const;

 private:
  WarperKind kind_;
  StandardizationParams standardization_;
  std::vector<std::string> output_names_;
  Matrix forward_;
  std::vector<double> offset_;
  Matrix inverse_;
  WarperMetadata metadata_;
};

inline constexpr double kCollinearityEpsilon = 1e-6;
inline constexpr double kRankTolerance = 1e-10;

LinearWarper identity_warper(const std::vector<std::string>& names);
LinearWarper fit_pca_warper(const FeatureMatrix& data);
LinearWarper fit_structured_pca_warper(const FeatureMatrix& data, const FeatureGroups& groups);
LinearWarper fit_orthogonalization_warper(const FeatureMatrix& data, const std::string& anchor);
LinearWarper fit_path_warper(const FeatureMatrix& data, const PathSpec& path);

// Path parameter t (original path units) for each row, from a path warper.
std::vector<double> path_parameter(const LinearWarper& warper, const FeatureMatrix& rows);

}  // namespace featwarp
