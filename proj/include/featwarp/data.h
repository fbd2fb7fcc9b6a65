#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "featwarp/matrix.h"

namespace featwarp {

/// Column-named numeric table, n samples by p features.
///
/// Construction validates that every entry is finite and that column names
/// are unique and non-empty; the object is immutable afterwards.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<std::string> names, Matrix values);

  std::size_t rows() const noexcept { return values_.rows(); }
  std::size_t cols() const noexcept { return values_.cols(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const Matrix& values() const noexcept { return values_; }
  double operator()(std::size_t r, std::size_t c) const { return values_(r, c); }

  std::optional<std::size_t> find(const std::string& name) const;
  // Throws UnknownFeature.
  std::size_t index_of(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;

  // Columns reordered/subset by name; throws SchemaMismatch if any are missing.
  FeatureMatrix select(const std::vector<std::string>& names) const;
  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
  // Same columns, with `values` replacing the data (shape must match).
  FeatureMatrix with_values(Matrix values) const;
  FeatureMatrix with_appended(const std::string& name, std::span<const double> values) const;

 private:
  std::vector<std::string> names_;
  Matrix values_;
  std::map<std::string, std::size_t> index_;
};

enum class TaskKind { Regression, Classification };

struct LabeledDataset {
  FeatureMatrix features;
  // Regression: the response. Classification: 1.0 for the positive class, 0.0 otherwise.
  std::vector<double> target;
  TaskKind task = TaskKind::Regression;
  std::string target_name = "target";
  std::string positive_label = "1";
  std::string negative_label = "0";

  void validate() const;
  LabeledDataset select_rows(std::span<const std::size_t> rows) const;
  LabeledDataset select_features(const std::vector<std::string>& names) const;
};

// Per-feature location and scale. sds use the sample convention (n - 1).
struct StandardizationParams {
  std::vector<std::string> names;
  std::vector<double> means;
  std::vector<double> sds;

  void validate() const;
};

struct FeatureGroup {
  std::string name;
  std::vector<std::size_t> columns;
};

/// Named disjoint subsets of column indices; unlisted columns pass through.
class FeatureGroups {
 public:
  FeatureGroups() = default;
  FeatureGroups(std::vector<FeatureGroup> groups, std::size_t n_columns);

  // Resolve a name -> column-name map against a schema.
  static FeatureGroups from_names(const std::vector<std::pair<std::string, std::vector<std::string>>>& groups,
                                  const std::vector<std::string>& schema);

  const std::vector<FeatureGroup>& groups() const noexcept { return groups_; }
  std::size_t n_columns() const noexcept { return n_columns_; }
  std::vector<std::size_t> passthrough() const;
  const FeatureGroup* find(const std::string& name) const;

 private:
  std::vector<FeatureGroup> groups_;
  std::size_t n_columns_ = 0;
};

StandardizationParams fit_standardization(const FeatureMatrix& data);
FeatureMatrix apply_standardization(const StandardizationParams& params, const FeatureMatrix& data);
FeatureMatrix invert_standardization(const StandardizationParams& params, const FeatureMatrix& data);

// Pearson correlation matrix (p x p), symmetric with an exact unit diagonal.
Matrix correlation_matrix(const FeatureMatrix& data);

struct GroupCorrelationSummary {
  std::string name;
  // Median and minimum over members of each member's strongest |r| within the group.
  double median_strongest = 0.0;
  double min_strongest = 0.0;
  // Largest |r| between a member and any column outside the group.
  double max_cross = 0.0;
};

struct CorrelationSummary {
  std::vector<std::string> names;
  // Strongest |r| of each feature with any other feature.
  std::vector<double> strongest;
  std::vector<GroupCorrelationSummary> groups;
};

CorrelationSummary strongest_correlation_summary(const FeatureMatrix& data, const FeatureGroups& groups);

double mean(std::span<const double> values);
// Sample standard deviation (n - 1).
double sample_sd(std::span<const double> values);
double median(std::vector<double> values);
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace featwarp
