#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "featwarp/data.h"
#include "featwarp/warper.h"

namespace featwarp {

/// Anything mapping feature rows to real-valued predictions.
///
/// predict() matches columns by name, so callers may pass columns in any
/// order (extra columns are ignored). Implementations override
/// predict_aligned(), which receives columns in input_names() order and
/// must compute each row independently of the others.
class Predictor {
 public:
  explicit Predictor(std::vector<std::string> input_names) : input_names_(std::move(input_names)) {}
  virtual ~Predictor() = default;

  const std::vector<std::string>& input_names() const noexcept { return input_names_; }

  std::vector<double> predict(const FeatureMatrix& rows) const;
  virtual std::vector<double> predict_aligned(const Matrix& rows) const = 0;

 private:
  std::vector<std::string> input_names_;
};

using PredictorPtr = std::shared_ptr<const Predictor>;

class LinearModel final : public Predictor {
 public:
  LinearModel(std::vector<std::string> names, double intercept, std::vector<double> coefficients);

  double intercept() const noexcept { return intercept_; }
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }

  std::vector<double> predict_aligned(const Matrix& rows) const override;

 private:
  double intercept_;
  std::vector<double> coefficients_;
};

// Ordinary least squares through the normal equations (Cholesky).
LinearModel fit_linear(const LabeledDataset& data);

struct ForestParams {
  std::size_t n_trees = 100;
  // 0: grow until leaves are pure or smaller than 2 * min_leaf.
  std::size_t max_depth = 0;
  std::size_t min_leaf = 1;
  // 0: floor(sqrt(p)) for classification, max(1, p / 3) for regression.
  std::size_t mtry = 0;
  std::uint64_t seed = 1;
  TaskKind task = TaskKind::Classification;

  void validate(std::size_t n_features) const;
};

struct TreeNode {
  // -1 marks a leaf.
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  // Leaf: positive-class fraction (classification) or mean response.
  double value = 0.0;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  double evaluate(std::span<const double> row) const;
};

/// Bagged CART ensemble with axis-aligned midpoint splits.
///
/// Classification output is the fraction of trees voting for the positive
/// class; a leaf holding exactly half positives casts half a vote.
class RandomForest final : public Predictor {
 public:
  RandomForest(std::vector<std::string> names, ForestParams params, std::vector<DecisionTree> trees);

  const ForestParams& params() const noexcept { return params_; }
  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

  std::vector<double> predict_aligned(const Matrix& rows) const override;

 private:
  ForestParams params_;
  std::vector<DecisionTree> trees_;
};

RandomForest fit_random_forest(const LabeledDataset& data, const ForestParams& params);

/// The composition base o T^-1: a predictor over warped coordinates.
class WarpedModel final : public Predictor {
 public:
  WarpedModel(PredictorPtr base, LinearWarper warper);

  const PredictorPtr& base() const noexcept { return base_; }
  const LinearWarper& warper() const noexcept { return warper_; }

  std::vector<double> predict_aligned(const Matrix& rows) const override;

 private:
  PredictorPtr base_;
  LinearWarper warper_;
};

// Throws SchemaMismatch unless the warper's inputs are exactly the base model's inputs.
WarpedModel warp_model(PredictorPtr base, const LinearWarper& warper);

/// Logit of a probability-valued predictor, clamped to [1e-6, 1 - 1e-6].
class LogitOutput final : public Predictor {
 public:
  explicit LogitOutput(PredictorPtr base);
  std::vector<double> predict_aligned(const Matrix& rows) const override;

 private:
  PredictorPtr base_;
};

inline constexpr double kProbabilityClamp = 1e-6;

/// An untrained model: fit() produces a Predictor.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual PredictorPtr fit(const LabeledDataset& data) const = 0;
};

class LinearLearner final : public Learner {
 public:
  PredictorPtr fit(const LabeledDataset& data) const override;
};

class ForestLearner final : public Learner {
 public:
  explicit ForestLearner(ForestParams params) : params_(params) {}
  PredictorPtr fit(const LabeledDataset& data) const override;

 private:
  ForestParams params_;
};

/// The composition f o T^-1 with an untrained f.
///
/// fit() takes data in warped coordinates, maps it back through the
/// inverse transform, trains the base learner there and returns the
/// resulting WarpedModel.
class WarpedLearner final : public Learner {
 public:
  WarpedLearner(std::shared_ptr<const Learner> base, LinearWarper warper);
  PredictorPtr fit(const LabeledDataset& warped_data) const override;

  const LinearWarper& warper() const noexcept { return warper_; }

 private:
  std::shared_ptr<const Learner> base_;
  LinearWarper warper_;
};

std::shared_ptr<WarpedLearner> warp_learner(std::shared_ptr<const Learner> base, const LinearWarper& warper);

// Replace a column by its mean over `warped`, as used by drop-and-relearn.
FeatureMatrix drop_column(const FeatureMatrix& warped, const std::string& name);

}  // namespace featwarp
