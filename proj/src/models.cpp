#include "featwarp/models.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "featwarp/error.h"

namespace featwarp {

std::vector<double> Predictor::predict(const FeatureMatrix& rows) const {
  const FeatureMatrix aligned = rows.select(input_names_);
  auto out = predict_aligned(aligned.values());
  for (double v : out)
    if (!std::isfinite(v)) throw Error(ErrorCode::RankDeficient, "model produced a non-finite prediction");
  return out;
}

LinearModel::LinearModel(std::vector<std::string> names, double intercept, std::vector<double> coefficients)
    : Predictor(std::move(names)), intercept_(intercept), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != input_names().size())
    throw Error(ErrorCode::SchemaMismatch, "coefficient count does not match feature count");
}

std::vector<double> LinearModel::predict_aligned(const Matrix& rows) const {
  std::vector<double> out(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    double s = intercept_;
    for (std::size_t j = 0; j < coefficients_.size(); ++j) s += coefficients_[j] * rows(r, j);
    out[r] = s;
  }
  return out;
}

LinearModel fit_linear(const LabeledDataset& data) {
  data.validate();
  const std::size_t n = data.features.rows();
  const std::size_t p = data.features.cols();
  if (n <= p) throw Error(ErrorCode::RankDeficient, "least squares needs more rows than features");

  // Centre and scale columns so the Cholesky pivots are comparable.
  std::vector<double> mu(p), scale(p);
  for (std::size_t j = 0; j < p; ++j) {
    auto col = data.features.values().col(j);
    mu[j] = mean(col);
    scale[j] = sample_sd(col);
    if (!(scale[j] > 0.0))
      throw Error(ErrorCode::RankDeficient, "column '" + data.features.names()[j] + "' is constant");
  }
  const double ybar = mean(data.target);

  Matrix gram(p, p);
  std::vector<double> rhs(p, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < p; ++i) {
      const double zi = (data.features(r, i) - mu[i]) / scale[i];
      rhs[i] += zi * (data.target[r] - ybar);
      for (std::size_t j = i; j < p; ++j) gram(i, j) += zi * (data.features(r, j) - mu[j]) / scale[j];
    }
  }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < i; ++j) gram(i, j) = gram(j, i);

  // gram = L L^T
  Matrix l(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    double d = gram(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 1e-10 * gram(j, j)))
      throw Error(ErrorCode::RankDeficient, "design matrix is rank deficient at column '" +
                                                data.features.names()[j] + "'");
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = gram(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  std::vector<double> y(p), beta(p);
  for (std::size_t i = 0; i < p; ++i) {
    double s = rhs[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  for (std::size_t i = p; i-- > 0;) {
    double s = y[i];
    for (std::size_t k = i + 1; k < p; ++k) s -= l(k, i) * beta[k];
    beta[i] = s / l(i, i);
  }

  std::vector<double> coef(p);
  double intercept = ybar;
  for (std::size_t j = 0; j < p; ++j) {
    coef[j] = beta[j] / scale[j];
    intercept -= coef[j] * mu[j];
  }
  return LinearModel(data.features.names(), intercept, std::move(coef));
}

WarpedModel::WarpedModel(PredictorPtr base, LinearWarper warper)
    : Predictor(warper.output_names()), base_(std::move(base)), warper_(std::move(warper)) {
  if (!base_) throw Error(ErrorCode::InvalidParams, "warped model needs a base model");
  std::set<std::string> a(base_->input_names().begin(), base_->input_names().end());
  std::set<std::string> b(warper_.input_names().begin(), warper_.input_names().end());
  if (a != b || a.size() != base_->input_names().size())
    throw Error(ErrorCode::SchemaMismatch, "warper inputs do not match the model's input features");
}

std::vector<double> WarpedModel::predict_aligned(const Matrix& rows) const {
  Matrix x(rows.rows(), warper_.input_dim());
  for (std::size_t r = 0; r < rows.rows(); ++r) warper_.inverse_row(rows.row(r), x.row(r));
  return base_->predict(FeatureMatrix(warper_.input_names(), std::move(x)));
}

WarpedModel warp_model(PredictorPtr base, const LinearWarper& warper) { return WarpedModel(std::move(base), warper); }

LogitOutput::LogitOutput(PredictorPtr base) : Predictor(base->input_names()), base_(std::move(base)) {}

std::vector<double> LogitOutput::predict_aligned(const Matrix& rows) const {
  auto p = base_->predict_aligned(rows);
  for (double& v : p) {
    const double c = std::clamp(v, kProbabilityClamp, 1.0 - kProbabilityClamp);
    v = std::log(c / (1.0 - c));
  }
  return p;
}

PredictorPtr LinearLearner::fit(const LabeledDataset& data) const {
  return std::make_shared<LinearModel>(fit_linear(data));
}

PredictorPtr ForestLearner::fit(const LabeledDataset& data) const {
  return std::make_shared<RandomForest>(fit_random_forest(data, params_));
}

WarpedLearner::WarpedLearner(std::shared_ptr<const Learner> base, LinearWarper warper)
    : base_(std::move(base)), warper_(std::move(warper)) {
  if (!base_) throw Error(ErrorCode::InvalidParams, "warped learner needs a base learner");
}

PredictorPtr WarpedLearner::fit(const LabeledDataset& warped_data) const {
  LabeledDataset original = warped_data;
  original.features = warper_.inverse(warped_data.features);
  return std::make_shared<WarpedModel>(base_->fit(original), warper_);
}

std::shared_ptr<WarpedLearner> warp_learner(std::shared_ptr<const Learner> base, const LinearWarper& warper) {
  return std::make_shared<WarpedLearner>(std::move(base), warper);
}

FeatureMatrix drop_column(const FeatureMatrix& warped, const std::string& name) {
  const std::size_t c = warped.index_of(name);
  Matrix values = warped.values();
  const double fill = mean(values.col(c));
  for (std::size_t r = 0; r < values.rows(); ++r) values(r, c) = fill;
  return warped.with_values(std::move(values));
}

}  // namespace featwarp
