#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "featwarp/diagnostics.h"
#include "featwarp/error.h"
#include "featwarp/random.h"

namespace featwarp {

std::string to_string(Loss loss) {
  switch (loss) {
    case Loss::Mse: return "mse";
    case Loss::LogLoss: return "log-loss";
    case Loss::ErrorRate: return "error-rate";
  }
  return "unknown";
}

Loss parse_loss(const std::string& name) {
  for (auto l : {Loss::Mse, Loss::LogLoss, Loss::ErrorRate})
    if (to_string(l) == name) return l;
  throw Error(ErrorCode::UnknownLoss, "unknown loss '" + name + "'; valid losses are mse, log-loss, error-rate");
}

double evaluate_loss(Loss loss, std::span<const double> truth, std::span<const double> predicted) {
  if (truth.size() != predicted.size()) throw Error(ErrorCode::SchemaMismatch, "loss inputs differ in length");
  if (truth.empty()) throw Error(ErrorCode::EmptyData, "loss of empty data");
  double s = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    switch (loss) {
      case Loss::Mse:
        s += (truth[i] - predicted[i]) * (truth[i] - predicted[i]);
        break;
      case Loss::LogLoss: {
        const double p = std::clamp(predicted[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
        s -= truth[i] == 1.0 ? std::log(p) : std::log(1.0 - p);
        break;
      }
      case Loss::ErrorRate:
        s += ((predicted[i] >= 0.5) != (truth[i] == 1.0)) ? 1.0 : 0.0;
        break;
    }
  }
  return s / static_cast<double>(truth.size());
}

const FeatureImportance& ImportanceReport::at(const std::string& feature) const {
  for (const auto& f : features)
    if (f.feature == feature) return f;
  throw Error(ErrorCode::UnknownFeature, "no importance entry for '" + feature + "'");
}

std::vector<const FeatureImportance*> ImportanceReport::ranked() const {
  std::vector<const FeatureImportance*> out;
  for (const auto& f : features) out.push_back(&f);
  std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->rank < b->rank; });
  return out;
}

ImportanceReport permutation_importance(const Predictor& model, const FeatureMatrix& data,
                                        std::span<const double> target, const ImportanceOptions& options) {
  if (data.rows() == 0) throw Error(ErrorCode::EmptyData, "permutation importance needs data");
  if (target.size() != data.rows()) throw Error(ErrorCode::SchemaMismatch, "target length does not match data");
  if (options.n_permutations < 1) throw Error(ErrorCode::InvalidParams, "n_permutations must be at least 1");

  const auto& names = model.input_names();
  const Matrix x = data.select(names).values();
  const std::size_t n = x.rows();
  std::vector<std::size_t> selected;
  if (options.features.empty()) {
    selected.resize(names.size());
    std::iota(selected.begin(), selected.end(), 0);
  } else {
    for (std::size_t j = 0; j < names.size(); ++j)
      if (std::find(options.features.begin(), options.features.end(), names[j]) != options.features.end())
        selected.push_back(j);
    for (const auto& f : options.features)
      if (std::find(names.begin(), names.end(), f) == names.end())
        throw Error(ErrorCode::UnknownFeature, "model has no input named '" + f + "'");
  }
  const std::size_t p = selected.size();

  ImportanceReport report;
  report.loss = options.loss;
  report.n_permutations = options.n_permutations;
  report.seed = options.seed;
  report.baseline_loss = evaluate_loss(options.loss, target, model.predict(FeatureMatrix(names, x)));
  report.features.resize(p);

  auto run_feature = [&](std::size_t k) {
    const std::size_t j = selected[k];
    FeatureImportance& fi = report.features[k];
    fi.feature = names[j];
    const auto original = x.col(j);
    std::vector<std::size_t> perm(n);
    for (std::size_t r = 0; r < options.n_permutations; ++r) {
      std::iota(perm.begin(), perm.end(), 0);
      Rng rng(derive_seed(options.seed, j * options.n_permutations + r));
      rng.shuffle(std::span<std::size_t>(perm));
      Matrix shuffled = x;
      for (std::size_t i = 0; i < n; ++i) shuffled(i, j) = original[perm[i]];
      fi.replicate_losses.push_back(
          evaluate_loss(options.loss, target, model.predict(FeatureMatrix(names, std::move(shuffled)))));
    }
    double total = 0.0;
    for (double l : fi.replicate_losses) total += l;
    fi.importance = total / static_cast<double>(fi.replicate_losses.size()) - report.baseline_loss;
    fi.sd = fi.replicate_losses.size() > 1 ? sample_sd(fi.replicate_losses) : 0.0;
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, p));
  if (workers == 1) {
    for (std::size_t j = 0; j < p; ++j) run_feature(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures(p);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < p; j = next++) {
          try {
            run_feature(j);
          } catch (...) {
            failures[j] = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
    for (auto& f : failures)
      if (f) std::rethrow_exception(f);
  }

  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.features[a].importance > report.features[b].importance;
  });
  for (std::size_t k = 0; k < p; ++k) report.features[order[k]].rank = k + 1;
  return report;
}

}  // namespace featwarp
