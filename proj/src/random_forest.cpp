#include <algorithm>
#include <cmath>
#include <numeric>

#include "featwarp/error.h"
#include "featwarp/models.h"
#include "featwarp/random.h"

namespace featwarp {

void ForestParams::validate(std::size_t n_features) const {
  if (n_trees == 0) throw Error(ErrorCode::InvalidParams, "n_trees must be positive");
  if (min_leaf == 0) throw Error(ErrorCode::InvalidParams, "min_leaf must be positive");
  if (mtry > n_features)
    throw Error(ErrorCode::InvalidParams, "mtry = " + std::to_string(mtry) + " exceeds feature count " +
                                              std::to_string(n_features));
  if (n_features == 0) throw Error(ErrorCode::InvalidParams, "no features to train on");
}

double DecisionTree::evaluate(std::span<const double> row) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const auto& node = nodes[i];
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right);
  }
  return nodes[i].value;
}

RandomForest::RandomForest(std::vector<std::string> names, ForestParams params, std::vector<DecisionTree> trees)
    : Predictor(std::move(names)), params_(params), trees_(std::move(trees)) {
  if (trees_.empty()) throw Error(ErrorCode::InvalidParams, "forest has no trees");
  for (const auto& t : trees_) {
    if (t.nodes.empty()) throw Error(ErrorCode::InvalidParams, "empty tree");
    for (const auto& node : t.nodes) {
      if (node.feature < 0) continue;
      const auto limit = static_cast<int>(t.nodes.size());
      if (static_cast<std::size_t>(node.feature) >= input_names().size() || node.left <= 0 || node.right <= 0 ||
          node.left >= limit || node.right >= limit)
        throw Error(ErrorCode::InvalidParams, "malformed tree node");
    }
  }
}

std::vector<double> RandomForest::predict_aligned(const Matrix& rows) const {
  // Tree-major for cache locality; each row still sums its trees in order.
  std::vector<double> out(rows.rows(), 0.0);
  const bool vote = params_.task == TaskKind::Classification;
  for (const auto& tree : trees_) {
    for (std::size_t r = 0; r < rows.rows(); ++r) {
      const double v = tree.evaluate(rows.row(r));
      out[r] += vote ? (v > 0.5 ? 1.0 : (v < 0.5 ? 0.0 : 0.5)) : v;
    }
  }
  const double n_trees = static_cast<double>(trees_.size());
  for (double& v : out) v /= n_trees;
  return out;
}

namespace {

struct Split {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double score = 0.0;  // lower is better
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const double> y, const ForestParams& params, std::size_t mtry, Rng& rng)
      : x_(x), y_(y), params_(params), mtry_(mtry), rng_(rng), features_(x.cols()) {
    std::iota(features_.begin(), features_.end(), 0);
  }

  DecisionTree build(std::vector<std::size_t> sample) {
    DecisionTree tree;
    grow(tree, sample, 0);
    return tree;
  }

 private:
  double leaf_value(std::span<const std::size_t> idx) const {
    double s = 0.0;
    for (auto i : idx) s += y_[i];
    return s / static_cast<double>(idx.size());
  }

  bool pure(std::span<const std::size_t> idx) const {
    for (auto i : idx)
      if (y_[i] != y_[idx[0]]) return false;
    return true;
  }

  Split best_split(std::span<const std::size_t> idx) {
    // Partial Fisher-Yates picks mtry candidate features.
    for (std::size_t k = 0; k < mtry_; ++k) {
      const std::size_t j = k + rng_.index(features_.size() - k);
      std::swap(features_[k], features_[j]);
    }
    std::vector<std::size_t> order(idx.begin(), idx.end());
    const std::size_t n = order.size();
    const bool classify = params_.task == TaskKind::Classification;
    double total_sum = 0.0, total_sq = 0.0;
    for (auto i : order) {
      total_sum += y_[i];
      total_sq += y_[i] * y_[i];
    }

    Split best;
    for (std::size_t k = 0; k < mtry_; ++k) {
      const std::size_t f = features_[k];
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return x_(a, f) < x_(b, f) || (x_(a, f) == x_(b, f) && a < b);
      });
      double left_sum = 0.0, left_sq = 0.0;
      for (std::size_t pos = 0; pos + 1 < n; ++pos) {
        const double yv = y_[order[pos]];
        left_sum += yv;
        left_sq += yv * yv;
        const std::size_t nl = pos + 1, nr = n - nl;
        const double lo = x_(order[pos], f), hi = x_(order[pos + 1], f);
        if (lo == hi || nl < params_.min_leaf || nr < params_.min_leaf) continue;

        const double right_sum = total_sum - left_sum;
        double score;
        if (classify) {
          // n_l * gini_l + n_r * gini_r with gini = 2 q (1 - q)
          const double ql = left_sum / static_cast<double>(nl);
          const double qr = right_sum / static_cast<double>(nr);
          score = static_cast<double>(nl) * 2.0 * ql * (1.0 - ql) + static_cast<double>(nr) * 2.0 * qr * (1.0 - qr);
        } else {
          const double right_sq = total_sq - left_sq;
          score = (left_sq - left_sum * left_sum / static_cast<double>(nl)) +
                  (right_sq - right_sum * right_sum / static_cast<double>(nr));
        }
        if (!best.found || score < best.score) {
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid < hi)) mid = lo;
          best = {true, f, mid, score};
        }
      }
    }
    return best;
  }

  int grow(DecisionTree& tree, std::vector<std::size_t>& idx, std::size_t depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{});
    const bool depth_capped = params_.max_depth != 0 && depth >= params_.max_depth;
    if (depth_capped || idx.size() < 2 * params_.min_leaf || pure(idx)) {
      tree.nodes[id].value = leaf_value(idx);
      return id;
    }
    const Split split = best_split(idx);
    if (!split.found) {
      tree.nodes[id].value = leaf_value(idx);
      return id;
    }
    std::vector<std::size_t> left, right;
    for (auto i : idx) (x_(i, split.feature) <= split.threshold ? left : right).push_back(i);
    idx.clear();
    idx.shrink_to_fit();

    tree.nodes[id].feature = static_cast<int>(split.feature);
    tree.nodes[id].threshold = split.threshold;
    const int l = grow(tree, left, depth + 1);
    const int r = grow(tree, right, depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  }

  const Matrix& x_;
  std::span<const double> y_;
  const ForestParams& params_;
  std::size_t mtry_;
  Rng& rng_;
  std::vector<std::size_t> features_;
};

}  // namespace

RandomForest fit_random_forest(const LabeledDataset& data, const ForestParams& params) {
  data.validate();
  const std::size_t n = data.features.rows();
  const std::size_t p = data.features.cols();
  params.validate(p);
  if (n == 0) throw Error(ErrorCode::EmptyData, "cannot train on an empty dataset");
  if (params.task == TaskKind::Classification && data.task != TaskKind::Classification)
    throw Error(ErrorCode::InvalidParams, "classification forest needs a 0/1 coded target");

  std::size_t mtry = params.mtry;
  if (mtry == 0)
    mtry = params.task == TaskKind::Classification
               ? std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(p)))))
               : std::max<std::size_t>(1, p / 3);

  std::vector<DecisionTree> trees;
  trees.reserve(params.n_trees);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    Rng rng(derive_seed(params.seed, t));
    std::vector<std::size_t> sample(n);
    for (auto& s : sample) s = rng.index(n);
    TreeBuilder builder(data.features.values(), data.target, params, mtry, rng);
    trees.push_back(builder.build(std::move(sample)));
  }
  return RandomForest(data.features.names(), params, std::move(trees));
}

}  // namespace featwarp
