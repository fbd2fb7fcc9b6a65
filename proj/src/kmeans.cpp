#include "featwarp/kmeans.h"

#include <limits>

#include "featwarp/error.h"
#include "featwarp/random.h"

namespace featwarp {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return s;
}

Matrix seed_plus_plus(const Matrix& x, std::size_t k, Rng& rng) {
  const std::size_t n = x.rows();
  Matrix centers(k, x.cols());
  std::vector<bool> chosen(n, false);
  auto take = [&](std::size_t c, std::size_t row) {
    chosen[row] = true;
    auto src = x.row(row);
    std::copy(src.begin(), src.end(), centers.row(c).begin());
  };

  take(0, rng.index(n));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(x.row(i), centers.row(0));

  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double d : d2) total += d;
    std::size_t pick = n;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (d2[i] > 0.0 && u < acc) {
          pick = i;
          break;
        }
      }
      if (pick == n)
        for (std::size_t i = n; i-- > 0;)
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
    }
    if (pick == n) {
      // Every remaining point coincides with a center.
      for (std::size_t i = 0; i < n && pick == n; ++i)
        if (!chosen[i]) pick = i;
    }
    take(c, pick);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(x.row(i), centers.row(c)));
  }
  return centers;
}

}  // namespace

KMeansResult kmeans(const FeatureMatrix& data, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
  const std::size_t n = data.rows();
  const std::size_t p = data.cols();
  if (n == 0) throw Error(ErrorCode::EmptyData, "k-means on empty data");
  if (k < 1 || k > n)
    throw Error(ErrorCode::InvalidParams, "k = " + std::to_string(k) + " must lie in [1, " + std::to_string(n) + "]");

  const Matrix& x = data.values();
  Rng rng(seed);
  KMeansResult out;
  out.centers = seed_plus_plus(x, k, rng);
  out.assignment.assign(n, k);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = squared_distance(x.row(i), out.centers.row(c));
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (out.assignment[i] != best) {
        out.assignment[i] = best;
        changed = true;
      }
    }
    out.iterations = iter + 1;
    if (!changed && iter > 0) break;

    Matrix sums(k, p);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[out.assignment[i]];
      for (std::size_t j = 0; j < p; ++j) sums(out.assignment[i], j) += x(i, j);
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = squared_distance(x.row(i), out.centers.row(out.assignment[i]));
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        auto src = x.row(far);
        std::copy(src.begin(), src.end(), out.centers.row(c).begin());
        out.assignment[far] = c;
        changed = true;
        continue;
      }
      for (std::size_t j = 0; j < p; ++j) out.centers(c, j) = sums(c, j) / static_cast<double>(counts[c]);
    }
    if (!changed) break;
  }

  out.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) out.inertia += squared_distance(x.row(i), out.centers.row(out.assignment[i]));
  return out;
}

}  // namespace featwarp
