#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "featwarp/data.h"
#include "featwarp/matrix.h"

namespace featwarp {

struct KMeansResult {
  // k x p, original units.
  Matrix centers;
  std::vector<std::size_t> assignment;
  double inertia = 0.0;
  int iterations = 0;
};

struct KMeansOptions {
  int max_iterations = 300;
};

/// Lloyd's algorithm with k-means++ seeding.
///
/// A cluster that empties during an update is re-seeded at the point
/// farthest from its current center (lowest row index on ties).
KMeansResult kmeans(const FeatureMatrix& data, std::size_t k, std::uint64_t seed, const KMeansOptions& options = {});

}  // namespace featwarp
