#pragma once

#include <vector>

#include "featwarp/matrix.h"

namespace featwarp {

struct PcaResult {
  // Descending.
  std::vector<double> eigenvalues;
  // Column j is the unit eigenvector for eigenvalues[j].
  Matrix loadings;
  // eigenvalues / sum(eigenvalues); equals eigenvalues / p for a correlation matrix.
  std::vector<double> explained_variance_fractions;
};

struct JacobiOptions {
  int max_sweeps = 100;
  double symmetry_tolerance = 1e-10;
};

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Iterates until the off-diagonal Frobenius norm drops below 1e-12 * p;
/// throws NoConvergence after `max_sweeps` sweeps and NotSymmetric when
/// |S(i,j) - S(j,i)| exceeds the symmetry tolerance. Each eigenvector is
/// signed so that its largest-magnitude component is positive (ties go to
/// the lowest index).
PcaResult symmetric_eigen(const Matrix& s, const JacobiOptions& options = {});

}  // namespace featwarp
