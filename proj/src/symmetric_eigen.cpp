#include "featwarp/symmetric_eigen.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "featwarp/error.h"

namespace featwarp {

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) s += 2.0 * a(i, j) * a(i, j);
  return std::sqrt(s);
}

// Zeroes a(p,q) with a plane rotation applied on both sides; accumulates into v.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const std::size_t n = a.rows();

  for (std::size_t k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;

  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

PcaResult symmetric_eigen(const Matrix& s, const JacobiOptions& options) {
  const std::size_t n = s.rows();
  if (s.cols() != n) throw Error(ErrorCode::NotSymmetric, "matrix is not square");
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(s(i, j))) throw Error(ErrorCode::NotSymmetric, "matrix has non-finite entries");
      if (std::abs(s(i, j) - s(j, i)) > options.symmetry_tolerance)
        throw Error(ErrorCode::NotSymmetric, "entries (" + std::to_string(i) + "," + std::to_string(j) + ") differ");
      a(i, j) = i == j ? s(i, i) : 0.5 * (s(i, j) + s(j, i));
    }

  Matrix v = Matrix::identity(n);
  const double tolerance = 1e-12 * static_cast<double>(n);
  int sweep = 0;
  while (off_diagonal_norm(a) >= tolerance) {
    if (sweep == options.max_sweeps)
      throw Error(ErrorCode::NoConvergence, "Jacobi did not converge within " + std::to_string(options.max_sweeps) +
                                                " sweeps");
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
    ++sweep;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  PcaResult out;
  out.loadings = Matrix(n, n);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.eigenvalues.push_back(a(src, src));
    total += a(src, src);

    std::size_t lead = 0;
    for (std::size_t k = 1; k < n; ++k)
      if (std::abs(v(k, src)) > std::abs(v(lead, src))) lead = k;
    const double sign = v(lead, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; ++k) out.loadings(k, j) = sign * v(k, src);
  }
  for (double lambda : out.eigenvalues) out.explained_variance_fractions.push_back(lambda / total);
  return out;
}

}  // namespace featwarp
