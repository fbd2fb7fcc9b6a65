#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "featwarp/data.h"
#include "featwarp/models.h"
#include "featwarp/random.h"

namespace testing {

using featwarp::FeatureMatrix;
using featwarp::Matrix;

inline std::vector<std::string> numbered(const std::string& prefix, std::size_t p) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p; ++j) names.push_back(prefix + std::to_string(j + 1));
  return names;
}

inline Matrix gaussian(std::size_t n, std::size_t p, std::uint64_t seed) {
  featwarp::Rng rng(seed);
  Matrix m(n, p);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

inline FeatureMatrix gaussian_frame(std::size_t n, std::size_t p, std::uint64_t seed) {
  return FeatureMatrix(numbered("x", p), gaussian(n, p, seed));
}

// Random mixing so columns are correlated and on different scales.
inline FeatureMatrix correlated_frame(std::size_t n, std::size_t p, std::uint64_t seed) {
  featwarp::Rng rng(featwarp::derive_seed(seed, 99));
  Matrix mix(p, p);
  for (double& v : mix.data()) v = rng.normal();
  for (std::size_t j = 0; j < p; ++j) mix(j, j) += 2.0;
  Matrix z = gaussian(n, p, seed);
  Matrix x = z * mix;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < p; ++j) x(r, j) = x(r, j) * (1.0 + static_cast<double>(j)) + 3.0 * static_cast<double>(j);
  return FeatureMatrix(numbered("x", p), x);
}

// Columns that are exactly centred, unit-sd and mutually orthogonal (Gram-Schmidt).
inline Matrix orthonormal_columns(std::size_t n, std::size_t p, std::uint64_t seed) {
  Matrix m = gaussian(n, p, seed);
  for (std::size_t j = 0; j < p; ++j) {
    auto c = m.col(j);
    double mu = 0.0;
    for (double v : c) mu += v;
    mu /= static_cast<double>(n);
    for (double& v : c) v -= mu;
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < j; ++k) {
        const auto q = m.col(k);
        double dot = 0.0, qq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          dot += c[i] * q[i];
          qq += q[i] * q[i];
        }
        for (std::size_t i = 0; i < n; ++i) c[i] -= dot / qq * q[i];
      }
    double ss = 0.0;
    for (double v : c) ss += v * v;
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    for (double& v : c) v /= sd;
    m.set_col(j, c);
  }
  return m;
}

// Plain two-pass Pearson correlation, written independently of the library.
inline double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double oracle_variance(const std::vector<double>& x) {
  double m = 0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

// Predictor given by an arbitrary per-row function.
class FunctionModel final : public featwarp::Predictor {
 public:
  using Fn = double (*)(std::span<const double>);
  FunctionModel(std::vector<std::string> names, Fn fn) : Predictor(std::move(names)), fn_(fn) {}
  std::vector<double> predict_aligned(const Matrix& rows) const override {
    std::vector<double> out(rows.rows());
    for (std::size_t r = 0; r < rows.rows(); ++r) out[r] = fn_(rows.row(r));
    return out;
  }

 private:
  Fn fn_;
};

// Linear model that remembers every row it was asked about.
class RecordingModel final : public featwarp::Predictor {
 public:
  explicit RecordingModel(std::vector<std::string> names) : Predictor(std::move(names)) {}
  std::vector<double> predict_aligned(const Matrix& rows) const override {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<double> out(rows.rows());
    for (std::size_t r = 0; r < rows.rows(); ++r) {
      seen_.emplace_back(rows.row(r).begin(), rows.row(r).end());
      out[r] = rows(r, 0);
    }
    return out;
  }
  const std::vector<std::vector<double>>& seen() const { return seen_; }

 private:
  mutable std::mutex mu_;
  mutable std::vector<std::vector<double>> seen_;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("featwarp-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Minimal XML well-formedness check: balanced tags, quoted attributes, known entities.
inline bool well_formed_xml(const std::string& doc, std::string* why = nullptr) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  std::vector<std::string> stack;
  std::size_t i = 0;
  bool root_seen = false;
  while (i < doc.size()) {
    if (doc[i] == '<') {
      const auto close = doc.find('>', i);
      if (close == std::string::npos) return fail("unterminated tag");
      std::string tag = doc.substr(i + 1, close - i - 1);
      i = close + 1;
      if (tag.starts_with("?")) continue;
      if (tag.starts_with("/")) {
        if (stack.empty() || stack.back() != tag.substr(1)) return fail("mismatched </" + tag.substr(1) + ">");
        stack.pop_back();
        continue;
      }
      const bool self_closing = tag.ends_with("/");
      if (self_closing) tag.pop_back();
      const auto space = tag.find_first_of(" \n\t");
      const std::string name = tag.substr(0, space);
      if (name.empty()) return fail("empty tag name");
      // attributes: name="value" pairs
      std::size_t k = space == std::string::npos ? tag.size() : space;
      while (k < tag.size()) {
        while (k < tag.size() && std::isspace(static_cast<unsigned char>(tag[k]))) ++k;
        if (k >= tag.size()) break;
        const auto eq = tag.find('=', k);
        if (eq == std::string::npos || eq + 1 >= tag.size() || tag[eq + 1] != '"') return fail("bad attribute");
        const auto end = tag.find('"', eq + 2);
        if (end == std::string::npos) return fail("unterminated attribute");
        if (tag.substr(eq + 2, end - eq - 2).find('<') != std::string::npos) return fail("'<' in attribute");
        k = end + 1;
      }
      if (stack.empty() && root_seen) return fail("second root element");
      root_seen = true;
      if (!self_closing) stack.push_back(name);
    } else if (doc[i] == '&') {
      const auto semi = doc.find(';', i);
      if (semi == std::string::npos) return fail("bare &");
      const std::string ent = doc.substr(i, semi - i + 1);
      if (ent != "&amp;" && ent != "&lt;" && ent != "&gt;" && ent != "&quot;" && ent != "&apos;")
        return fail("unknown entity " + ent);
      i = semi + 1;
    } else {
      ++i;
    }
  }
  if (!stack.empty()) return fail("unclosed <" + stack.back() + ">");
  return root_seen ? true : fail("no root element");
}

}  // namespace testing
