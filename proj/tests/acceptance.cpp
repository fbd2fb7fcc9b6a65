// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "featwarp/cli.h"
#include "featwarp/diagnostics.h"
#include "featwarp/error.h"
#include "featwarp/models.h"
#include "featwarp/symmetric_eigen.h"
#include "featwarp/synth.h"
#include "featwarp/warper.h"
#include "helpers.h"

using namespace featwarp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const SurrogateData& surrogate() {
  static const SurrogateData s = generate_surrogate(SurrogateSpec{}, 1);
  return s;
}

double max_abs(const FeatureMatrix& a, const FeatureMatrix& b) { return max_abs_diff(a.values(), b.values()); }

// Sample covariance with two-pass centring, independent of the library.
Matrix oracle_covariance(const Matrix& x) {
  const std::size_t n = x.rows(), p = x.cols();
  std::vector<double> mu(p, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < p; ++j) mu[j] += x(r, j);
  for (double& m : mu) m /= static_cast<double>(n);
  Matrix c(p, p);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i; j < p; ++j) c(i, j) += (x(r, i) - mu[i]) * (x(r, j) - mu[j]);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) c(j, i) = c(i, j) /= static_cast<double>(n - 1);
  return c;
}

double max_off_diagonal(const Matrix& c, const std::vector<std::size_t>& idx) {
  double worst = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b)
      if (a != b) worst = std::max(worst, std::abs(c(idx[a], idx[b])));
  return worst;
}

Matrix class_means(const LabeledDataset& d) {
  Matrix m(2, d.features.cols());
  double n[2] = {0, 0};
  for (std::size_t r = 0; r < d.features.rows(); ++r) {
    const std::size_t k = d.target[r] > 0.5 ? 1 : 0;
    n[k] += 1;
    for (std::size_t j = 0; j < d.features.cols(); ++j) m(k, j) += d.features(r, j);
  }
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t j = 0; j < m.cols(); ++j) m(k, j) /= n[k];
  return m;
}

std::vector<std::pair<std::string, LinearWarper>> all_warpers(const FeatureMatrix& x,
                                                              const SurrogateData& s) {
  const auto groups = FeatureGroups::from_names(s.groups, x.names());
  std::vector<double> weights(x.cols(), 0.0);
  weights[x.index_of("slope")] = 1.0;
  weights[x.index_of("solar_radiation")] = -0.5;
  weights[x.index_of("gabor_bw5_a1_median")] = 0.25;
  const Matrix centers = class_means(s.data);
  std::vector<double> from(centers.row(0).begin(), centers.row(0).end());
  std::vector<double> to(centers.row(1).begin(), centers.row(1).end());
  return {{"identity", identity_warper(x.names())},
          {"pca", fit_pca_warper(x)},
          {"structured-pca", fit_structured_pca_warper(x, groups)},
          {"orthogonalization", fit_orthogonalization_warper(x, "slope")},
          {"path/linear-combination", fit_path_warper(x, PathSpec::linear_combination(weights))},
          {"path/endpoint-line", fit_path_warper(x, PathSpec::endpoint_line(from, to))},
          {"path/cluster-line", fit_path_warper(x, PathSpec::cluster_line(centers, 0, 1))}};
}

Outcome a1() {
  const auto& s = surrogate();
  const auto& x = s.data.features;
  if (x.rows() != 1000 || x.cols() != 46) return {false, "surrogate shape is not 1000 x 46"};
  double round_trip = 0.0;
  for (const auto& [name, w] : all_warpers(x, s)) round_trip = std::max(round_trip, max_abs(w.inverse(w.forward(x)), x));

  // Orthonormal loadings and diagonal warped covariance: PCA globally, structured PCA per block.
  const auto pca = fit_pca_warper(x);
  const Matrix& a = pca.forward_matrix();
  const double ortho = max_abs_diff(a * a.transpose(), Matrix::identity(a.rows()));
  std::vector<std::size_t> all(x.cols());
  std::iota(all.begin(), all.end(), 0);
  double offdiag = max_off_diagonal(oracle_covariance(pca.forward(x).values()), all);

  const auto spca = fit_structured_pca_warper(x, FeatureGroups::from_names(s.groups, x.names()));
  const Matrix cov = oracle_covariance(spca.forward(x).values());
  double block_ortho = 0.0;
  std::size_t first_row = 0;
  for (const auto& block : spca.metadata().blocks) {
    const std::size_t k = block.columns.size();
    std::vector<std::size_t> rows(k);
    std::iota(rows.begin(), rows.end(), first_row);
    first_row += k;
    // Rows of this block touch only its own columns; those sub-rows must be orthonormal.
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        double dot = 0.0;
        for (std::size_t c : block.columns) dot += spca.forward_matrix()(rows[i], c) * spca.forward_matrix()(rows[j], c);
        block_ortho = std::max(block_ortho, std::abs(dot - (i == j ? 1.0 : 0.0)));
      }
    offdiag = std::max(offdiag, max_off_diagonal(cov, rows));
  }
  const bool pass = round_trip < 1e-8 && ortho < 1e-10 && block_ortho < 1e-10 && offdiag < 1e-8;
  return {pass, "round trip " + fmt("%.2e", round_trip) + ", loadings " + fmt("%.2e", std::max(ortho, block_ortho)) +
                    ", off-diagonal covariance " + fmt("%.2e", offdiag)};
}

Outcome a2() {
  const auto& s = surrogate();
  const auto& x = s.data.features;
  ForestParams params;
  params.seed = 11;
  auto forest = std::make_shared<RandomForest>(fit_random_forest(s.data, params));
  const auto direct = forest->predict(x);
  double worst = 0.0;
  bool identity_bitwise = false;
  for (const auto& [name, w] : all_warpers(x, s)) {
    const auto warped = warp_model(forest, w).predict(w.forward(x));
    if (name == "identity") identity_bitwise = warped == direct;
    for (std::size_t r = 0; r < direct.size(); ++r) worst = std::max(worst, std::abs(warped[r] - direct[r]));
  }
  return {worst < 1e-6 && identity_bitwise,
          "max |g(T(x)) - f(x)| " + fmt("%.2e", worst) + ", identity bitwise " + (identity_bitwise ? "yes" : "no")};
}

std::vector<double> brute_pdp(const Predictor& model, const FeatureMatrix& data, std::size_t j,
                              std::span<const double> grid) {
  std::vector<double> out;
  for (double g : grid) {
    double total = 0.0;
    for (std::size_t r = 0; r < data.rows(); ++r) {
      Matrix row(1, data.cols());
      for (std::size_t c = 0; c < data.cols(); ++c) row(0, c) = data(r, c);
      row(0, j) = g;
      total += model.predict(FeatureMatrix(data.names(), row))[0];
    }
    out.push_back(total / static_cast<double>(data.rows()));
  }
  return out;
}

Outcome a3() {
  const auto& x = surrogate().data.features;
  const std::size_t p = x.cols();
  Rng rng(2024);
  std::vector<double> a(p);
  for (double& v : a) v = rng.normal();
  auto linear = std::make_shared<LinearModel>(x.names(), 0.7, a);

  double pdp_err = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    const auto c = pdp_1d(*linear, x, x.names()[j]);
    for (std::size_t k = 0; k + 1 < c.grid.size(); ++k)
      pdp_err = std::max(pdp_err, std::abs((c.values[k + 1] - c.values[k]) / (c.grid[k + 1] - c.grid[k]) - a[j]));
  }

  // Loadings are checked as eigenvectors of an independently computed correlation matrix;
  // the expected slope along PCj is then sum_i a_i sd_i V_ij.
  const auto pca = fit_pca_warper(x);
  const auto& st = pca.standardization();
  Matrix r(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) r(i, j) = testing::oracle_pearson(x.values().col(i), x.values().col(j));
  double eig_resid = 0.0;
  const auto& eigenvalues = pca.metadata().eigenvalues;
  for (std::size_t k = 0; k < p; ++k) {
    const auto v = pca.forward_matrix().row(k);
    const auto rv = multiply(r, v);
    for (std::size_t i = 0; i < p; ++i) eig_resid = std::max(eig_resid, std::abs(rv[i] - eigenvalues[k] * v[i]));
  }
  const WarpedModel warped = warp_model(linear, pca);
  const auto w = pca.forward(x);
  double ale_err = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    double expected = 0.0;
    for (std::size_t i = 0; i < p; ++i) expected += a[i] * st.sds[i] * pca.forward_matrix()(k, i);
    const auto c = ale_1d(warped, w, pca.output_names()[k], 20);
    for (std::size_t b = 0; b + 1 < c.grid.size(); ++b)
      ale_err = std::max(ale_err, std::abs((c.values[b + 1] - c.values[b]) / (c.grid[b + 1] - c.grid[b]) - expected));
  }

  bool bitwise = true;
  for (const std::string f : {"PC1", "PC2"}) {
    const auto c = pdp_1d(warped, w, f);
    bitwise = bitwise && c.values == brute_pdp(warped, w, w.index_of(f), c.grid);
  }
  for (const std::string f : {"slope", "gabor_bw10_a2_max"}) {
    const auto c = pdp_1d(*linear, x, f);
    bitwise = bitwise && c.values == brute_pdp(*linear, x, x.index_of(f), c.grid);
  }
  const bool pass = pdp_err < 1e-10 && eig_resid < 1e-8 && ale_err < 1e-6 && bitwise;
  return {pass, "pdp slope " + fmt("%.2e", pdp_err) + ", ale slope along PCs " + fmt("%.2e", ale_err) +
                    ", eigen residual " + fmt("%.2e", eig_resid) + ", brute-force pdp bitwise " +
                    (bitwise ? "yes" : "no")};
}

double additive(std::span<const double> r) { return r[0] * r[0] + std::sin(3.0 * r[1]); }

// Sup error over interior grid points; the truth is centred with the curve's own bin weights.
double ale_component_error(const EffectCurve& c, double (*truth)(double)) {
  double off = 0.0, n = 0.0;
  for (std::size_t k = 0; k < c.support.size(); ++k) {
    off += static_cast<double>(c.support[k]) * (truth(c.grid[k]) + truth(c.grid[k + 1])) / 2.0;
    n += static_cast<double>(c.support[k]);
  }
  off /= n;
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < c.grid.size(); ++k)
    worst = std::max(worst, std::abs(c.values[k] - (truth(c.grid[k]) - off)));
  return worst;
}

Outcome a4() {
  const FeatureMatrix x({"x1", "x2"}, testing::gaussian(2000, 2, 404));
  const testing::FunctionModel model(x.names(), additive);
  const double e1 = ale_component_error(ale_1d(model, x, "x1", 20), [](double v) { return v * v; });
  const double e2 = ale_component_error(ale_1d(model, x, "x2", 20), [](double v) { return std::sin(3.0 * v); });
  const auto surface = ale_2d(model, x, "x1", "x2", 20);
  double e12 = 0.0;
  for (double v : surface.values.data()) e12 = std::max(e12, std::abs(v));
  return {e1 < 0.05 && e2 < 0.05 && e12 < 0.05, "x^2 " + fmt("%.2e", e1) + ", sin(3x) " + fmt("%.2e", e2) +
                                                   ", second-order surface " + fmt("%.2e", e12)};
}

double top2(const FeatureMatrix& x) {
  const auto f = symmetric_eigen(correlation_matrix(x)).explained_variance_fractions;
  return f[0] + f[1];
}

Outcome a5() {
  const auto& s = surrogate();
  const double texture = top2(s.data.features.select(s.groups[0].second));
  const double full = top2(s.data.features);
  return {texture >= 0.65 && full >= 0.55, "texture top-2 " + fmt("%.3f", texture) + ", all features top-2 " + fmt("%.3f", full)};
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split(std::size_t n, std::size_t n_train,
                                                                    std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(idx));
  std::vector<std::size_t> train(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

Outcome a6() {
  int wins = 0;
  const int runs = 20;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int run = 1; run <= runs; ++run) {
    const std::uint64_t seed = 100 + static_cast<std::uint64_t>(run);
    const auto s = generate_surrogate(SurrogateSpec{}, seed);
    const auto [tr, te] = split(s.data.features.rows(), 700, derive_seed(seed, 1));
    const auto train = s.data.select_rows(tr);
    const auto test = s.data.select_rows(te);
    ForestParams params;
    params.seed = derive_seed(seed, 2);
    auto forest = std::make_shared<RandomForest>(fit_random_forest(train, params));
    const auto warper =
        fit_structured_pca_warper(train.features, FeatureGroups::from_names(s.groups, train.features.names()));
    const WarpedModel warped = warp_model(forest, warper);

    ImportanceOptions opt;
    opt.n_permutations = 10;
    opt.seed = derive_seed(seed, 3);
    opt.features = {"texturePC1"};
    const double pc1 = permutation_importance(warped, warper.forward(test.features), test.target, opt)
                           .at("texturePC1")
                           .importance;
    opt.features = s.groups[0].second;
    const auto raw = permutation_importance(*forest, test.features, test.target, opt);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& f : raw.features) best = std::max(best, f.importance);
    if (pc1 > best) ++wins;
    worst_margin = std::min(worst_margin, pc1 - best);
  }
  return {wins * 100 >= 95 * runs, std::to_string(wins) + "/" + std::to_string(runs) +
                                       " runs, smallest margin " + fmt("%.4f", worst_margin)};
}

Outcome a7() {
  const auto& x = surrogate().data.features;
  const std::string anchor = "slope";
  const auto w = fit_orthogonalization_warper(x, anchor).forward(x);
  const std::size_t s = x.index_of(anchor);
  const auto ws = w.values().col(s);
  double worst_cor = 0.0;
  for (std::size_t i = 0; i < w.cols(); ++i)
    if (i != s) worst_cor = std::max(worst_cor, std::abs(testing::oracle_pearson(w.values().col(i), ws)));
  const auto xs = x.column(anchor);
  double mean = 0.0;
  for (double v : xs) mean += v;
  mean /= static_cast<double>(xs.size());
  const double sd = std::sqrt(testing::oracle_variance(xs));
  double anchor_err = 0.0;
  for (std::size_t r = 0; r < xs.size(); ++r) anchor_err = std::max(anchor_err, std::abs(ws[r] - (xs[r] - mean) / sd));

  bool collinear = false;
  try {
    fit_orthogonalization_warper(x.with_appended("slope_copy", xs), anchor);
  } catch (const Error& e) {
    collinear = e.code() == ErrorCode::NearCollinear;
  }
  return {worst_cor < 1e-10 && anchor_err < 1e-12 && collinear,
          "max |cor(w_i, w_s)| " + fmt("%.2e", worst_cor) + ", anchor vs standardized " + fmt("%.2e", anchor_err) +
              ", duplicated anchor " + (collinear ? "NearCollinear" : "not rejected")};
}

struct Cli {
  int code;
  std::string err;
};

Cli cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, err.str()};
}

Outcome a8() {
  testing::TempDir dir("accept-a8");
  if (cli({"synth", "--out", dir.path().string(), "--quiet"}).code != 0) return {false, "synth failed"};
  const auto cfg = dir.path() / "train.json";
  std::ofstream(cfg) << Json{{"data", "surrogate.csv"}, {"groups", "groups.json"}, {"output", "run"}}.dump(2);
  const auto run = cli({"train", "--config", cfg.string(), "--quiet"});
  if (run.code != 0) return {false, "train failed: " + run.err};
  const auto metrics = Json::parse(testing::slurp(dir.path() / "run" / "metrics.json"));
  std::map<std::string, double> acc;
  for (const auto& r : metrics["runs"]) acc[r["subset"].get<std::string>()] = r["accuracy"].get<double>();
  const bool pass = acc.count("all") && acc.count("terrain") && acc.count("texture") && acc["all"] > acc["terrain"] &&
                    acc["all"] > acc["texture"];
  return {pass, "accuracy all " + fmt("%.3f", acc["all"]) + ", terrain " + fmt("%.3f", acc["terrain"]) + ", texture " +
                    fmt("%.3f", acc["texture"])};
}

Outcome a9() {
  const auto& s = surrogate();
  Rng rng(909);
  std::vector<double> noise(s.data.features.rows());
  for (double& v : noise) v = rng.normal();
  LabeledDataset d = s.data;
  d.features = d.features.with_appended("noise", noise);
  const auto [tr, te] = split(d.features.rows(), 500, 910);
  const auto train = d.select_rows(tr);
  const auto test = d.select_rows(te);
  ForestParams params;
  params.seed = 911;
  const auto forest = fit_random_forest(train, params);
  ImportanceOptions opt;
  opt.n_permutations = 20;
  opt.seed = 912;
  opt.features = {"noise"};
  const auto f = permutation_importance(forest, test.features, test.target, opt).at("noise");
  return {std::abs(f.importance) <= 3.0 * f.sd,
          "noise importance " + fmt("%.5f", f.importance) + ", replicate sd " + fmt("%.5f", f.sd)};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = testing::slurp(e.path());
  return files;
}

Outcome a10() {
  testing::TempDir dir("accept-a10");
  const auto ws = dir.path();
  if (cli({"synth", "--out", ws.string(), "--seed", "7", "--quiet"}).code != 0) return {false, "synth failed"};
  const Json forest = {{"kind", "random-forest"}, {"n_trees", 40}};
  const Json config = {
      {"data", "surrogate.csv"},
      {"groups", "groups.json"},
      {"warper", {{"kind", "structured-pca"}}},
      {"model", forest},
      {"diagnostics",
       {{"ale", {"texturePC1", "terrainPC2"}},
        {"pdp", {"texturePC1", "terrainPC1"}},
        {"ale_2d", Json::array({Json::array({"texturePC1", "texturePC2"})})},
        {"pdp_2d", Json::array({Json::array({"texturePC1", "terrainPC1"})})},
        {"grid", {{"resolution", 12}}},
        {"importance", {{"n_permutations", 3}}}}}};
  std::ofstream(ws / "config.json") << config.dump(2);

  std::vector<std::string> failed;
  const std::vector<std::vector<std::string>> commands = {
      {"synth", "--seed", "7"}, {"pca-report"}, {"effects"}, {"importance"}, {"train"}};
  for (const auto& base : commands) {
    std::map<std::string, std::string> outputs[2];
    bool ok = true;
    for (int rep = 0; rep < 2; ++rep) {
      const auto out = ws / (base[0] + "-" + std::to_string(rep));
      auto args = base;
      args.insert(args.end(), {"--config", (ws / "config.json").string(), "--seed", "3", "--out", out.string(), "--quiet"});
      if (base[0] == "synth") args = {"synth", "--seed", "7", "--out", out.string(), "--quiet"};
      ok = ok && cli(args).code == 0;
      if (ok) outputs[rep] = snapshot(out);
    }
    if (!ok || outputs[0].empty() || outputs[0] != outputs[1]) failed.push_back(base[0]);
  }
  std::string detail = "synth, pca-report, effects, importance, train rerun";
  if (failed.empty()) return {true, detail + ": byte-identical"};
  for (const auto& f : failed) detail += " [" + f + " differs or failed]";
  return {false, detail};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* what;
    std::function<Outcome()> run;
    double limit_seconds;  // 0: no runtime budget
  };
  const std::vector<Criterion> criteria = {
      {"A1", "warper round trip", a1, 10},
      {"A2", "composition exactness", a2, 0},
      {"A3", "analytic diagnostics oracles", a3, 30},
      {"A4", "ALE recovery", a4, 0},
      {"A5", "surrogate variance concentration", a5, 0},
      {"A6", "importance structure", a6, 120},
      {"A7", "orthogonalization contract", a7, 0},
      {"A8", "accuracy ordering", a8, 0},
      {"A9", "unused-feature null", a9, 0},
      {"A10", "CLI reproducibility", a10, 0},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs >= c.limit_seconds) {
      o.pass = false;
      o.detail += ", over the " + fmt("%.0f", c.limit_seconds) + " s budget";
    }
    if (!o.pass) ++failures;
    std::printf("%-3s %s  %s: %s (%.2f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.what, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
