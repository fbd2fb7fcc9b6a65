#include "featwarp/cli.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "featwarp/error.h"
#include "featwarp/kmeans.h"
#include "featwarp/random.h"
#include "featwarp/svg.h"
#include "featwarp/symmetric_eigen.h"

namespace featwarp {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorCode::ConfigError, message); }

template <class T>
T get(const Json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    config_error(std::string("field '") + key + "' has the wrong type");
  }
}

void expect_object(const Json& j, const std::string& what) {
  if (!j.is_object()) config_error(what + " must be a JSON object");
}

std::vector<std::pair<std::string, std::vector<std::string>>> parse_named_lists(const Json& j,
                                                                                const std::string& what) {
  expect_object(j, what);
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  for (const auto& [name, cols] : j.items()) {
    if (!cols.is_array()) config_error(what + "." + name + " must be an array of column names");
    std::vector<std::string> names;
    for (const auto& c : cols) {
      if (!c.is_string()) config_error(what + "." + name + " must be an array of column names");
      names.push_back(c.get<std::string>());
    }
    out.emplace_back(name, std::move(names));
  }
  return out;
}

std::map<std::string, double> parse_point(const Json& j, const std::string& what) {
  expect_object(j, what);
  std::map<std::string, double> out;
  for (const auto& [name, v] : j.items()) {
    if (!v.is_number()) config_error(what + "." + name + " must be a number");
    out[name] = v.get<double>();
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_pairs(const Json& j, const std::string& what) {
  std::vector<std::pair<std::string, std::string>> out;
  if (!j.is_array()) config_error(what + " must be an array of [feature, feature] pairs");
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string())
      config_error(what + " must be an array of [feature, feature] pairs");
    out.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
  }
  return out;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

Json read_json_file(const fs::path& path, ErrorCode on_parse_error) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(on_parse_error, path.string() + ": " + e.what());
  }
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void write_json(const fs::path& path, const Json& doc) { write_file(path, doc.dump(2) + "\n"); }

void prepare_output(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::IoError, "cannot create output directory " + dir.string());
}

// File-name-safe version of a feature name.
std::string stem(const std::string& name) {
  std::string out = name;
  for (char& ch : out)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.')) ch = '_';
  return out;
}

struct Context {
  RunConfig config;
  std::ostream& out;
  bool quiet = false;
  void note(const std::string& message) const {
    if (!quiet) out << message << '\n';
  }
};

LabeledDataset load_data(const RunConfig& c) {
  if (!c.data) config_error("no data file given (set \"data\" in the config)");
  auto data = to_labeled_dataset(read_csv_file(*c.data), c.target);
  data.validate();
  return data;
}

FeatureGroups resolve_groups(const RunConfig& c, const FeatureMatrix& x) {
  return FeatureGroups::from_names(c.groups, x.names());
}

std::vector<double> point_in_order(const std::map<std::string, double>& point, const FeatureMatrix& x,
                                   const StandardizationParams& st) {
  for (const auto& [name, _] : point) x.index_of(name);
  std::vector<double> out(x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    auto it = point.find(x.names()[j]);
    out[j] = it == point.end() ? st.means[j] : it->second;
  }
  return out;
}

LinearWarper build_warper(const RunConfig& c, const FeatureMatrix& x) {
  const auto& w = c.warper;
  switch (w.kind) {
    case WarperKind::Identity: return identity_warper(x.names());
    case WarperKind::Pca: return fit_pca_warper(x);
    case WarperKind::StructuredPca:
      if (c.groups.empty()) throw Error(ErrorCode::InvalidGroups, "structured-pca needs feature groups");
      return fit_structured_pca_warper(x, resolve_groups(c, x));
    case WarperKind::Orthogonalization:
      if (w.anchor.empty()) config_error("orthogonalization needs warper.anchor");
      return fit_orthogonalization_warper(x, w.anchor);
    case WarperKind::Path: {
      const auto st = fit_standardization(x);
      switch (w.path_kind) {
        case PathKind::ClusterLine: {
          // Cluster in standardized units, report centers in original units.
          const auto z = apply_standardization(st, x);
          const auto km = kmeans(z, w.clusters, derive_seed(c.seed, 0x6b6d));
          const auto centers = invert_standardization(st, FeatureMatrix(x.names(), km.centers));
          return fit_path_warper(x, PathSpec::cluster_line(centers.values(), w.from_center, w.to_center));
        }
        case PathKind::LinearCombination: {
          std::vector<double> weights(x.cols(), 0.0);
          for (const auto& [name, v] : w.weights) weights[x.index_of(name)] = v;
          return fit_path_warper(x, PathSpec::linear_combination(weights));
        }
        case PathKind::EndpointLine:
          return fit_path_warper(x, PathSpec::endpoint_line(point_in_order(w.from, x, st),
                                                            point_in_order(w.to, x, st)));
      }
    }
  }
  config_error("unsupported warper kind");
}

std::shared_ptr<const Learner> make_learner(const RunConfig& c, TaskKind task) {
  if (c.model.kind == "linear") return std::make_shared<LinearLearner>();
  if (c.model.kind == "random-forest") {
    ForestParams params = c.model.forest;
    params.task = task;
    if (!c.model.seed_given) params.seed = c.seed;
    return std::make_shared<ForestLearner>(params);
  }
  config_error("unknown model kind '" + c.model.kind + "' (valid: random-forest, linear)");
}

PredictorPtr obtain_model(const Context& ctx, const LabeledDataset& data) {
  const auto& c = ctx.config;
  if (c.model.path) {
    ctx.note("loading model " + c.model.path->string());
    return predictor_from_json(read_json_file(*c.model.path, ErrorCode::ParseError));
  }
  ctx.note("fitting " + c.model.kind + " on " + std::to_string(data.features.rows()) + " rows");
  return make_learner(c, data.task)->fit(data);
}

std::size_t worker_count(std::size_t configured) {
  if (configured > 0) return configured;
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---- commands -------------------------------------------------------------

void cmd_synth(const Context& ctx) {
  const auto& c = ctx.config;
  SurrogateSpec spec = c.synth;
  auto surrogate = generate_surrogate(spec, c.seed);
  prepare_output(c.output);

  std::ostringstream csv;
  write_dataset_csv(csv, surrogate.data);
  write_file(c.output / "surrogate.csv", csv.str());

  Json groups = Json::object();
  for (const auto& [name, cols] : surrogate.groups) groups[name] = cols;
  write_json(c.output / "groups.json", groups);

  const auto report = calibration_report(surrogate.data.features, surrogate.groups);
  Json checks = Json::array();
  for (const auto& check : report.checks)
    checks.push_back({{"statistic", check.statistic},
                      {"target", check.target},
                      {"lower", check.lower},
                      {"upper", check.upper},
                      {"actual", check.actual},
                      {"within", check.within}});
  write_json(c.output / "calibration.json", Json{{"seed", c.seed}, {"checks", checks}});
  ctx.note("wrote " + (c.output / "surrogate.csv").string() + " (" +
           std::to_string(surrogate.data.features.rows()) + " rows, " +
           std::to_string(surrogate.data.features.cols() + 1) + " columns)");
}

struct PcaBlock {
  std::string name;
  std::string prefix;
  std::vector<std::string> features;
  PcaResult pca;
};

void cmd_pca_report(const Context& ctx) {
  const auto& c = ctx.config;
  const auto data = load_data(c);
  const auto& x = data.features;
  std::vector<PcaBlock> blocks;
  blocks.push_back({"all", "PC", x.names(), {}});
  for (const auto& [name, cols] : c.groups) {
    resolve_groups(c, x);  // validates
    blocks.push_back({name, name + "PC", cols, {}});
  }
  for (auto& b : blocks) b.pca = symmetric_eigen(correlation_matrix(x.select(b.features)));

  prepare_output(c.output);
  std::ostringstream eig;
  write_csv_row(eig, {"block", "component", "eigenvalue", "fraction", "cumulative"});
  Json scree = Json::array();
  for (const auto& b : blocks) {
    std::vector<double> cumulative;
    double acc = 0.0;
    for (std::size_t k = 0; k < b.pca.eigenvalues.size(); ++k) {
      acc += b.pca.explained_variance_fractions[k];
      cumulative.push_back(acc);
      write_csv_row(eig, {b.name, b.prefix + std::to_string(k + 1), format_double(b.pca.eigenvalues[k]),
                          format_double(b.pca.explained_variance_fractions[k]), format_double(acc)});
    }
    scree.push_back({{"block", b.name},
                     {"features", b.features},
                     {"eigenvalues", b.pca.eigenvalues},
                     {"fractions", b.pca.explained_variance_fractions},
                     {"cumulative", cumulative}});

    std::ostringstream load;
    std::vector<std::string> header{"feature"};
    for (std::size_t k = 0; k < b.features.size(); ++k) header.push_back(b.prefix + std::to_string(k + 1));
    write_csv_row(load, header);
    for (std::size_t i = 0; i < b.features.size(); ++i) {
      std::vector<std::string> row{b.features[i]};
      for (std::size_t k = 0; k < b.features.size(); ++k) row.push_back(format_double(b.pca.loadings(i, k)));
      write_csv_row(load, row);
    }
    const std::string suffix = b.name == "all" ? "" : "_" + stem(b.name);
    write_file(c.output / ("loadings" + suffix + ".csv"), load.str());

    svg::Series s;
    for (std::size_t k = 0; k < b.pca.eigenvalues.size(); ++k) {
      s.x.push_back(static_cast<double>(k + 1));
      s.y.push_back(b.pca.explained_variance_fractions[k]);
    }
    write_file(c.output / ("scree_" + stem(b.name) + ".svg"),
               svg::line_chart("Scree plot: " + b.name, "component", "explained variance fraction", s, true));
    if (b.features.size() >= 2) {
      svg::Series pts;
      for (std::size_t i = 0; i < b.features.size(); ++i) {
        pts.x.push_back(b.pca.loadings(i, 0));
        pts.y.push_back(b.pca.loadings(i, 1));
      }
      write_file(c.output / ("biplot_" + stem(b.name) + ".svg"),
                 svg::scatter("Loadings: " + b.name, b.prefix + "1", b.prefix + "2", pts, b.features));
    }
    ctx.note(b.name + ": top-2 explained variance " +
             format_double(b.pca.explained_variance_fractions[0] +
                           (b.features.size() > 1 ? b.pca.explained_variance_fractions[1] : 0.0)));
  }
  write_file(c.output / "eigenvalues.csv", eig.str());
  write_json(c.output / "scree.json", Json{{"blocks", scree}});
}

void emit_curve(const Context& ctx, const EffectCurve& curve) {
  const auto& dir = ctx.config.output;
  const std::string base = to_string(curve.kind) + "_" + stem(curve.feature);
  std::ostringstream csv;
  write_curve_csv(csv, curve);
  write_file(dir / (base + ".csv"), csv.str());
  write_json(dir / (base + ".json"), to_json(curve));
  const std::string label = curve.kind == EffectKind::Ale ? "ALE" : "partial dependence";
  write_file(dir / (base + ".svg"),
             svg::line_chart(label + ": " + curve.feature, curve.feature, label, {curve.grid, curve.values}));
}

void emit_surface(const Context& ctx, const EffectSurface& surface) {
  const auto& dir = ctx.config.output;
  const std::string base = to_string(surface.kind) + "2d_" + stem(surface.feature_a) + "__" + stem(surface.feature_b);
  std::ostringstream csv;
  write_surface_csv(csv, surface);
  write_file(dir / (base + ".csv"), csv.str());
  write_json(dir / (base + ".json"), to_json(surface));
  write_file(dir / (base + ".svg"),
             svg::heatmap(to_string(surface.kind) + ": " + surface.feature_a + " x " + surface.feature_b,
                          surface.feature_a, surface.feature_b, surface.grid_a, surface.grid_b, surface.values));
}

struct WarpedSetup {
  LabeledDataset data;
  LinearWarper warper;
  std::shared_ptr<WarpedModel> model;
  FeatureMatrix warped;
};

WarpedSetup warped_setup(const Context& ctx) {
  const auto& c = ctx.config;
  auto data = load_data(c);
  auto warper = build_warper(c, data.features);
  auto base = obtain_model(ctx, data);
  auto model = std::make_shared<WarpedModel>(warp_model(base, warper));
  auto warped = warper.forward(data.features);
  ctx.note("warper " + to_string(warper.kind()) + ": " + std::to_string(warper.output_dim()) + " warped features");
  return {std::move(data), std::move(warper), std::move(model), std::move(warped)};
}

void cmd_effects(const Context& ctx) {
  const auto& c = ctx.config;
  const auto& d = c.diagnostics;
  auto s = warped_setup(ctx);
  prepare_output(c.output);
  write_json(c.output / "warper.json", to_json(s.warper));
  const auto ale = d.ale.value_or(s.warped.names());
  for (const auto& f : ale) emit_curve(ctx, ale_1d(*s.model, s.warped, f, d.bins));
  for (const auto& f : d.pdp) emit_curve(ctx, pdp_1d(*s.model, s.warped, f, d.grid));
  for (const auto& [a, b] : d.ale_2d) emit_surface(ctx, ale_2d(*s.model, s.warped, a, b, d.bins));
  for (const auto& [a, b] : d.pdp_2d) emit_surface(ctx, pdp_2d(*s.model, s.warped, a, b, d.grid));
  ctx.note("wrote " + std::to_string(ale.size()) + " ALE and " + std::to_string(d.pdp.size()) + " PDP curves, " +
           std::to_string(d.ale_2d.size() + d.pdp_2d.size()) + " surfaces");
}

void cmd_importance(const Context& ctx) {
  const auto& c = ctx.config;
  const auto& ic = c.diagnostics.importance;
  auto s = warped_setup(ctx);
  ImportanceOptions opts;
  opts.loss = ic.loss.value_or(s.data.task == TaskKind::Classification ? Loss::LogLoss : Loss::Mse);
  opts.n_permutations = ic.n_permutations;
  opts.seed = c.seed;
  opts.workers = worker_count(ic.workers);
  const auto report = permutation_importance(*s.model, s.warped, s.data.target, opts);

  prepare_output(c.output);
  std::ostringstream csv;
  write_importance_csv(csv, report);
  write_file(c.output / "importance.csv", csv.str());
  write_json(c.output / "importance.json", to_json(report));
  std::vector<std::string> labels;
  std::vector<double> values, errors;
  for (const auto* f : report.ranked()) {
    if (labels.size() == ic.top_k) break;
    labels.push_back(f->feature);
    values.push_back(f->importance);
    errors.push_back(f->sd);
  }
  write_file(c.output / "importance.svg",
             svg::bar_chart("Permutation importance (top " + std::to_string(labels.size()) + ")",
                            "increase in " + to_string(opts.loss), labels, values, errors));
  if (!labels.empty()) ctx.note("most important: " + labels.front());
}

void cmd_train(const Context& ctx) {
  const auto& c = ctx.config;
  const auto data = load_data(c);
  const std::size_t n = data.features.rows();
  if (n < 4) throw Error(ErrorCode::EmptyData, "train needs at least 4 rows");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(c.seed, 0x73706c6974));
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n / 2));
  std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n / 2), order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  const auto train_data = data.select_rows(train);
  const auto test_data = data.select_rows(test);

  auto subsets = c.subsets.empty() ? c.groups : c.subsets;
  subsets.insert(subsets.begin(), {"all", data.features.names()});
  const auto learner = make_learner(c, data.task);
  const bool cls = data.task == TaskKind::Classification;

  prepare_output(c.output);
  Json runs = Json::array();
  std::ostringstream csv;
  write_csv_row(csv, cls ? std::vector<std::string>{"subset", "n_features", "accuracy", "log_loss"}
                         : std::vector<std::string>{"subset", "n_features", "mse", "rmse"});
  for (const auto& [name, cols] : subsets) {
    const auto model = learner->fit(train_data.select_features(cols));
    const auto pred = model->predict(test_data.features);
    Json run{{"subset", name}, {"n_features", cols.size()}};
    if (cls) {
      const double acc = 1.0 - evaluate_loss(Loss::ErrorRate, test_data.target, pred);
      const double ll = evaluate_loss(Loss::LogLoss, test_data.target, pred);
      run["accuracy"] = acc;
      run["log_loss"] = ll;
      write_csv_row(csv, {name, std::to_string(cols.size()), format_double(acc), format_double(ll)});
      ctx.note(name + ": holdout accuracy " + format_double(acc));
    } else {
      const double mse = evaluate_loss(Loss::Mse, test_data.target, pred);
      run["mse"] = mse;
      run["rmse"] = std::sqrt(mse);
      write_csv_row(csv, {name, std::to_string(cols.size()), format_double(mse), format_double(std::sqrt(mse))});
      ctx.note(name + ": holdout mse " + format_double(mse));
    }
    runs.push_back(run);
    if (name == "all") write_json(c.output / "model.json", to_json(*model));
  }
  write_file(c.output / "metrics.csv", csv.str());
  write_json(c.output / "metrics.json",
             Json{{"seed", c.seed}, {"n_train", train.size()}, {"n_test", test.size()}, {"runs", runs}});
}

}  // namespace

RunConfig parse_run_config(const Json& doc, const fs::path& base_dir) {
  expect_object(doc, "config");
  RunConfig c;
  if (doc.contains("data")) c.data = resolve(base_dir, get<std::string>(doc, "data", ""));
  if (doc.contains("output")) c.output = resolve(base_dir, get<std::string>(doc, "output", ""));
  c.seed = get<std::uint64_t>(doc, "seed", c.seed);

  if (doc.contains("target")) {
    const auto& t = doc["target"];
    expect_object(t, "target");
    c.target.column = get<std::string>(t, "column", c.target.column);
    if (t.contains("positive")) {
      if (t["positive"].is_null())
        c.target.positive_label.reset();
      else
        c.target.positive_label = get<std::string>(t, "positive", "1");
    }
    if (t.contains("negative")) c.target.negative_label = get<std::string>(t, "negative", "0");
  }

  if (doc.contains("groups")) {
    const auto& g = doc["groups"];
    if (g.is_string())
      c.groups = parse_named_lists(read_json_file(resolve(base_dir, g.get<std::string>()), ErrorCode::ConfigError),
                                   "groups");
    else
      c.groups = parse_named_lists(g, "groups");
  }

  if (doc.contains("warper")) {
    const auto& w = doc["warper"];
    expect_object(w, "warper");
    try {
      c.warper.kind = parse_warper_kind(get<std::string>(w, "kind", "identity"));
    } catch (const Error& e) {
      config_error(e.what());
    }
    c.warper.anchor = get<std::string>(w, "anchor", "");
    if (w.contains("path")) {
      const auto& p = w["path"];
      expect_object(p, "warper.path");
      try {
        c.warper.path_kind = parse_path_kind(get<std::string>(p, "kind", "cluster-line"));
      } catch (const Error& e) {
        config_error(e.what());
      }
      c.warper.clusters = get<std::size_t>(p, "clusters", c.warper.clusters);
      c.warper.from_center = get<std::size_t>(p, "from_center", c.warper.from_center);
      c.warper.to_center = get<std::size_t>(p, "to_center", c.warper.to_center);
      if (p.contains("weights")) c.warper.weights = parse_point(p["weights"], "warper.path.weights");
      if (p.contains("from")) c.warper.from = parse_point(p["from"], "warper.path.from");
      if (p.contains("to")) c.warper.to = parse_point(p["to"], "warper.path.to");
    }
  }

  if (doc.contains("model")) {
    const auto& m = doc["model"];
    expect_object(m, "model");
    c.model.kind = get<std::string>(m, "kind", c.model.kind);
    if (m.contains("path")) c.model.path = resolve(base_dir, get<std::string>(m, "path", ""));
    c.model.seed_given = m.contains("seed");
    auto& f = c.model.forest;
    f.seed = get<std::uint64_t>(m, "seed", f.seed);
    f.n_trees = get<std::size_t>(m, "n_trees", f.n_trees);
    f.max_depth = get<std::size_t>(m, "max_depth", f.max_depth);
    f.min_leaf = get<std::size_t>(m, "min_leaf", f.min_leaf);
    f.mtry = get<std::size_t>(m, "mtry", f.mtry);
  }

  if (doc.contains("diagnostics")) {
    const auto& d = doc["diagnostics"];
    expect_object(d, "diagnostics");
    auto& dc = c.diagnostics;
    if (d.contains("ale")) dc.ale = get<std::vector<std::string>>(d, "ale", {});
    dc.pdp = get<std::vector<std::string>>(d, "pdp", {});
    if (d.contains("ale_2d")) dc.ale_2d = parse_pairs(d["ale_2d"], "diagnostics.ale_2d");
    if (d.contains("pdp_2d")) dc.pdp_2d = parse_pairs(d["pdp_2d"], "diagnostics.pdp_2d");
    dc.bins = get<std::size_t>(d, "bins", dc.bins);
    if (d.contains("grid")) {
      const auto& g = d["grid"];
      expect_object(g, "diagnostics.grid");
      const auto strategy = get<std::string>(g, "strategy", "quantile");
      if (strategy == "quantile")
        dc.grid.strategy = GridStrategy::Quantile;
      else if (strategy == "uniform")
        dc.grid.strategy = GridStrategy::Uniform;
      else
        config_error("diagnostics.grid.strategy must be 'quantile' or 'uniform'");
      dc.grid.resolution = get<std::size_t>(g, "resolution", dc.grid.resolution);
      dc.grid.lower = get<double>(g, "lower", dc.grid.lower);
      dc.grid.upper = get<double>(g, "upper", dc.grid.upper);
    }
    if (d.contains("importance")) {
      const auto& i = d["importance"];
      expect_object(i, "diagnostics.importance");
      if (i.contains("loss")) dc.importance.loss = parse_loss(get<std::string>(i, "loss", ""));
      dc.importance.n_permutations = get<std::size_t>(i, "n_permutations", dc.importance.n_permutations);
      dc.importance.top_k = get<std::size_t>(i, "top_k", dc.importance.top_k);
      dc.importance.workers = get<std::size_t>(i, "workers", dc.importance.workers);
    }
  }

  if (doc.contains("train")) {
    const auto& t = doc["train"];
    expect_object(t, "train");
    if (t.contains("subsets")) c.subsets = parse_named_lists(t["subsets"], "train.subsets");
  }

  if (doc.contains("synth")) {
    const auto& s = doc["synth"];
    expect_object(s, "synth");
    c.synth.n_samples = get<std::size_t>(s, "n_samples", c.synth.n_samples);
    c.synth.correlated = get<bool>(s, "correlated", c.synth.correlated);
    c.synth.check_calibration = get<bool>(s, "check_calibration", c.synth.check_calibration);
  }
  return c;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model diagnostics through invertible feature-space warpers", "featwarp"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--out", out_dir, "override the output directory");
  app.add_flag("--quiet", quiet, "suppress progress messages");
  app.fallthrough();
  const std::vector<std::pair<std::string, std::string>> verbs{
      {"synth", "generate the synthetic texture/terrain surrogate"},
      {"pca-report", "eigenvalues, loadings and scree/biplot SVGs"},
      {"effects", "ALE and PDP curves/surfaces of the warped model"},
      {"importance", "permutation importance of warped features"},
      {"train", "fit on a seeded 50/50 split and report holdout metrics"}};
  for (const auto& [name, help] : verbs) app.add_subcommand(name, help);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) {
      const fs::path path(config_path);
      config = parse_run_config(read_json_file(path, ErrorCode::ConfigError), path.parent_path());
    }
    if (seed) config.seed = *seed;
    if (!out_dir.empty()) config.output = out_dir;
    Context ctx{std::move(config), out, quiet};
    const std::string verb = app.get_subcommands().front()->get_name();
    if (verb == "synth") cmd_synth(ctx);
    else if (verb == "pca-report") cmd_pca_report(ctx);
    else if (verb == "effects") cmd_effects(ctx);
    else if (verb == "importance") cmd_importance(ctx);
    else cmd_train(ctx);
    return 0;
  } catch (const Error& e) {
    err << "featwarp: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "featwarp: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace featwarp
