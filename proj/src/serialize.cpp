#include "featwarp/serialize.h"

#include <ostream>

#include "featwarp/csv.h"
#include "featwarp/error.h"

namespace featwarp {

namespace {

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    rows.push_back(Json(std::vector<double>(row.begin(), row.end())));
  }
  return rows;
}

Matrix matrix_from(const Json& j, std::size_t cols) {
  Matrix m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (j[r].size() != cols) throw Error(ErrorCode::SchemaMismatch, "ragged matrix in document");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed document: ") + e.what());
  }
}

Json path_json(const PathSpec& p) {
  Json j;
  j["kind"] = to_string(p.kind);
  j["name"] = p.name;
  j["from"] = p.from;
  j["to"] = p.to;
  j["centers"] = p.centers;
  j["from_center"] = p.from_center;
  j["to_center"] = p.to_center;
  j["weights"] = p.weights;
  j["t_range"] = {p.t_min, p.t_max};
  return j;
}

PathSpec path_from(const Json& j) {
  PathSpec p;
  p.kind = parse_path_kind(j.at("kind").get<std::string>());
  p.name = j.value("name", std::string("path"));
  p.from = j.value("from", std::vector<double>{});
  p.to = j.value("to", std::vector<double>{});
  p.centers = j.value("centers", std::vector<std::vector<double>>{});
  p.from_center = j.value("from_center", std::size_t{0});
  p.to_center = j.value("to_center", std::size_t{1});
  p.weights = j.value("weights", std::vector<double>{});
  if (j.contains("t_range")) {
    p.t_min = j["t_range"].at(0).get<double>();
    p.t_max = j["t_range"].at(1).get<double>();
  }
  return p;
}

}  // namespace

Json to_json(const LinearWarper& w) {
  Json j;
  j["kind"] = to_string(w.kind());
  j["input_names"] = w.input_names();
  j["output_names"] = w.output_names();
  j["standardization"] = {{"convention", "sample"},
                          {"means", w.standardization().means},
                          {"sds", w.standardization().sds}};
  j["forward_matrix"] = matrix_json(w.forward_matrix());
  j["forward_offset"] = w.forward_offset();
  j["inverse_matrix"] = matrix_json(w.inverse_matrix());

  const auto& m = w.metadata();
  Json meta = Json::object();
  switch (w.kind()) {
    case WarperKind::Pca:
      meta["eigenvalues"] = m.eigenvalues;
      break;
    case WarperKind::StructuredPca: {
      Json blocks = Json::array();
      for (const auto& b : m.blocks)
        blocks.push_back({{"group", b.group}, {"columns", b.columns}, {"eigenvalues", b.eigenvalues}});
      meta["blocks"] = blocks;
      meta["passthrough"] = m.passthrough;
      break;
    }
    case WarperKind::Orthogonalization:
      meta["anchor"] = m.anchor;
      meta["coefficients"] = m.coefficients;
      break;
    case WarperKind::Path:
      meta["coefficients"] = m.coefficients;
      meta["path"] = path_json(*m.path);
      meta["path_mean"] = m.path_mean;
      meta["path_sd"] = m.path_sd;
      break;
    case WarperKind::Identity:
      break;
  }
  j["metadata"] = meta;
  return j;
}

LinearWarper warper_from_json(const Json& j) {
  return guarded([&] {
    const auto kind = parse_warper_kind(j.at("kind").get<std::string>());
    StandardizationParams params;
    params.names = j.at("input_names").get<std::vector<std::string>>();
    params.means = j.at("standardization").at("means").get<std::vector<double>>();
    params.sds = j.at("standardization").at("sds").get<std::vector<double>>();
    const std::size_t p = params.names.size();
    auto outputs = j.at("output_names").get<std::vector<std::string>>();
    Matrix forward = matrix_from(j.at("forward_matrix"), p);
    Matrix inverse = matrix_from(j.at("inverse_matrix"), outputs.size());
    auto offset = j.at("forward_offset").get<std::vector<double>>();

    WarperMetadata meta;
    const Json& m = j.at("metadata");
    meta.eigenvalues = m.value("eigenvalues", std::vector<double>{});
    if (m.contains("blocks"))
      for (const auto& b : m["blocks"])
        meta.blocks.push_back({b.at("group").get<std::string>(), b.at("columns").get<std::vector<std::size_t>>(),
                               b.at("eigenvalues").get<std::vector<double>>()});
    meta.passthrough = m.value("passthrough", std::vector<std::size_t>{});
    meta.anchor = m.value("anchor", std::string{});
    meta.coefficients = m.value("coefficients", std::vector<double>{});
    if (m.contains("path")) meta.path = path_from(m["path"]);
    meta.path_mean = m.value("path_mean", 0.0);
    meta.path_sd = m.value("path_sd", 1.0);
    if (kind == WarperKind::Path && !meta.path) throw Error(ErrorCode::ParseError, "path warper without path spec");
    return LinearWarper(kind, std::move(params), std::move(outputs), std::move(forward), std::move(offset),
                        std::move(inverse), std::move(meta));
  });
}

Json to_json(const Predictor& model) {
  Json j;
  if (const auto* lin = dynamic_cast<const LinearModel*>(&model)) {
    j["type"] = "linear";
    j["input_names"] = lin->input_names();
    j["intercept"] = lin->intercept();
    j["coefficients"] = lin->coefficients();
  } else if (const auto* rf = dynamic_cast<const RandomForest*>(&model)) {
    const auto& p = rf->params();
    j["type"] = "random-forest";
    j["input_names"] = rf->input_names();
    j["params"] = {{"n_trees", p.n_trees}, {"max_depth", p.max_depth}, {"min_leaf", p.min_leaf},
                   {"mtry", p.mtry},       {"seed", p.seed},
                   {"task", p.task == TaskKind::Classification ? "classification" : "regression"}};
    Json trees = Json::array();
    for (const auto& t : rf->trees()) {
      // Node columns: feature, threshold, left, right, value.
      Json nodes = Json::array();
      for (const auto& n : t.nodes) nodes.push_back(Json::array({n.feature, n.threshold, n.left, n.right, n.value}));
      trees.push_back(nodes);
    }
    j["trees"] = trees;
  } else if (const auto* wm = dynamic_cast<const WarpedModel*>(&model)) {
    j["type"] = "warped";
    j["warper"] = to_json(wm->warper());
    j["base"] = to_json(*wm->base());
  } else {
    throw Error(ErrorCode::InvalidParams, "model type cannot be serialized");
  }
  return j;
}

PredictorPtr predictor_from_json(const Json& j) {
  return guarded([&]() -> PredictorPtr {
    const auto type = j.at("type").get<std::string>();
    if (type == "linear")
      return std::make_shared<LinearModel>(j.at("input_names").get<std::vector<std::string>>(),
                                           j.at("intercept").get<double>(),
                                           j.at("coefficients").get<std::vector<double>>());
    if (type == "random-forest") {
      ForestParams p;
      const Json& pj = j.at("params");
      p.n_trees = pj.at("n_trees").get<std::size_t>();
      p.max_depth = pj.at("max_depth").get<std::size_t>();
      p.min_leaf = pj.at("min_leaf").get<std::size_t>();
      p.mtry = pj.at("mtry").get<std::size_t>();
      p.seed = pj.at("seed").get<std::uint64_t>();
      p.task = pj.at("task").get<std::string>() == "classification" ? TaskKind::Classification : TaskKind::Regression;
      std::vector<DecisionTree> trees;
      for (const auto& tj : j.at("trees")) {
        DecisionTree t;
        for (const auto& nj : tj)
          t.nodes.push_back({nj.at(0).get<int>(), nj.at(1).get<double>(), nj.at(2).get<int>(), nj.at(3).get<int>(),
                             nj.at(4).get<double>()});
        trees.push_back(std::move(t));
      }
      return std::make_shared<RandomForest>(j.at("input_names").get<std::vector<std::string>>(), p, std::move(trees));
    }
    if (type == "warped")
      return std::make_shared<WarpedModel>(predictor_from_json(j.at("base")), warper_from_json(j.at("warper")));
    throw Error(ErrorCode::ParseError, "unknown model type '" + type + "'");
  });
}

Json to_json(const EffectCurve& c) {
  return {{"feature", c.feature}, {"kind", to_string(c.kind)}, {"grid", c.grid},
          {"values", c.values},   {"support", c.support}};
}

Json to_json(const EffectSurface& s) {
  return {{"feature_a", s.feature_a}, {"feature_b", s.feature_b}, {"kind", to_string(s.kind)},
          {"grid_a", s.grid_a},       {"grid_b", s.grid_b},       {"values", matrix_json(s.values)}};
}

Json to_json(const ImportanceReport& r) {
  Json features = Json::array();
  for (const auto* f : r.ranked())
    features.push_back({{"feature", f->feature},
                        {"rank", f->rank},
                        {"importance", f->importance},
                        {"sd", f->sd},
                        {"replicate_losses", f->replicate_losses}});
  return {{"loss", to_string(r.loss)},
          {"n_permutations", r.n_permutations},
          {"seed", r.seed},
          {"baseline_loss", r.baseline_loss},
          {"features", features}};
}

void write_curve_csv(std::ostream& out, const EffectCurve& c) {
  write_csv_row(out, {"feature", "kind", "grid", "value", "support"});
  for (std::size_t k = 0; k < c.grid.size(); ++k) {
    // ALE support counts intervals; the first grid point closes no interval.
    std::string support;
    if (c.kind == EffectKind::Pdp)
      support = std::to_string(c.support[k]);
    else
      support = k == 0 ? "0" : std::to_string(c.support[k - 1]);
    write_csv_row(out, {c.feature, to_string(c.kind), format_double(c.grid[k]), format_double(c.values[k]), support});
  }
}

void write_surface_csv(std::ostream& out, const EffectSurface& s) {
  write_csv_row(out, {"feature_a", "feature_b", "kind", "grid_a", "grid_b", "value"});
  for (std::size_t i = 0; i < s.grid_a.size(); ++i)
    for (std::size_t j = 0; j < s.grid_b.size(); ++j)
      write_csv_row(out, {s.feature_a, s.feature_b, to_string(s.kind), format_double(s.grid_a[i]),
                          format_double(s.grid_b[j]), format_double(s.values(i, j))});
}

void write_importance_csv(std::ostream& out, const ImportanceReport& r) {
  write_csv_row(out, {"feature", "rank", "importance", "sd", "replicate", "loss"});
  for (const auto* f : r.ranked())
    for (std::size_t k = 0; k < f->replicate_losses.size(); ++k)
      write_csv_row(out, {f->feature, std::to_string(f->rank), format_double(f->importance), format_double(f->sd),
                          std::to_string(k + 1), format_double(f->replicate_losses[k])});
}

}  // namespace featwarp
