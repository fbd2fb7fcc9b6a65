#include <doctest.h>

#include <algorithm>
#include <random>

#include "featwarp/diagnostics.h"
#include "featwarp/error.h"
#include "featwarp/models.h"
#include "helpers.h"

using namespace featwarp;

namespace {

double f_x1(std::span<const double> x) { return x[0]; }

}  // namespace

TEST_SUITE("importance") {
  TEST_CASE("losses") {
    const std::vector<double> y{1, 0, 1, 0};
    CHECK(evaluate_loss(Loss::Mse, y, std::vector<double>{1, 0, 0, 0}) == 0.25);
    CHECK(evaluate_loss(Loss::ErrorRate, y, std::vector<double>{0.5, 0.49, 0.2, 0.9}) == 0.5);
    const double ll = evaluate_loss(Loss::LogLoss, y, std::vector<double>{1, 0, 0.5, 0.5});
    CHECK(std::abs(ll - (-std::log(1 - 1e-6) * 2 + std::log(2.0) * 2) / 4) < 1e-12);
    // Clamped: a confident miss costs -log(1e-6), not infinity.
    CHECK(std::abs(evaluate_loss(Loss::LogLoss, std::vector<double>{1}, std::vector<double>{0}) + std::log(1e-6)) <
          1e-12);
  }

  TEST_CASE("unknown loss lists the valid names") {
    try {
      parse_loss("hinge");
      FAIL("expected UnknownLoss");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnknownLoss);
      const std::string msg = e.what();
      for (const char* name : {"mse", "log-loss", "error-rate"}) CHECK(msg.find(name) != std::string::npos);
    }
    CHECK(parse_loss("error-rate") == Loss::ErrorRate);
  }

  TEST_CASE("f = x1 under mse: importance near 2 Var(x1)") {
    const auto x = testing::gaussian_frame(2000, 2, 8);
    const testing::FunctionModel model(x.names(), f_x1);
    const auto y = x.column("x1");
    ImportanceOptions opts;
    opts.loss = Loss::Mse;
    opts.n_permutations = 20;
    opts.seed = 3;
    const auto rep = permutation_importance(model, x, y, opts);
    CHECK(rep.baseline_loss == 0.0);
    // Oracle: average of (x - x')^2 over independent std::shuffle permutations.
    std::mt19937_64 eng(12345);
    double oracle = 0;
    for (int r = 0; r < 20; ++r) {
      auto perm = y;
      std::shuffle(perm.begin(), perm.end(), eng);
      double s = 0;
      for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - perm[i]) * (y[i] - perm[i]);
      oracle += s / static_cast<double>(y.size()) / 20.0;
    }
    const double var = testing::oracle_variance(y);
    CHECK(std::abs(oracle - 2 * var) < 0.2);
    CHECK(std::abs(rep.at("x1").importance - 2.0) < 0.2);
    CHECK(std::abs(rep.at("x1").importance - oracle) < 0.2);
    // x2 is ignored by the model: every replicate reproduces the baseline.
    CHECK(rep.at("x2").importance == 0.0);
    CHECK(std::abs(rep.at("x2").importance) <= 3 * rep.at("x2").sd);
    CHECK(rep.at("x1").rank == 1);
    CHECK(rep.at("x2").rank == 2);
  }

  TEST_CASE("report structure, seeds and worker independence") {
    const auto x = testing::correlated_frame(150, 5, 2);
    const LinearModel model(x.names(), 0.0, {1, -1, 0.5, 0, 2});
    std::vector<double> y = model.predict(x);
    for (std::size_t r = 0; r < y.size(); ++r) y[r] += 0.1 * std::sin(static_cast<double>(r));
    ImportanceOptions opts;
    opts.loss = Loss::Mse;
    opts.n_permutations = 4;
    opts.seed = 99;
    const auto a = permutation_importance(model, x, y, opts);
    CHECK(a.features.size() == 5);
    std::vector<std::size_t> ranks;
    for (const auto& f : a.features) {
      CHECK(f.replicate_losses.size() == 4);
      ranks.push_back(f.rank);
    }
    std::sort(ranks.begin(), ranks.end());
    CHECK(ranks == std::vector<std::size_t>{1, 2, 3, 4, 5});
    const auto ranked = a.ranked();
    for (std::size_t k = 1; k < ranked.size(); ++k) CHECK(ranked[k - 1]->importance >= ranked[k]->importance);

    for (std::size_t workers : {2u, 3u, 8u}) {
      opts.workers = workers;
      const auto b = permutation_importance(model, x, y, opts);
      for (std::size_t j = 0; j < 5; ++j) {
        CHECK(b.features[j].replicate_losses == a.features[j].replicate_losses);
        CHECK(b.features[j].rank == a.features[j].rank);
      }
    }
    opts.workers = 1;
    opts.features = {"x4", "x2"};
    const auto sub = permutation_importance(model, x, y, opts);
    REQUIRE(sub.features.size() == 2);
    CHECK(sub.features[0].feature == "x2");
    CHECK(sub.features[0].replicate_losses == a.at("x2").replicate_losses);
    CHECK(sub.features[1].replicate_losses == a.at("x4").replicate_losses);

    opts.features = {};
    opts.seed = 100;
    CHECK(permutation_importance(model, x, y, opts).at("x1").replicate_losses != a.at("x1").replicate_losses);
  }

  TEST_CASE("scale equivariance") {
    const auto x = testing::correlated_frame(200, 3, 5);
    const std::vector<double> a{1.0, -2.0, 0.5};
    const LinearModel model(x.names(), 0.2, a);
    std::vector<double> y = model.predict(x);
    for (std::size_t r = 0; r < y.size(); ++r) y[r] += std::cos(static_cast<double>(r));
    const std::vector<double> scale{10.0, 0.01, -3.0}, shift{5.0, -1.0, 100.0};
    Matrix m = x.values();
    double intercept = 0.2;
    std::vector<double> a2(3);
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t r = 0; r < m.rows(); ++r) m(r, j) = m(r, j) * scale[j] + shift[j];
      a2[j] = a[j] / scale[j];
      intercept -= a2[j] * shift[j];
    }
    const LinearModel rescaled(x.names(), intercept, a2);
    ImportanceOptions opts;
    opts.loss = Loss::Mse;
    opts.n_permutations = 5;
    const auto r1 = permutation_importance(model, x, y, opts);
    const auto r2 = permutation_importance(rescaled, x.with_values(m), y, opts);
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(std::abs(r1.features[j].importance - r2.features[j].importance) < 1e-9);
      CHECK(r1.features[j].rank == r2.features[j].rank);
    }
  }

  TEST_CASE("errors") {
    const auto x = testing::gaussian_frame(10, 2, 1);
    const testing::FunctionModel model(x.names(), f_x1);
    const auto y = x.column("x1");
    ImportanceOptions opts;
    opts.n_permutations = 0;
    CHECK_THROWS_AS(permutation_importance(model, x, y, opts), Error);
    opts.n_permutations = 2;
    CHECK_THROWS_AS(permutation_importance(model, x, std::vector<double>{1, 2}, opts), Error);
    opts.features = {"nope"};
    CHECK_THROWS_AS(permutation_importance(model, x, y, opts), Error);
  }
}
