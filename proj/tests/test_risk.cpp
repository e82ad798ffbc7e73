#include <catch2/catch_amalgamated.hpp>
#include <map>
#include <random>

#include "locsvm/risk.hpp"
#include "locsvm/solver.hpp"
#include "support.hpp"

using namespace locsvm;

namespace {

Regionalization line_regions(const std::vector<double>& centers, double overlap) {
  Regionalization reg;
  reg.method = RegionMethod::voronoi_overlap;
  reg.overlap = overlap;
  reg.bounds_lo = Eigen::VectorXd::Zero(1);
  reg.bounds_hi = Eigen::VectorXd::Ones(1);
  for (double c : centers) {
    Region r;
    r.center = Eigen::VectorXd::Constant(1, c);
    reg.regions.push_back(r);
  }
  return reg;
}

LocalModel zero_local() {
  LocalModel m;
  m.expansion = KernelExpansion(Kernel(), Eigen::MatrixXd(0, 1), Eigen::VectorXd(0));
  m.loss = Loss::pinball(0.5);
  m.lambda = 1.0;
  return m;
}

ComposedModel zero_composed(const std::vector<double>& centers, double overlap) {
  std::vector<LocalModel> locals;
  for (std::size_t i = 0; i < centers.size(); ++i) locals.push_back(zero_local());
  return ComposedModel(line_regions(centers, overlap), locals, WeightScheme{});
}

ComposedModel random_composed(std::mt19937_64& rng, int b, double overlap) {
  std::vector<double> centers;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int c = 0; c < b; ++c) centers.push_back(u(rng));
  std::vector<LocalModel> locals;
  for (int c = 0; c < b; ++c) {
    LocalModel m;
    m.expansion = KernelExpansion(Kernel(), test_support::random_points(rng, 4, 1, 0.0, 1.0),
                                  test_support::random_vector(rng, 4));
    m.loss = Loss::pinball(0.5);
    m.lambda = 1.0;
    locals.push_back(std::move(m));
  }
  return ComposedModel(line_regions(centers, overlap), locals, WeightScheme{});
}

}  // namespace

TEST_CASE("empirical risk basics") {
  std::mt19937_64 rng(1);
  const Dataset data = test_support::random_regression_data(rng, 40, 1);
  const Loss loss = Loss::pinball(0.5);

  SECTION("zero predictor has zero shifted risk") {
    CHECK(empirical_risk(zero_local(), data, loss, true) == 0.0);
    CHECK(empirical_risk(zero_composed({0.5}, 0.0), data, loss, true) == 0.0);
  }

  SECTION("an exact predictor has zero unshifted risk") {
    Eigen::MatrixXd xs(1, 1);
    xs << 0.4;
    Eigen::VectorXd ys(1);
    ys << -1.3;
    const Dataset one(xs, ys);
    LocalModel m = zero_local();
    Eigen::VectorXd coeff(1);
    coeff << -1.3;  // single point evaluates to its own coefficient
    m.expansion = KernelExpansion(Kernel(), xs, coeff);
    CHECK(empirical_risk(m, one, loss, false) == 0.0);
  }

  SECTION("shifted equals unshifted minus the loss at zero") {
    const LocalModel m = closed_form_ridge(data, Kernel(), 0.5);
    double at_zero = 0.0;
    for (Eigen::Index i = 0; i < data.y.size(); ++i)
      at_zero += loss_value(loss, data.y(i), 0.0) / static_cast<double>(data.size());
    CHECK(empirical_risk(m, data, loss, true) ==
          Catch::Approx(empirical_risk(m, data, loss, false) - at_zero)
              .margin(1e-12));
  }

  SECTION("empty data is rejected") {
    CHECK_THROWS_AS(empirical_risk(zero_local(), Dataset(), loss, true),
                    domain_error);
  }
}

TEST_CASE("regional risk") {
  std::mt19937_64 rng(2);
  const Dataset data = test_support::random_regression_data(rng, 60, 1);
  const Loss loss = Loss::pinball(0.5);

  SECTION("single region equals the global risk") {
    const ComposedModel model = zero_composed({0.5}, 0.0);
    const auto regional = regional_risk(model, data, loss, 0, false);
    REQUIRE(regional.has_value());
    CHECK(*regional == empirical_risk(model, data, loss, false));
  }

  SECTION("disjoint regions recombine to the global risk") {
    std::mt19937_64 rng2(3);
    const ComposedModel model = random_composed(rng2, 2, 0.0);
    double weighted = 0.0;
    std::size_t counted = 0;
    for (int b = 0; b < 2; ++b) {
      std::size_t nb = 0;
      for (std::size_t i = 0; i < data.size(); ++i) {
        const auto covering = membership(model.regionalization, data.x.row(i).transpose());
        nb += std::find(covering.begin(), covering.end(), b) != covering.end();
      }
      const auto r = regional_risk(model, data, loss, b, true);
      if (r) {
        weighted += static_cast<double>(nb) * *r;
        counted += nb;
      }
    }
    REQUIRE(counted == data.size());  // genuinely disjoint
    CHECK(weighted / static_cast<double>(data.size()) ==
          Catch::Approx(empirical_risk(model, data, loss, true)).margin(1e-12));
  }

  SECTION("empty restriction yields no value") {
    // Region 1's center is far away from every data point in [0,1].
    const ComposedModel model = zero_composed({0.5, 500.0}, 0.0);
    CHECK(!regional_risk(model, data, loss, 1, false).has_value());
    CHECK(regional_risk(model, data, loss, 0, false).has_value());
  }
}

TEST_CASE("cell decomposition recombines to the global risk") {
  std::mt19937_64 rng(4);
  const Dataset data = test_support::random_regression_data(rng, 200, 1);
  const Loss loss = Loss::pinball(0.5);
  const ComposedModel model = random_composed(rng, 3, 0.4);

  std::map<std::vector<int>, std::pair<double, std::size_t>> cells;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto cell = overlap_cell(model.regionalization, data.x.row(i).transpose());
    const double term = shifted_loss_value(
        loss, data.y(i), predict(model, data.x.row(i).transpose()));
    auto& [sum, count] = cells[cell];
    sum += term;
    count += 1;
  }
  double recombined = 0.0;
  std::size_t total = 0;
  for (const auto& [cell, agg] : cells) {
    recombined += (agg.first / static_cast<double>(agg.second)) *
                  static_cast<double>(agg.second);
    total += agg.second;
  }
  REQUIRE(total == data.size());
  CHECK(recombined / static_cast<double>(total) ==
        Catch::Approx(empirical_risk(model, data, loss, true)).margin(1e-12));
}

TEST_CASE("generator sampling") {
  SyntheticGenerator gen;
  gen.breakpoints = {0.3, 0.7};
  gen.levels = {0.5, -0.3, 0.8};
  gen.noise_scale = 0.1;
  gen.seed = 5;

  SECTION("median function is piecewise constant") {
    CHECK(gen.median_at(Eigen::VectorXd::Constant(1, 0.1)) == 0.5);
    CHECK(gen.median_at(Eigen::VectorXd::Constant(1, 0.3)) == -0.3);
    CHECK(gen.median_at(Eigen::VectorXd::Constant(1, 0.69)) == -0.3);
    CHECK(gen.median_at(Eigen::VectorXd::Constant(1, 0.9)) == 0.8);
  }

  SECTION("sampling is deterministic per (seed, stream)") {
    const Dataset a = gen.sample(50, 1);
    const Dataset b = gen.sample(50, 1);
    const Dataset c = gen.sample(50, 2);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    CHECK(a.x != c.x);
  }

  SECTION("classification labels and probabilities") {
    SyntheticGenerator cls;
    cls.kind = GeneratorKind::two_cluster_classification;
    cls.flip_prob = 0.15;
    cls.seed = 6;
    const Dataset d = cls.sample(200, 0);
    for (Eigen::Index i = 0; i < d.y.size(); ++i)
      REQUIRE((d.y(i) == 1.0 || d.y(i) == -1.0));
    CHECK(cls.positive_prob_at(Eigen::VectorXd::Constant(1, 2.0)) > 0.5);
    CHECK(cls.positive_prob_at(Eigen::VectorXd::Constant(1, -2.0)) < 0.5);
    CHECK(cls.bayes_predict(Loss::hinge(), Eigen::VectorXd::Constant(1, 1.0)) == 1.0);
    CHECK(cls.bayes_predict(Loss::hinge(), Eigen::VectorXd::Constant(1, -1.0)) == -1.0);
  }

  SECTION("generator validation") {
    SyntheticGenerator bad = gen;
    bad.levels = {1.0};
    CHECK_THROWS_AS(bad.validate(), config_error);
    bad = gen;
    bad.noise_scale = -1.0;
    CHECK_THROWS_AS(bad.validate(), config_error);
    SyntheticGenerator cls;
    cls.kind = GeneratorKind::two_cluster_classification;
    cls.flip_prob = 0.5;
    CHECK_THROWS_AS(cls.validate(), config_error);
  }
}

TEST_CASE("Bayes risk oracle") {
  SECTION("noiseless zero-median generator scores exactly zero") {
    SyntheticGenerator gen;
    gen.levels = {0.0};
    gen.noise_scale = 0.0;
    gen.seed = 7;
    const MeanStderr r = bayes_risk_oracle(gen, Loss::pinball(0.5), 10000, 1);
    CHECK(r.mean == 0.0);
    CHECK(r.stderr_ == 0.0);
  }

  SECTION("input validation") {
    SyntheticGenerator gen;
    CHECK_THROWS_AS(bayes_risk_oracle(gen, Loss::pinball(0.5), 100, 1), config_error);
    CHECK_THROWS_AS(bayes_risk_oracle(gen, Loss::least_squares(), 10000, 1),
                    config_error);
    CHECK_THROWS_AS(bayes_risk_oracle(gen, Loss::pinball(0.25), 10000, 1),
                    config_error);
    CHECK_THROWS_AS(bayes_risk_oracle(gen, Loss::hinge(), 10000, 1), config_error);
  }

  SECTION("standard error shrinks like the square root of the sample size") {
    SyntheticGenerator gen;
    gen.levels = {0.4};
    gen.noise_scale = 0.5;
    gen.seed = 8;
    const MeanStderr small = bayes_risk_oracle(gen, Loss::pinball(0.5), 20000, 2);
    const MeanStderr big = bayes_risk_oracle(gen, Loss::pinball(0.5), 80000, 2);
    CHECK(big.stderr_ < small.stderr_);
    CHECK(big.stderr_ == Catch::Approx(small.stderr_ / 2.0).epsilon(0.25));
    CHECK(std::abs(big.mean - small.mean) < 3.0 * (small.stderr_ + big.stderr_));
  }

  SECTION("cauchy noise still yields a finite shifted estimate") {
    SyntheticGenerator gen;
    gen.noise = NoiseKind::cauchy;
    gen.levels = {0.5};
    gen.breakpoints = {};
    gen.noise_scale = 1.0;
    gen.seed = 9;
    const MeanStderr r = bayes_risk_oracle(gen, Loss::pinball(0.5), 50000, 3);
    CHECK(std::isfinite(r.mean));
    CHECK(std::isfinite(r.stderr_));
  }
}

TEST_CASE("heavy-tail guard refuses unshifted risks") {
  SyntheticGenerator gen;
  gen.noise = NoiseKind::cauchy;
  const ComposedModel model = zero_composed({0.5}, 0.0);
  CHECK_THROWS_AS(mc_risk(model, gen, Loss::pinball(0.5), false, 10000, 1),
                  config_error);
  CHECK(std::isfinite(mc_risk(model, gen, Loss::pinball(0.5), true, 10000, 1).mean));

  SyntheticGenerator gauss;
  CHECK(std::isfinite(mc_risk(model, gauss, Loss::pinball(0.5), false, 10000, 1).mean));
}

TEST_CASE("excess risk") {
  SyntheticGenerator gen;
  gen.breakpoints = {0.5};
  gen.levels = {0.3, 0.6};
  gen.noise_scale = 0.2;
  gen.seed = 10;
  const Loss loss = Loss::pinball(0.5);

  SECTION("the Bayes predictor itself has zero excess") {
    const ExcessRisk ex = excess_risk_of(
        [&](const auto& x) { return gen.bayes_predict(loss, x); }, gen, loss,
        20000, 4);
    CHECK(ex.excess == 0.0);  // paired differences vanish term by term
    CHECK(ex.stderr_ == 0.0);
  }

  SECTION("the zero model on a nonzero noiseless median is strictly worse") {
    SyntheticGenerator clean = gen;
    clean.noise_scale = 0.0;
    const ExcessRisk ex =
        excess_risk(zero_composed({0.5}, 0.0), clean, loss, 20000, 5);
    CHECK(ex.excess > 0.1);
    CHECK(ex.model_risk == Catch::Approx(0.0).margin(1e-12));  // shifted risk of 0
    CHECK(ex.bayes_risk < 0.0);
  }

  SECTION("excess equals model risk minus Bayes risk") {
    std::mt19937_64 rng(11);
    const ComposedModel model = random_composed(rng, 2, 0.2);
    const ExcessRisk ex = excess_risk(model, gen, loss, 20000, 6);
    CHECK(ex.excess ==
          Catch::Approx(ex.model_risk - ex.bayes_risk).margin(1e-12));
  }
}

TEST_CASE("shifted risk of a composition is controlled by the local values") {
  // |R_Ls(f)| <= |L|_1 * mean over the sample of the summed local magnitudes
  // over covering regions.
  std::mt19937_64 rng(12);
  const Dataset data = test_support::random_regression_data(rng, 150, 1);
  for (int round = 0; round < 10; ++round) {
    const ComposedModel model = random_composed(rng, 3, 0.3);
    for (const Loss& loss : {Loss::pinball(0.3), Loss::eps_insensitive(0.1)}) {
      const double risk = empirical_risk(model, data, loss, true);
      double bound = 0.0;
      for (std::size_t i = 0; i < data.size(); ++i) {
        const auto x = data.x.row(i).transpose();
        double local_sum = 0.0;
        for (int b : membership(model.regionalization, x))
          local_sum += std::abs(expansion_eval(model.locals[b].expansion, x));
        bound += local_sum;
      }
      bound *= lipschitz_constant(loss) / static_cast<double>(data.size());
      REQUIRE(std::abs(risk) <= bound + 1e-12);
    }
  }
}
