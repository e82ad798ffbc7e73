#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "locsvm/loss.hpp"

using namespace locsvm;

TEST_CASE("loss values match the textbook formulas") {
  CHECK(loss_value(Loss::hinge(), 1.0, 0.5) == 0.5);
  CHECK(loss_value(Loss::hinge(), 1.0, 2.0) == 0.0);
  CHECK(loss_value(Loss::pinball(0.5), 2.0, 1.0) == 0.5);
  CHECK(loss_value(Loss::least_squares(), 3.0, 1.0) == 4.0);
  CHECK(loss_value(Loss::eps_insensitive(0.1), 1.0, 1.05) == 0.0);
  CHECK(loss_value(Loss::eps_insensitive(0.1), 1.0, 1.3) ==
        Catch::Approx(0.2).margin(1e-15));
}

TEST_CASE("loss vanishes on exact predictions") {
  for (double y : {-3.0, -0.5, 0.0, 1.7}) {
    CHECK(loss_value(Loss::pinball(0.3), y, y) == 0.0);
    CHECK(loss_value(Loss::eps_insensitive(0.2), y, y) == 0.0);
    CHECK(loss_value(Loss::least_squares(), y, y) == 0.0);
  }
  CHECK(loss_value(Loss::hinge(), 1.0, 1.0) == 0.0);
  CHECK(loss_value(Loss::hinge(), -1.0, -1.0) == 0.0);
}

TEST_CASE("shifted loss values") {
  CHECK(shifted_loss_value(Loss::least_squares(), 3.0, 1.0) == -5.0);
  CHECK(shifted_loss_value(Loss::hinge(), 1.0, 2.0) == -1.0);
  for (double y : {-2.0, 0.0, 0.7, 5.0}) {
    CHECK(shifted_loss_value(Loss::pinball(0.4), y, 0.0) == 0.0);
    CHECK(shifted_loss_value(Loss::least_squares(), y, 0.0) == 0.0);
    CHECK(shifted_loss_value(Loss::eps_insensitive(0.1), y, 0.0) == 0.0);
  }
  CHECK(shifted_loss_value(Loss::hinge(), 1.0, 0.0) == 0.0);
}

TEST_CASE("Lipschitz constants") {
  CHECK(lipschitz_constant(Loss::hinge()) == 1.0);
  CHECK(lipschitz_constant(Loss::pinball(0.3)) == 0.7);
  CHECK(lipschitz_constant(Loss::pinball(0.5)) == 0.5);
  CHECK(lipschitz_constant(Loss::eps_insensitive(0.1)) == 1.0);
  CHECK_THROWS_AS(lipschitz_constant(Loss::least_squares()), unsupported_error);
}

TEST_CASE("subgradient examples and kink choices") {
  CHECK(subgradient_t(Loss::hinge(), 1.0, 0.5) == -1.0);
  CHECK(subgradient_t(Loss::hinge(), 1.0, 1.0) == 0.0);  // kink
  CHECK(subgradient_t(Loss::pinball(0.5), 0.0, 1.0) == 0.5);
  CHECK(subgradient_t(Loss::pinball(0.5), 1.0, 1.0) == 0.0);  // kink
  CHECK(subgradient_t(Loss::least_squares(), 3.0, 1.0) == -4.0);
  CHECK(subgradient_t(Loss::eps_insensitive(0.5), 0.0, 0.5) == 0.0);  // kink
}

TEST_CASE("parameter and label validation") {
  CHECK_THROWS_AS(Loss::pinball(0.0), config_error);
  CHECK_THROWS_AS(Loss::pinball(1.0), config_error);
  CHECK_THROWS_AS(Loss::pinball(-0.2), config_error);
  CHECK_THROWS_AS(Loss::eps_insensitive(-0.1), config_error);
  CHECK_THROWS_AS(loss_value(Loss::hinge(), 0.5, 1.0), domain_error);
  CHECK_THROWS_AS(subgradient_t(Loss::hinge(), 2.0, 1.0), domain_error);
}

namespace {

std::vector<Loss> all_losses() {
  return {Loss::hinge(), Loss::pinball(0.25), Loss::pinball(0.5),
          Loss::pinball(0.8), Loss::eps_insensitive(0.0),
          Loss::eps_insensitive(0.3), Loss::least_squares()};
}

double draw_label(const Loss& loss, std::mt19937_64& rng) {
  if (loss.kind == LossKind::hinge)
    return (rng() & 1) ? 1.0 : -1.0;
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  return u(rng);
}

}  // namespace

TEST_CASE("Lipschitz property on random pairs") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (const Loss& loss : all_losses()) {
    if (!loss.globally_lipschitz()) continue;
    const double lip = lipschitz_constant(loss);
    for (int i = 0; i < 10000; ++i) {
      const double y = draw_label(loss, rng);
      const double t = u(rng);
      const double s = u(rng);
      const double lhs = std::abs(loss_value(loss, y, t) - loss_value(loss, y, s));
      REQUIRE(lhs <= lip * std::abs(t - s) + 1e-12);
    }
  }
}

TEST_CASE("shifted loss identity is exact") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (const Loss& loss : all_losses()) {
    for (int i = 0; i < 10000; ++i) {
      const double y = draw_label(loss, rng);
      const double t = u(rng);
      REQUIRE(shifted_loss_value(loss, y, t) ==
              loss_value(loss, y, t) - loss_value(loss, y, 0.0));
    }
  }
}

TEST_CASE("midpoint convexity on random triples") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (const Loss& loss : all_losses()) {
    for (int i = 0; i < 10000; ++i) {
      const double y = draw_label(loss, rng);
      const double t = u(rng);
      const double s = u(rng);
      const double mid = loss_value(loss, y, 0.5 * (t + s));
      const double avg = 0.5 * (loss_value(loss, y, t) + loss_value(loss, y, s));
      REQUIRE(mid <= avg + 1e-12);
    }
  }
}

TEST_CASE("subgradient inequality on random pairs") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (const Loss& loss : all_losses()) {
    for (int i = 0; i < 10000; ++i) {
      const double y = draw_label(loss, rng);
      const double t = u(rng);
      const double s = u(rng);
      const double g = subgradient_t(loss, y, t);
      REQUIRE(loss_value(loss, y, s) >=
              loss_value(loss, y, t) + g * (s - t) - 1e-12);
    }
  }
}

TEST_CASE("shifted loss keeps the Lipschitz constant") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (const Loss& loss : all_losses()) {
    if (!loss.globally_lipschitz()) continue;
    const double lip = lipschitz_constant(loss);
    for (int i = 0; i < 2000; ++i) {
      const double y = draw_label(loss, rng);
      const double t = u(rng);
      const double s = u(rng);
      const double lhs =
          std::abs(shifted_loss_value(loss, y, t) - shifted_loss_value(loss, y, s));
      REQUIRE(lhs <= lip * std::abs(t - s) + 1e-12);
    }
  }
}
