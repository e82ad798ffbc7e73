#ifndef LOCSVM_TESTS_SUPPORT_HPP
#define LOCSVM_TESTS_SUPPORT_HPP

// Shared helpers and independent oracles for the test suites. Oracles are
// deliberately written as plain re-derivations (double loops, exhaustive
// grids) so they share no code path with the implementation they check.

#include <Eigen/Core>
#include <random>
#include <vector>

#include "locsvm/dataset.hpp"
#include "locsvm/kernel.hpp"
#include "locsvm/loss.hpp"

namespace test_support {

inline Eigen::MatrixXd random_points(std::mt19937_64& rng, int n, int d,
                                     double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = u(rng);
  return x;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, int n, double lo = -1.0,
                                     double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

inline locsvm::Dataset random_regression_data(std::mt19937_64& rng, int n, int d,
                                              double y_scale = 1.0) {
  Eigen::MatrixXd x = random_points(rng, n, d, 0.0, 1.0);
  Eigen::VectorXd y(n);
  std::normal_distribution<double> noise(0.0, 0.3);
  for (int i = 0; i < n; ++i)
    y(i) = y_scale * std::sin(3.0 * x(i, 0)) + noise(rng);
  return locsvm::Dataset(std::move(x), std::move(y));
}

/// Quadratic form alpha^T G alpha recomputed by an explicit double loop.
inline double norm_sq_double_loop(const locsvm::KernelExpansion& f) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < f.points.rows(); ++i)
    for (Eigen::Index j = 0; j < f.points.rows(); ++j)
      acc += f.coefficients(i) * f.coefficients(j) *
             locsvm::kernel_eval(f.kernel, f.points.row(i).transpose(),
                                 f.points.row(j).transpose());
  return acc;
}

/// Exhaustive search over expansion coefficients in [-2,2]^n with step 0.01
/// for the regularized objective; the continuous minimizer's objective can
/// be at most this value. Only sensible for n <= 3.
inline double grid_search_objective(const locsvm::Dataset& sub,
                                    const locsvm::Loss& loss,
                                    const locsvm::Kernel& kernel, double lambda) {
  const int n = static_cast<int>(sub.size());
  const Eigen::MatrixXd g = locsvm::gram_matrix(kernel, sub.x);
  const double step = 0.01;
  const int ticks = 401;  // [-2, 2]
  const auto coord = [&](int t) { return -2.0 + step * t; };

  double best = std::numeric_limits<double>::infinity();
  if (n == 1) {
    for (int t0 = 0; t0 < ticks; ++t0) {
      const double a0 = coord(t0);
      const double pred = a0 * g(0, 0);
      const double obj =
          sub.w(0) * locsvm::loss_value(loss, sub.y(0), pred) + lambda * a0 * a0 * g(0, 0);
      best = std::min(best, obj);
    }
    return best;
  }
  if (n == 2) {
    for (int t0 = 0; t0 < ticks; ++t0)
      for (int t1 = 0; t1 < ticks; ++t1) {
        const double a0 = coord(t0);
        const double a1 = coord(t1);
        double obj = lambda * (a0 * a0 * g(0, 0) + 2 * a0 * a1 * g(0, 1) +
                               a1 * a1 * g(1, 1));
        for (int i = 0; i < 2; ++i) {
          const double pred = a0 * g(i, 0) + a1 * g(i, 1);
          obj += sub.w(i) * locsvm::loss_value(loss, sub.y(i), pred);
        }
        best = std::min(best, obj);
      }
    return best;
  }

  for (int t0 = 0; t0 < ticks; ++t0) {
    const double a0 = coord(t0);
    for (int t1 = 0; t1 < ticks; ++t1) {
      const double a1 = coord(t1);
      // Partial predictions and norm pieces; the innermost loop only adds
      // the a2 contributions.
      double base_pred[3];
      for (int i = 0; i < 3; ++i) base_pred[i] = a0 * g(i, 0) + a1 * g(i, 1);
      const double norm01 = a0 * a0 * g(0, 0) + 2 * a0 * a1 * g(0, 1) +
                            a1 * a1 * g(1, 1);
      const double cross = 2 * (a0 * g(0, 2) + a1 * g(1, 2));
      for (int t2 = 0; t2 < ticks; ++t2) {
        const double a2 = coord(t2);
        double obj = lambda * (norm01 + cross * a2 + a2 * a2 * g(2, 2));
        for (int i = 0; i < 3; ++i) {
          const double pred = base_pred[i] + a2 * g(i, 2);
          obj += sub.w(i) * locsvm::loss_value(loss, sub.y(i), pred);
        }
        best = std::min(best, obj);
      }
    }
  }
  return best;
}

}  // namespace test_support

#endif  // LOCSVM_TESTS_SUPPORT_HPP
