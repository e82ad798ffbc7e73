#ifndef LOCSVM_SOLVER_HPP
#define LOCSVM_SOLVER_HPP

#include <Eigen/Core>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "locsvm/dataset.hpp"
#include "locsvm/errors.hpp"
#include "locsvm/kernel.hpp"
#include "locsvm/loss.hpp"

namespace locsvm {

struct SolverConfig {
  // For Lipschitz losses max_iters/window count component subgradient steps
  // (one epoch = one pass over the subsample); for least squares they count
  // full gradient iterations.
  int max_iters = 50000;
  double tol = 1e-10;  // relative best-objective improvement per window
  int window = 500;
  std::uint64_t seed = 0;  // reserved; both solver paths are deterministic

  void validate() const {
    if (!(tol > 0.0)) throw config_error("solver: tol must be > 0");
    if (window < 1) throw config_error("solver: window must be >= 1");
    if (max_iters < window)
      throw config_error("solver: max_iters must be >= window");
  }
};

/// One regional SVM in representer form: a kernel expansion over the
/// training subsample plus its regularization parameter and loss.
struct LocalModel {
  KernelExpansion expansion;
  double lambda = 1.0;
  Loss loss;
  double objective_value = 0.0;          // with L
  double objective_value_shifted = 0.0;  // with L*, differs by sum_i w_i L(y_i, 0)
  int region_index = -1;
  bool empty_region = false;  // trained on a null regional measure
};

namespace detail {

inline void check_training_inputs(const Dataset& sub, const Loss& loss,
                                  double lambda) {
  if (!(lambda > 0.0))
    throw config_error("train: lambda must be > 0, got " + std::to_string(lambda));
  if (sub.empty()) return;
  for (Eigen::Index i = 0; i < sub.w.size(); ++i)
    if (!(sub.w(i) >= 0.0))
      throw config_error("train: sample weights must be nonnegative");
  if (std::abs(sub.w.sum() - 1.0) > 1e-8)
    throw config_error("train: sample weights must sum to 1, got " +
                       std::to_string(sub.w.sum()));
  if (loss.kind == LossKind::hinge)
    for (Eigen::Index i = 0; i < sub.y.size(); ++i) check_hinge_label(sub.y(i));
}

inline LocalModel zero_model(const Dataset& sub, const Loss& loss,
                             const Kernel& kernel, double lambda) {
  LocalModel m;
  m.expansion = KernelExpansion(kernel, Eigen::MatrixXd(0, sub.x.cols()),
                                Eigen::VectorXd(0));
  m.lambda = lambda;
  m.loss = loss;
  m.empty_region = true;
  return m;
}

}  // namespace detail

/// Regularized empirical risk of a model on a weighted subsample:
/// sum_i w_i L(y_i, f(x_i)) + lambda ||f||_H^2, or the shifted variant with
/// L* in place of L. The two differ exactly by sum_i w_i L(y_i, 0).
inline double objective(const LocalModel& model, const Dataset& sub, bool shifted) {
  double loss_term = 0.0;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(sub.size()); ++i) {
    const double t = expansion_eval(model.expansion, sub.x.row(i).transpose());
    const double v = shifted ? shifted_loss_value(model.loss, sub.y(i), t)
                             : loss_value(model.loss, sub.y(i), t);
    loss_term += sub.w(i) * v;
  }
  const double norm = rkhs_norm(model.expansion);
  return loss_term + model.lambda * norm * norm;
}

/// Trains one regional SVM by minimizing
///   F(f) = sum_i w_i L(y_i, f(x_i)) + lambda ||f||_H^2
/// over kernel expansions on the subsample points.
///
/// Globally Lipschitz losses use projected subgradient descent in the RKHS
/// with step eta_t = 1/(lambda*t). The subgradient steps are incremental:
/// one deterministic cyclic pass over the sample per epoch, each component
/// step using the regularizer plus the reweighted single-observation loss,
/// so a step costs O(n) against the cached Gram matrix instead of O(n^2).
/// Iterates are projected onto the ball of radius |L|_1 ||k||_inf /
/// (2 lambda) that contains the minimizer; epoch iterates are averaged over
/// the final half (anchored at doublings) and the best iterate by exact
/// objective is tracked and returned. max_iters counts component steps.
///
/// The smooth least-squares loss instead uses constant-step full gradient
/// descent, which converges linearly on this strongly convex objective.
///
/// Both paths are deterministic functions of their inputs; the config seed
/// is reserved and does not influence the result. Minimizing with L and
/// with L* yields the same minimizer (they differ by the constant
/// sum_i w_i L(y_i, 0)); the solver works with L and reports both
/// objective values.
inline LocalModel train_local(const Dataset& sub, const Loss& loss,
                              const Kernel& kernel, double lambda,
                              const SolverConfig& cfg) {
  cfg.validate();
  detail::check_training_inputs(sub, loss, lambda);
  if (sub.empty()) return detail::zero_model(sub, loss, kernel, lambda);

  const Eigen::Index n = static_cast<Eigen::Index>(sub.size());
  const Eigen::MatrixXd g = gram_matrix(kernel, sub.x);
  const Eigen::VectorXd& y = sub.y;
  const Eigen::VectorXd& w = sub.w;

  const auto loss_term = [&](const Eigen::VectorXd& f) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) acc += w(i) * loss_value(loss, y(i), f(i));
    return acc;
  };

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  double best_obj = loss_term(f);
  Eigen::VectorXd best_alpha = alpha;
  double window_ref = best_obj;

  const auto consider = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& fa) {
    const double obj = loss_term(fa) + lambda * std::max(0.0, a.dot(fa));
    if (obj < best_obj) {
      best_obj = obj;
      best_alpha = a;
    }
  };

  if (loss.kind == LossKind::least_squares) {
    const double step = 1.0 / (1.0 + 2.0 * lambda);
    Eigen::VectorXd grad(n);
    for (int t = 1; t <= cfg.max_iters; ++t) {
      grad = -2.0 * (w.array() * (y - f).array()).matrix() + 2.0 * lambda * alpha;
      alpha -= step * grad;
      f.noalias() = g * alpha;
      consider(alpha, f);
      if (t % cfg.window == 0) {
        if (window_ref - best_obj <= cfg.tol * std::max(1.0, std::abs(best_obj)))
          break;
        window_ref = best_obj;
      }
    }
  } else {
    const double radius = lipschitz_constant(loss) * sup_norm_bound(kernel) /
                          (2.0 * lambda);
    const double radius_sq = radius * radius;
    const double nd = static_cast<double>(n);
    const long max_epochs = std::max<long>(1, (cfg.max_iters + n - 1) / n);
    const long window_epochs = std::max<long>(1, cfg.window / n);

    Eigen::VectorXd avg_sum = Eigen::VectorXd::Zero(n);
    long avg_count = 0;
    long anchor = 1;
    const auto consider_average = [&]() {
      if (avg_count == 0) return;
      const Eigen::VectorXd a = avg_sum / static_cast<double>(avg_count);
      const Eigen::VectorXd fa = g * a;
      consider(a, fa);
    };

    double norm_sq = 0.0;
    long t = 0;
    for (long epoch = 1; epoch <= max_epochs; ++epoch) {
      for (Eigen::Index i = 0; i < n; ++i) {
        ++t;
        const double eta = 1.0 / (lambda * static_cast<double>(t));
        const double shrink = 1.0 - 2.0 * lambda * eta;  // = 1 - 2/t
        alpha *= shrink;
        f *= shrink;
        norm_sq *= shrink * shrink;

        const double gi = w(i) * subgradient_t(loss, y(i), f(i));
        if (gi != 0.0) {
          const double delta = -eta * nd * gi;
          norm_sq += 2.0 * delta * f(i) + delta * delta;  // unit Gram diagonal
          alpha(i) += delta;
          f += delta * g.col(i);
        }
        if (norm_sq > radius_sq) {
          const double scale = radius / std::sqrt(norm_sq);
          alpha *= scale;
          f *= scale;
          norm_sq = radius_sq;
        }
      }
      // Epoch end: refresh the cached products to shed incremental rounding,
      // then track best and averaged iterates.
      f.noalias() = g * alpha;
      norm_sq = std::max(0.0, alpha.dot(f));
      consider(alpha, f);
      if (epoch == 2 * anchor) {  // restart the running average at each doubling
        consider_average();
        avg_sum.setZero();
        avg_count = 0;
        anchor = epoch;
      }
      avg_sum += alpha;
      ++avg_count;

      if (epoch % window_epochs == 0) {
        if (window_ref - best_obj <= cfg.tol * std::max(1.0, std::abs(best_obj)))
          break;
        window_ref = best_obj;
      }
    }
    consider_average();
  }

  LocalModel m;
  m.expansion = KernelExpansion(kernel, sub.x, best_alpha);
  m.lambda = lambda;
  m.loss = loss;
  m.objective_value = best_obj;
  double shift = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) shift += w(i) * loss_value(loss, y(i), 0.0);
  m.objective_value_shifted = best_obj - shift;
  return m;
}

/// Exact minimizer for the least-squares loss: the coefficients solve
/// (W G + lambda I) alpha = W y with W = diag(w). Serves as the independent
/// oracle for the iterative solver.
inline LocalModel closed_form_ridge(const Dataset& sub, const Kernel& kernel,
                                    double lambda) {
  if (!(lambda > 0.0))
    throw config_error("closed_form_ridge: lambda must be > 0");
  if (sub.empty()) throw domain_error("closed_form_ridge: empty subsample");
  detail::check_training_inputs(sub, Loss::least_squares(), lambda);

  const Eigen::Index n = static_cast<Eigen::Index>(sub.size());
  const Eigen::MatrixXd g = gram_matrix(kernel, sub.x);
  const Eigen::VectorXd rhs = sub.w.cwiseProduct(sub.y);
  Eigen::MatrixXd a = sub.w.asDiagonal() * g;
  a.diagonal().array() += lambda;

  Eigen::VectorXd alpha = a.partialPivLu().solve(rhs);
  const double scale = std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
  if (!alpha.allFinite() || (a * alpha - rhs).lpNorm<Eigen::Infinity>() > 1e-8 * scale) {
    a.diagonal().array() += 1e-12;
    alpha = a.partialPivLu().solve(rhs);
    if (!alpha.allFinite() ||
        (a * alpha - rhs).lpNorm<Eigen::Infinity>() > 1e-6 * scale)
      throw numerical_error("closed_form_ridge: linear system is singular");
  }

  LocalModel m;
  m.expansion = KernelExpansion(kernel, sub.x, alpha);
  m.lambda = lambda;
  m.loss = Loss::least_squares();
  m.objective_value = objective(m, sub, /*shifted=*/false);
  double shift = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    shift += sub.w(i) * loss_value(m.loss, sub.y(i), 0.0);
  m.objective_value_shifted = m.objective_value - shift;
  return m;
}

}  // namespace locsvm

#endif  // LOCSVM_SOLVER_HPP
