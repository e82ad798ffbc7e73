#ifndef LOCSVM_COMPOSER_HPP
#define LOCSVM_COMPOSER_HPP

#include <Eigen/Core>
#include <string>
#include <vector>

#include "locsvm/errors.hpp"
#include "locsvm/regionalization.hpp"
#include "locsvm/solver.hpp"

namespace locsvm {

enum class WeightKind { indicator_average, theta_weighted };

inline std::string to_string(WeightKind k) {
  return k == WeightKind::indicator_average ? "indicator_average" : "theta_weighted";
}

inline WeightKind weight_kind_from_string(const std::string& s) {
  if (s == "indicator_average") return WeightKind::indicator_average;
  if (s == "theta_weighted") return WeightKind::theta_weighted;
  throw config_error("unknown weight scheme '" + s + "'");
}

/// Pointwise weighting of the local predictors. indicator_average averages
/// the covering regions' predictors; theta_weighted renormalizes fixed
/// positive per-region weights over the covering regions, so the weights
/// sum to one at every point regardless of the overlap pattern.
struct WeightScheme {
  WeightKind kind = WeightKind::indicator_average;
  std::vector<double> thetas;  // theta_weighted only, one positive value per region

  void validate(std::size_t region_count) const {
    if (kind == WeightKind::indicator_average) return;
    if (thetas.size() != region_count)
      throw config_error("weights: expected " + std::to_string(region_count) +
                         " thetas, got " + std::to_string(thetas.size()));
    for (double t : thetas)
      if (!(t > 0.0)) throw config_error("weights: thetas must be > 0");
  }
};

/// Regionalization, one local SVM per region, and a weight scheme; predicts
/// f(x) = sum_b w_b(x) f_b(x). The composition need not lie in any single
/// RKHS, so no RKHS norm is defined here; only pointwise evaluation and
/// risk functionals apply.
struct ComposedModel {
  Regionalization regionalization;
  std::vector<LocalModel> locals;
  WeightScheme scheme;

  ComposedModel() = default;
  ComposedModel(Regionalization reg, std::vector<LocalModel> loc, WeightScheme sch)
      : regionalization(std::move(reg)), locals(std::move(loc)), scheme(std::move(sch)) {
    if (locals.size() != regionalization.region_count())
      throw config_error("composed model: " +
                         std::to_string(regionalization.region_count()) +
                         " regions but " + std::to_string(locals.size()) +
                         " local models");
    scheme.validate(locals.size());
  }

  std::size_t region_count() const { return regionalization.region_count(); }
};

/// Weight vector (w_1(x), ..., w_B(x)): entries vanish exactly outside
/// membership(x) and the covering entries renormalize to sum 1.
inline std::vector<double> weights_at(const ComposedModel& model,
                                      const Eigen::Ref<const Eigen::VectorXd>& x) {
  const std::vector<int> covering = membership(model.regionalization, x);
  std::vector<double> w(model.region_count(), 0.0);
  if (model.scheme.kind == WeightKind::indicator_average) {
    const double share = 1.0 / static_cast<double>(covering.size());
    for (int b : covering) w[b] = share;
  } else {
    double denom = 0.0;
    for (int b : covering) denom += model.scheme.thetas[b];
    for (int b : covering) w[b] = model.scheme.thetas[b] / denom;
  }
  return w;
}

/// f(x) = sum over covering regions of w_b(x) * f_b(x). At a point covered
/// by a single region this is exactly the local model's value.
inline double predict(const ComposedModel& model,
                      const Eigen::Ref<const Eigen::VectorXd>& x) {
  const std::vector<int> covering = membership(model.regionalization, x);
  if (covering.size() == 1)
    return expansion_eval(model.locals[covering[0]].expansion, x);
  double denom = 0.0;
  double acc = 0.0;
  const bool averaged = model.scheme.kind == WeightKind::indicator_average;
  for (int b : covering) denom += averaged ? 1.0 : model.scheme.thetas[b];
  for (int b : covering) {
    const double wb = (averaged ? 1.0 : model.scheme.thetas[b]) / denom;
    acc += wb * expansion_eval(model.locals[b].expansion, x);
  }
  return acc;
}

/// Elementwise predict, order preserving; a dimension mismatch aborts the
/// batch naming the offending row.
inline std::vector<double> predict_batch(const ComposedModel& model,
                                         const Eigen::MatrixXd& xs) {
  std::vector<double> out;
  out.reserve(xs.rows());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    try {
      out.push_back(predict(model, xs.row(i).transpose()));
    } catch (const domain_error& e) {
      throw domain_error("predict_batch: row " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace locsvm

#endif  // LOCSVM_COMPOSER_HPP
