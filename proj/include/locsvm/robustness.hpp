#ifndef LOCSVM_ROBUSTNESS_HPP
#define LOCSVM_ROBUSTNESS_HPP

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "locsvm/composer.hpp"
#include "locsvm/dataset.hpp"
#include "locsvm/errors.hpp"
#include "locsvm/kernel.hpp"
#include "locsvm/loss.hpp"
#include "locsvm/numeric.hpp"
#include "locsvm/regionalization.hpp"

namespace locsvm {

/// Per-region contamination levels eps_b < 1/2 together with the contaminant
/// measures: each contaminant is a weighted dataset supported on its region,
/// and region b's training measure becomes the exact mixture
/// (1 - eps_b) * clean_b + eps_b * contaminant_b.
struct ContaminationSpec {
  std::vector<double> epsilons;
  std::vector<Dataset> contaminants;
  std::uint64_t seed = 0;

  void validate(std::size_t region_count) const {
    if (epsilons.size() != region_count)
      throw config_error("contamination: expected " + std::to_string(region_count) +
                         " epsilons, got " + std::to_string(epsilons.size()));
    if (contaminants.size() != region_count)
      throw config_error("contamination: expected " + std::to_string(region_count) +
                         " contaminant datasets, got " +
                         std::to_string(contaminants.size()));
    for (std::size_t b = 0; b < epsilons.size(); ++b) {
      if (!(epsilons[b] >= 0.0 && epsilons[b] < 0.5))
        throw config_error("contamination: eps must lie in [0, 0.5), region " +
                           std::to_string(b) + " has " + std::to_string(epsilons[b]));
      if (epsilons[b] > 0.0 && contaminants[b].empty())
        throw config_error("contamination: region " + std::to_string(b) +
                           " has eps > 0 but an empty contaminant");
    }
  }
};

/// Builds the per-region contaminated training measures. Because the result
/// is an exact reweighting (clean weights scaled by 1 - eps_b, contaminant
/// weights by eps_b), the contaminated measure is literally an element of
/// the eps_b-contamination neighborhood of the clean regional measure; no
/// resampling approximation is involved. Regions with eps_b = 0 are returned
/// unchanged.
inline std::vector<Dataset> contaminate(const Regionalization& reg,
                                        const std::vector<Dataset>& clean,
                                        const ContaminationSpec& spec) {
  const std::size_t b_count = reg.region_count();
  if (clean.size() != b_count)
    throw domain_error("contaminate: expected " + std::to_string(b_count) +
                       " clean subsamples, got " + std::to_string(clean.size()));
  spec.validate(b_count);
  for (std::size_t b = 0; b < b_count; ++b) {
    if (!clean[b].empty() && std::abs(clean[b].weight_sum() - 1.0) > 1e-9)
      throw config_error("contaminate: clean weights of region " +
                         std::to_string(b) + " do not sum to 1");
    if (clean[b].empty() && spec.epsilons[b] > 0.0)
      throw config_error("contaminate: region " + std::to_string(b) +
                         " has no clean data to mix with");
    const Dataset& tilde = spec.contaminants[b];
    if (tilde.empty()) continue;
    if (tilde.dim() != clean[b].dim())
      throw domain_error("contaminate: contaminant dimension mismatch in region " +
                         std::to_string(b));
    if (std::abs(tilde.weight_sum() - 1.0) > 1e-9)
      throw config_error("contaminate: contaminant weights of region " +
                         std::to_string(b) + " do not sum to 1");
    for (std::size_t i = 0; i < tilde.size(); ++i) {
      const auto covering = membership(reg, tilde.x.row(i).transpose());
      if (std::find(covering.begin(), covering.end(), static_cast<int>(b)) ==
          covering.end())
        throw domain_error("contaminate: contaminant point " + std::to_string(i) +
                           " lies outside region " + std::to_string(b));
    }
  }

  std::vector<Dataset> out(b_count);
  for (std::size_t b = 0; b < b_count; ++b) {
    const double eps = spec.epsilons[b];
    if (eps == 0.0) {
      out[b] = clean[b];
      continue;
    }
    const Dataset& base = clean[b];
    const Dataset& tilde = spec.contaminants[b];
    const std::size_t n = base.size() + tilde.size();
    Eigen::MatrixXd x(n, base.x.cols());
    Eigen::VectorXd y(n);
    Eigen::VectorXd w(n);
    for (std::size_t i = 0; i < base.size(); ++i) {
      x.row(i) = base.x.row(i);
      y(i) = base.y(i);
      w(i) = (1.0 - eps) * base.w(i);
    }
    for (std::size_t i = 0; i < tilde.size(); ++i) {
      x.row(base.size() + i) = tilde.x.row(i);
      y(base.size() + i) = tilde.y(i);
      w(base.size() + i) = eps * tilde.w(i);
    }
    out[b] = Dataset(std::move(x), std::move(y), std::move(w));
  }
  return out;
}

/// Upper bound on the maxbias of the composed predictor:
///   2 |L|_1 sum_b ||w_b||_inf (eps_b / lambda_b) ||k_b||_inf^2.
/// Weight sup norms default to 1, which the indicator weights attain at
/// non-overlap points.
inline double maxbias_bound(const Loss& loss, const std::vector<Kernel>& kernels,
                            const std::vector<double>& lambdas,
                            const std::vector<double>& epsilons,
                            std::vector<double> weight_sup_norms = {}) {
  if (!loss.globally_lipschitz())
    throw unsupported_error(
        "maxbias bound needs a globally Lipschitz loss; least_squares has none");
  const std::size_t b_count = kernels.size();
  if (lambdas.size() != b_count || epsilons.size() != b_count)
    throw domain_error("maxbias_bound: kernels, lambdas and epsilons must have "
                       "one entry per region");
  if (weight_sup_norms.empty()) weight_sup_norms.assign(b_count, 1.0);
  if (weight_sup_norms.size() != b_count)
    throw domain_error("maxbias_bound: weight_sup_norms size mismatch");

  const double lip = lipschitz_constant(loss);
  double acc = 0.0;
  for (std::size_t b = 0; b < b_count; ++b) {
    if (!(lambdas[b] > 0.0))
      throw config_error("maxbias_bound: lambda must be > 0, region " +
                         std::to_string(b));
    if (!(epsilons[b] >= 0.0 && epsilons[b] < 0.5))
      throw config_error("maxbias_bound: eps must lie in [0, 0.5), region " +
                         std::to_string(b));
    if (!(weight_sup_norms[b] >= 0.0 && weight_sup_norms[b] <= 1.0))
      throw config_error("maxbias_bound: weight sup norms must lie in [0,1]");
    const double k_sup = sup_norm_bound(kernels[b]);
    acc += weight_sup_norms[b] * (epsilons[b] / lambdas[b]) * k_sup * k_sup;
  }
  return 2.0 * lip * acc;
}

/// Deterministic low-discrepancy evaluation grid (Halton, bases 2/3/5/...)
/// over the regionalization's inflated bounding box.
inline Eigen::MatrixXd evaluation_grid(const Regionalization& reg,
                                       std::size_t count = 2048) {
  const auto [lo, hi] = inflated_bounds(reg);
  const std::size_t d = reg.dim();
  const auto unit = halton_points(count, d);
  Eigen::MatrixXd grid(count, d);
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < d; ++j)
      grid(i, j) = lo(j) + unit[i][j] * (hi(j) - lo(j));
  return grid;
}

/// Largest pointwise shift between two composed predictors over the grid:
/// a grid maximum of |f_clean - f_contaminated|, hence a lower bound on the
/// true sup-norm used in one-sided dominance checks against maxbias_bound.
/// The two models must share regionalization and weight scheme.
inline double empirical_maxbias(const ComposedModel& clean_model,
                                const ComposedModel& contaminated_model,
                                const Eigen::MatrixXd& eval_grid) {
  if (!(clean_model.regionalization == contaminated_model.regionalization))
    throw domain_error("empirical_maxbias: models use different regionalizations");
  if (clean_model.scheme.kind != contaminated_model.scheme.kind ||
      clean_model.scheme.thetas != contaminated_model.scheme.thetas)
    throw domain_error("empirical_maxbias: models use different weight schemes");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < eval_grid.rows(); ++i) {
    const auto x = eval_grid.row(i).transpose();
    worst = std::max(worst,
                     std::abs(predict(clean_model, x) - predict(contaminated_model, x)));
  }
  return worst;
}

}  // namespace locsvm

#endif  // LOCSVM_ROBUSTNESS_HPP
