#ifndef LOCSVM_RISK_HPP
#define LOCSVM_RISK_HPP

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "locsvm/composer.hpp"
#include "locsvm/dataset.hpp"
#include "locsvm/errors.hpp"
#include "locsvm/loss.hpp"
#include "locsvm/numeric.hpp"

namespace locsvm {

enum class GeneratorKind { piecewise_median_regression, two_cluster_classification };
enum class NoiseKind { gaussian, cauchy };

inline std::string to_string(GeneratorKind k) {
  return k == GeneratorKind::piecewise_median_regression
             ? "piecewise_median_regression"
             : "two_cluster_classification";
}

inline GeneratorKind generator_kind_from_string(const std::string& s) {
  if (s == "piecewise_median_regression")
    return GeneratorKind::piecewise_median_regression;
  if (s == "two_cluster_classification")
    return GeneratorKind::two_cluster_classification;
  throw config_error("unknown generator kind '" + s + "'");
}

inline std::string to_string(NoiseKind k) {
  return k == NoiseKind::gaussian ? "gaussian" : "cauchy";
}

inline NoiseKind noise_kind_from_string(const std::string& s) {
  if (s == "gaussian") return NoiseKind::gaussian;
  if (s == "cauchy") return NoiseKind::cauchy;
  throw config_error("unknown noise kind '" + s + "'");
}

/// Synthetic data source with a known conditional median (regression) or
/// conditional class probability (classification), so Bayes predictors and
/// Bayes risks have exact reference implementations.
///
/// piecewise_median_regression: x uniform on [0,1]^dim, the conditional
/// median m(x) is piecewise constant in x_1 (levels between breakpoints),
/// y = m(x) + noise_scale * Z with Z standard gaussian or standard cauchy.
///
/// two_cluster_classification: x drawn from one of two gaussian clusters at
/// -separation/2 and +separation/2 along the first axis (scale
/// cluster_scale), y in {-1,+1} equals the cluster sign flipped with
/// probability flip_prob < 1/2.
struct SyntheticGenerator {
  GeneratorKind kind = GeneratorKind::piecewise_median_regression;
  NoiseKind noise = NoiseKind::gaussian;
  std::uint64_t seed = 0;
  int dim = 1;

  // regression parameters
  std::vector<double> breakpoints;          // strictly increasing, inside (0,1)
  std::vector<double> levels = {0.0};       // breakpoints.size() + 1 entries
  double noise_scale = 0.2;                 // >= 0

  // classification parameters
  double separation = 2.0;
  double cluster_scale = 0.5;
  double flip_prob = 0.1;                   // in [0, 1/2)

  void validate() const {
    if (dim < 1) throw config_error("generator: dim must be >= 1");
    if (kind == GeneratorKind::piecewise_median_regression) {
      if (levels.size() != breakpoints.size() + 1)
        throw config_error("generator: need one more level than breakpoints");
      for (std::size_t i = 1; i < breakpoints.size(); ++i)
        if (!(breakpoints[i] > breakpoints[i - 1]))
          throw config_error("generator: breakpoints must be strictly increasing");
      if (!(noise_scale >= 0.0))
        throw config_error("generator: noise_scale must be >= 0");
    } else {
      if (!(separation > 0.0)) throw config_error("generator: separation must be > 0");
      if (!(cluster_scale > 0.0))
        throw config_error("generator: cluster_scale must be > 0");
      if (!(flip_prob >= 0.0 && flip_prob < 0.5))
        throw config_error("generator: flip_prob must lie in [0, 0.5)");
    }
  }

  /// True conditional median of y given x.
  double median_at(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (kind == GeneratorKind::piecewise_median_regression) {
      std::size_t piece = 0;
      while (piece < breakpoints.size() && x(0) >= breakpoints[piece]) ++piece;
      return levels[piece];
    }
    return positive_prob_at(x) >= 0.5 ? 1.0 : -1.0;
  }

  /// True conditional class probability P(Y = +1 | x) (classification only).
  double positive_prob_at(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (kind != GeneratorKind::two_cluster_classification)
      throw unsupported_error("positive_prob_at: not a classification generator");
    // Density ratio of the two equal-scale clusters along the first axis.
    const double r =
        std::exp(x(0) * separation / (cluster_scale * cluster_scale));
    return ((1.0 - flip_prob) * r + flip_prob) / (r + 1.0);
  }

  /// The risk-minimizing predictor for the supported losses: the conditional
  /// median for the 0.5-pinball loss, the sign of 2 P(Y=+1|x) - 1 for hinge.
  double bayes_predict(const Loss& loss,
                       const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (loss.kind == LossKind::hinge) {
      if (kind != GeneratorKind::two_cluster_classification)
        throw config_error("hinge Bayes predictor needs a classification generator");
      return positive_prob_at(x) >= 0.5 ? 1.0 : -1.0;
    }
    if (loss.kind == LossKind::pinball && loss.tau == 0.5) return median_at(x);
    throw config_error(
        "Bayes oracle supports pinball tau=0.5 and hinge only, got " +
        to_string(loss.kind));
  }

  /// Draws n observations; `stream` selects an independent substream of the
  /// generator seed, so repeated draws are reproducible and non-overlapping.
  Dataset sample(std::size_t n, std::uint64_t stream) const {
    validate();
    std::mt19937_64 rng = make_rng(seed, stream);
    Eigen::MatrixXd x(n, dim);
    Eigen::VectorXd y(n);
    if (kind == GeneratorKind::piecewise_median_regression) {
      std::uniform_real_distribution<double> ux(0.0, 1.0);
      std::normal_distribution<double> gauss(0.0, 1.0);
      std::cauchy_distribution<double> cauchy(0.0, 1.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < dim; ++j) x(i, j) = ux(rng);
        const double z =
            noise == NoiseKind::gaussian ? gauss(rng) : cauchy(rng);
        y(i) = median_at(x.row(i).transpose()) + noise_scale * z;
      }
    } else {
      std::bernoulli_distribution fair(0.5);
      std::bernoulli_distribution flip(flip_prob);
      std::normal_distribution<double> gauss(0.0, 1.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double s = fair(rng) ? 1.0 : -1.0;
        x(i, 0) = s * separation / 2.0 + cluster_scale * gauss(rng);
        for (int j = 1; j < dim; ++j) x(i, j) = cluster_scale * gauss(rng);
        y(i) = flip(rng) ? -s : s;
      }
    }
    return Dataset(std::move(x), std::move(y));
  }
};

namespace detail {

template <typename Predictor>
double risk_of(Predictor&& f, const Dataset& data, const Loss& loss, bool shifted) {
  if (data.empty()) throw domain_error("empirical risk: empty dataset");
  std::vector<double> terms(data.size());
  std::vector<double> weights(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double t = f(data.x.row(i).transpose());
    terms[i] = data.w(i) * (shifted ? shifted_loss_value(loss, data.y(i), t)
                                    : loss_value(loss, data.y(i), t));
    weights[i] = data.w(i);
  }
  return pairwise_sum(terms) / pairwise_sum(weights);
}

}  // namespace detail

/// Weighted mean of the (shifted) losses over the dataset; reduces to
/// (1/n) sum_i L(y_i, f(x_i)) for uniform weights.
inline double empirical_risk(const ComposedModel& model, const Dataset& data,
                             const Loss& loss, bool shifted) {
  return detail::risk_of(
      [&](const auto& x) { return predict(model, x); }, data, loss, shifted);
}

inline double empirical_risk(const LocalModel& model, const Dataset& data,
                             const Loss& loss, bool shifted) {
  return detail::risk_of(
      [&](const auto& x) { return expansion_eval(model.expansion, x); }, data,
      loss, shifted);
}

/// Empirical risk restricted to the points whose membership covers the given
/// region; an empty restriction yields no value rather than an error.
inline std::optional<double> regional_risk(const ComposedModel& model,
                                           const Dataset& data, const Loss& loss,
                                           int region_index, bool shifted) {
  std::vector<double> terms;
  std::vector<double> weights;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto covering = membership(model.regionalization, data.x.row(i).transpose());
    if (std::find(covering.begin(), covering.end(), region_index) == covering.end())
      continue;
    const double t = predict(model, data.x.row(i).transpose());
    terms.push_back(data.w(i) * (shifted ? shifted_loss_value(loss, data.y(i), t)
                                         : loss_value(loss, data.y(i), t)));
    weights.push_back(data.w(i));
  }
  if (terms.empty()) return std::nullopt;
  return pairwise_sum(terms) / pairwise_sum(weights);
}

namespace detail {

inline void check_oracle_inputs(const SyntheticGenerator& gen, const Loss& loss,
                                std::size_t mc_samples) {
  if (mc_samples < 10000)
    throw config_error("Bayes oracle needs mc_samples >= 10000, got " +
                       std::to_string(mc_samples));
  if (loss.kind == LossKind::hinge &&
      gen.kind != GeneratorKind::two_cluster_classification)
    throw config_error("hinge risk oracle needs a classification generator");
  if (!(loss.kind == LossKind::hinge ||
        (loss.kind == LossKind::pinball && loss.tau == 0.5)))
    throw config_error("Bayes oracle supports pinball tau=0.5 and hinge only");
}

}  // namespace detail

/// Monte Carlo estimate of the Bayes risk with respect to the shifted loss,
/// using the generator's exact Bayes predictor. Shifted terms are bounded by
/// |L|_1 |f_Bayes(x)|, so the estimate is finite for heavy-tailed noise too.
inline MeanStderr bayes_risk_oracle(const SyntheticGenerator& gen, const Loss& loss,
                                    std::size_t mc_samples, std::uint64_t seed) {
  detail::check_oracle_inputs(gen, loss, mc_samples);
  const Dataset mc = gen.sample(mc_samples, derive_seed(seed, 0xba7e5ULL));
  std::vector<double> terms(mc.size());
  for (std::size_t i = 0; i < mc.size(); ++i) {
    const auto x = mc.x.row(i).transpose();
    terms[i] = shifted_loss_value(loss, mc.y(i), gen.bayes_predict(loss, x));
  }
  return mean_and_stderr(terms);
}

/// Monte Carlo risk of an arbitrary predictor under the generator's
/// distribution. Unshifted risks are refused for cauchy generators: without
/// the shift the integrand needs E|Y| < infinity, which cauchy noise lacks.
template <typename Predictor>
MeanStderr mc_risk(Predictor&& f, const SyntheticGenerator& gen, const Loss& loss,
                   bool shifted, std::size_t mc_samples, std::uint64_t seed) {
  if (gen.noise == NoiseKind::cauchy && !shifted)
    throw config_error(
        "unshifted risk is undefined for cauchy noise (E|Y| is infinite); "
        "use the shifted risk");
  const Dataset mc = gen.sample(mc_samples, derive_seed(seed, 0xbcafeULL));
  std::vector<double> terms(mc.size());
  for (std::size_t i = 0; i < mc.size(); ++i) {
    const double t = f(mc.x.row(i).transpose());
    terms[i] = shifted ? shifted_loss_value(loss, mc.y(i), t)
                       : loss_value(loss, mc.y(i), t);
  }
  return mean_and_stderr(terms);
}

inline MeanStderr mc_risk(const ComposedModel& model, const SyntheticGenerator& gen,
                          const Loss& loss, bool shifted, std::size_t mc_samples,
                          std::uint64_t seed) {
  return mc_risk([&](const auto& x) { return predict(model, x); }, gen, loss,
                 shifted, mc_samples, seed);
}

struct ExcessRisk {
  double excess = 0.0;      // model shifted risk minus Bayes shifted risk
  double stderr_ = 0.0;     // standard error of the paired difference
  double model_risk = 0.0;  // shifted
  double bayes_risk = 0.0;  // shifted
};

/// Paired Monte Carlo estimate of the excess shifted risk
/// R(f) - R(f_Bayes). Model and Bayes terms share the same draws, so the
/// loss shifts cancel term by term and the difference stays bounded even
/// under cauchy noise; the standard error is that of the paired differences.
template <typename Predictor>
ExcessRisk excess_risk_of(Predictor&& f, const SyntheticGenerator& gen,
                          const Loss& loss, std::size_t eval_samples,
                          std::uint64_t seed) {
  detail::check_oracle_inputs(gen, loss, eval_samples);
  const Dataset mc = gen.sample(eval_samples, derive_seed(seed, 0xba7e5ULL));
  std::vector<double> model_terms(mc.size());
  std::vector<double> bayes_terms(mc.size());
  std::vector<double> diffs(mc.size());
  for (std::size_t i = 0; i < mc.size(); ++i) {
    const auto x = mc.x.row(i).transpose();
    model_terms[i] = shifted_loss_value(loss, mc.y(i), f(x));
    bayes_terms[i] =
        shifted_loss_value(loss, mc.y(i), gen.bayes_predict(loss, x));
    diffs[i] = model_terms[i] - bayes_terms[i];
  }
  const MeanStderr d = mean_and_stderr(diffs);
  ExcessRisk r;
  r.excess = d.mean;
  r.stderr_ = d.stderr_;
  r.model_risk = pairwise_sum(model_terms) / static_cast<double>(mc.size());
  r.bayes_risk = pairwise_sum(bayes_terms) / static_cast<double>(mc.size());
  return r;
}

inline ExcessRisk excess_risk(const ComposedModel& model,
                              const SyntheticGenerator& gen, const Loss& loss,
                              std::size_t eval_samples, std::uint64_t seed) {
  return excess_risk_of([&](const auto& x) { return predict(model, x); }, gen,
                        loss, eval_samples, seed);
}

}  // namespace locsvm

#endif  // LOCSVM_RISK_HPP
