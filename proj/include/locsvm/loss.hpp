#ifndef LOCSVM_LOSS_HPP
#define LOCSVM_LOSS_HPP

#include <algorithm>
#include <cmath>
#include <string>

#include "locsvm/errors.hpp"

namespace locsvm {

enum class LossKind { hinge, pinball, eps_insensitive, least_squares };

inline std::string to_string(LossKind k) {
  switch (k) {
    case LossKind::hinge: return "hinge";
    case LossKind::pinball: return "pinball";
    case LossKind::eps_insensitive: return "eps_insensitive";
    case LossKind::least_squares: return "least_squares";
  }
  return "?";
}

inline LossKind loss_kind_from_string(const std::string& s) {
  if (s == "hinge") return LossKind::hinge;
  if (s == "pinball") return LossKind::pinball;
  if (s == "eps_insensitive") return LossKind::eps_insensitive;
  if (s == "least_squares") return LossKind::least_squares;
  throw config_error("unknown loss kind '" + s + "'");
}

/// A supervised loss L(y, t) >= 0 with L(y, y) = 0, convex in the prediction
/// argument t. hinge, pinball and eps_insensitive are globally Lipschitz in
/// t; least_squares is only locally Lipschitz and is rejected by operations
/// whose contracts need a global Lipschitz constant.
struct Loss {
  LossKind kind = LossKind::pinball;
  double tau = 0.5;  // pinball only, in (0, 1)
  double eps = 0.0;  // eps_insensitive only, >= 0

  static Loss hinge() { return Loss{LossKind::hinge, 0.0, 0.0}; }
  static Loss pinball(double tau) {
    if (!(tau > 0.0 && tau < 1.0))
      throw config_error("pinball tau must lie in (0,1), got " +
                         std::to_string(tau));
    return Loss{LossKind::pinball, tau, 0.0};
  }
  static Loss eps_insensitive(double eps) {
    if (!(eps >= 0.0))
      throw config_error("eps_insensitive eps must be >= 0, got " +
                         std::to_string(eps));
    return Loss{LossKind::eps_insensitive, 0.0, eps};
  }
  static Loss least_squares() { return Loss{LossKind::least_squares, 0.0, 0.0}; }

  bool globally_lipschitz() const { return kind != LossKind::least_squares; }
};

namespace detail {

inline void check_hinge_label(double y) {
  if (y != 1.0 && y != -1.0)
    throw domain_error("hinge loss needs labels in {-1,+1}, got " +
                       std::to_string(y));
}

}  // namespace detail

/// L(y, t).
inline double loss_value(const Loss& loss, double y, double t) {
  switch (loss.kind) {
    case LossKind::hinge:
      detail::check_hinge_label(y);
      return std::max(0.0, 1.0 - y * t);
    case LossKind::pinball:
      return y >= t ? loss.tau * (y - t) : (1.0 - loss.tau) * (t - y);
    case LossKind::eps_insensitive:
      return std::max(0.0, std::abs(y - t) - loss.eps);
    case LossKind::least_squares:
      return (y - t) * (y - t);
  }
  return 0.0;
}

/// L*(y, t) := L(y, t) - L(y, 0). Shares the arithmetic path of loss_value,
/// so the identity L* = L - L(.,0) holds exactly in floating point.
inline double shifted_loss_value(const Loss& loss, double y, double t) {
  return loss_value(loss, y, t) - loss_value(loss, y, 0.0);
}

/// Global Lipschitz constant |L|_1 of t -> L(y, t); shared by L and L*.
inline double lipschitz_constant(const Loss& loss) {
  switch (loss.kind) {
    case LossKind::hinge: return 1.0;
    case LossKind::pinball: return std::max(loss.tau, 1.0 - loss.tau);
    case LossKind::eps_insensitive: return 1.0;
    case LossKind::least_squares:
      throw unsupported_error(
          "least_squares is not globally Lipschitz; no |L|_1 exists");
  }
  return 0.0;
}

/// One element of the subdifferential of t -> L(y, t). At kinks the zero
/// element is returned whenever 0 is a valid subgradient there.
inline double subgradient_t(const Loss& loss, double y, double t) {
  switch (loss.kind) {
    case LossKind::hinge:
      detail::check_hinge_label(y);
      return y * t < 1.0 ? -y : 0.0;
    case LossKind::pinball:
      if (t < y) return -loss.tau;
      if (t > y) return 1.0 - loss.tau;
      return 0.0;
    case LossKind::eps_insensitive: {
      const double r = t - y;
      if (r > loss.eps) return 1.0;
      if (r < -loss.eps) return -1.0;
      return 0.0;
    }
    case LossKind::least_squares:
      return 2.0 * (t - y);
  }
  return 0.0;
}

}  // namespace locsvm

#endif  // LOCSVM_LOSS_HPP
