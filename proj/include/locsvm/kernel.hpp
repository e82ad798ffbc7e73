#ifndef LOCSVM_KERNEL_HPP
#define LOCSVM_KERNEL_HPP

#include <Eigen/Core>
#include <cmath>
#include <string>

#include "locsvm/errors.hpp"

namespace locsvm {

enum class KernelKind { gaussian_rbf, laplacian_rbf };

inline std::string to_string(KernelKind k) {
  return k == KernelKind::gaussian_rbf ? "gaussian_rbf" : "laplacian_rbf";
}

inline KernelKind kernel_kind_from_string(const std::string& s) {
  if (s == "gaussian_rbf") return KernelKind::gaussian_rbf;
  if (s == "laplacian_rbf") return KernelKind::laplacian_rbf;
  throw config_error("unknown kernel kind '" + s + "'");
}

/// Bounded measurable kernel with unit diagonal, k(x, x) = 1.
///   gaussian_rbf:  k(x, x') = exp(-||x - x'||_2^2 / gamma^2)
///   laplacian_rbf: k(x, x') = exp(-||x - x'||_2 / gamma)
/// gamma is a length scale, not an inverse one.
struct Kernel {
  KernelKind kind = KernelKind::gaussian_rbf;
  double gamma = 1.0;

  Kernel() = default;
  Kernel(KernelKind k, double g) : kind(k), gamma(g) {
    if (!(gamma > 0.0))
      throw config_error("kernel gamma must be > 0, got " +
                         std::to_string(gamma));
  }
};

namespace detail {

inline void check_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b)
    throw domain_error(std::string(what) + ": dimension mismatch (" +
                       std::to_string(a) + " vs " + std::to_string(b) + ")");
}

}  // namespace detail

inline double kernel_eval(const Kernel& k, const Eigen::Ref<const Eigen::VectorXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& xp) {
  detail::check_same_dim(x.size(), xp.size(), "kernel_eval");
  const double sq = (x - xp).squaredNorm();
  if (k.kind == KernelKind::gaussian_rbf) return std::exp(-sq / (k.gamma * k.gamma));
  return std::exp(-std::sqrt(sq) / k.gamma);
}

/// sup_x sqrt(k(x, x)); equals 1 for both supported kernels.
inline double sup_norm_bound(const Kernel&) { return 1.0; }

/// Gram matrix G_ij = k(x_i, x_j) for the rows of `points`. Symmetric with
/// unit diagonal; filled by the plain sequential double loop.
inline Eigen::MatrixXd gram_matrix(const Kernel& k, const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i, i) = kernel_eval(k, points.row(i).transpose(), points.row(i).transpose());
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v =
          kernel_eval(k, points.row(i).transpose(), points.row(j).transpose());
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

/// Finite kernel expansion f = sum_i alpha_i k(., x_i). The empty expansion
/// is the zero function.
struct KernelExpansion {
  Kernel kernel;
  Eigen::MatrixXd points;        // m x d
  Eigen::VectorXd coefficients;  // m

  KernelExpansion() = default;
  KernelExpansion(Kernel k, Eigen::MatrixXd pts, Eigen::VectorXd coeffs)
      : kernel(k), points(std::move(pts)), coefficients(std::move(coeffs)) {
    if (points.rows() != coefficients.size())
      throw domain_error("kernel expansion: " + std::to_string(points.rows()) +
                         " points but " + std::to_string(coefficients.size()) +
                         " coefficients");
  }

  std::size_t size() const { return static_cast<std::size_t>(coefficients.size()); }
  bool is_zero() const { return coefficients.size() == 0; }
};

inline double expansion_eval(const KernelExpansion& f,
                             const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (f.is_zero()) return 0.0;
  detail::check_same_dim(f.points.cols(), x.size(), "expansion_eval");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < f.points.rows(); ++i)
    acc += f.coefficients(i) * kernel_eval(f.kernel, x, f.points.row(i).transpose());
  return acc;
}

/// RKHS norm sqrt(alpha^T G alpha); tiny negative quadratic forms from
/// rounding are clamped to zero before the square root.
inline double rkhs_norm(const KernelExpansion& f) {
  if (f.is_zero()) return 0.0;
  const Eigen::MatrixXd g = gram_matrix(f.kernel, f.points);
  const double sq = f.coefficients.dot(g * f.coefficients);
  return std::sqrt(std::max(0.0, sq));
}

}  // namespace locsvm

#endif  // LOCSVM_KERNEL_HPP
