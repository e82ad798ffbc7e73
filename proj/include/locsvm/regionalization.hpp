#ifndef LOCSVM_REGIONALIZATION_HPP
#define LOCSVM_REGIONALIZATION_HPP

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "locsvm/dataset.hpp"
#include "locsvm/errors.hpp"
#include "locsvm/numeric.hpp"

namespace locsvm {

enum class RegionMethod { voronoi_overlap, grid_overlap };

inline std::string to_string(RegionMethod m) {
  return m == RegionMethod::voronoi_overlap ? "voronoi_overlap" : "grid_overlap";
}

inline RegionMethod region_method_from_string(const std::string& s) {
  if (s == "voronoi_overlap") return RegionMethod::voronoi_overlap;
  if (s == "grid_overlap") return RegionMethod::grid_overlap;
  throw config_error("unknown regionalization method '" + s + "'");
}

struct RegionalizationSpec {
  RegionMethod method = RegionMethod::voronoi_overlap;
  int target_regions = 1;  // region count (voronoi) or cells per axis (grid)
  double overlap = 0.0;    // rho, relative inflation of cell boundaries
  int min_points = 1;      // occupancy floor on the region-training sample
  std::uint64_t seed = 0;

  void validate() const {
    if (target_regions < 1)
      throw config_error("regionalization: target_regions must be >= 1");
    if (!(overlap >= 0.0 && overlap <= 1.0))
      throw config_error("regionalization: overlap must lie in [0,1], got " +
                         std::to_string(overlap));
    if (min_points < 1)
      throw config_error("regionalization: min_points must be >= 1");
  }
};

/// One region descriptor: a center (voronoi) or an axis-aligned box (grid).
struct Region {
  Eigen::VectorXd center;
  Eigen::VectorXd box_lo;
  Eigen::VectorXd box_hi;
};

/// Fitted collection of B possibly overlapping regions covering the input
/// space. Membership queries are total: every point of R^d belongs to at
/// least one region. Immutable after fitting.
struct Regionalization {
  RegionMethod method = RegionMethod::voronoi_overlap;
  double overlap = 0.0;
  std::uint64_t seed = 0;
  Eigen::VectorXd bounds_lo;  // bounding summary of the region-training sample
  Eigen::VectorXd bounds_hi;
  std::vector<Region> regions;

  std::size_t region_count() const { return regions.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(bounds_lo.size()); }

  friend bool operator==(const Regionalization& a, const Regionalization& b) {
    if (a.method != b.method || a.overlap != b.overlap || a.seed != b.seed ||
        a.regions.size() != b.regions.size())
      return false;
    if (a.bounds_lo != b.bounds_lo || a.bounds_hi != b.bounds_hi) return false;
    for (std::size_t i = 0; i < a.regions.size(); ++i) {
      if (a.regions[i].center != b.regions[i].center ||
          a.regions[i].box_lo != b.regions[i].box_lo ||
          a.regions[i].box_hi != b.regions[i].box_hi)
        return false;
    }
    return true;
  }
};

namespace detail {

inline double box_distance(const Eigen::Ref<const Eigen::VectorXd>& x,
                           const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double d = std::max({0.0, lo(j) - x(j), x(j) - hi(j)});
    acc += d * d;
  }
  return std::sqrt(acc);
}

// Lloyd's algorithm with farthest-point seeding. Deterministic: ties in
// nearest-center assignment break toward the lowest index, iteration is
// capped at 100 rounds.
inline std::vector<Eigen::VectorXd> kmeans_centers(const Eigen::MatrixXd& x,
                                                   int k, std::uint64_t seed) {
  const Eigen::Index n = x.rows();
  std::mt19937_64 rng(derive_seed(seed, 0x6b6d65616e73ULL));
  std::vector<Eigen::VectorXd> centers;
  centers.reserve(k);

  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centers.push_back(x.row(pick(rng)).transpose());
  Eigen::VectorXd min_dist(n);
  for (Eigen::Index i = 0; i < n; ++i)
    min_dist(i) = (x.row(i).transpose() - centers[0]).norm();
  while (static_cast<int>(centers.size()) < k) {
    Eigen::Index far = 0;
    for (Eigen::Index i = 1; i < n; ++i)
      if (min_dist(i) > min_dist(far)) far = i;
    if (min_dist(far) == 0.0) break;  // fewer distinct points than centers
    centers.push_back(x.row(far).transpose());
    for (Eigen::Index i = 0; i < n; ++i)
      min_dist(i) = std::min(min_dist(i), (x.row(i).transpose() - centers.back()).norm());
  }

  const int b = static_cast<int>(centers.size());
  std::vector<int> assign(n, 0);
  for (int round = 0; round < 100; ++round) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (x.row(i).transpose() - centers[0]).norm();
      for (int c = 1; c < b; ++c) {
        const double d = (x.row(i).transpose() - centers[c]).norm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed && round > 0) break;

    std::vector<Eigen::VectorXd> sums(b, Eigen::VectorXd::Zero(x.cols()));
    std::vector<int> counts(b, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums[assign[i]] += x.row(i).transpose();
      ++counts[assign[i]];
    }
    for (int c = 0; c < b; ++c) {
      if (counts[c] > 0) {
        centers[c] = sums[c] / counts[c];
      } else {
        // Re-seed an emptied cluster at the point farthest from its own center.
        Eigen::Index far = 0;
        double far_d = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double d = (x.row(i).transpose() - centers[assign[i]]).norm();
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centers[c] = x.row(far).transpose();
      }
    }
  }
  return centers;
}

}  // namespace detail

/// Indices (sorted, nonempty) of the regions containing x.
///   voronoi: b is a member iff dist(x, c_b) <= (1+rho) * min_beta dist(x, c_beta).
///   grid:    b is a member iff x lies in box_b inflated by rho * side per axis;
///            a point outside every inflated box snaps to the nearest box.
inline std::vector<int> membership(const Regionalization& reg,
                                   const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (static_cast<std::size_t>(x.size()) != reg.dim())
    throw domain_error("membership: point dimension " + std::to_string(x.size()) +
                       " does not match regionalization dimension " +
                       std::to_string(reg.dim()));
  const int b = static_cast<int>(reg.region_count());
  std::vector<int> out;
  if (reg.method == RegionMethod::voronoi_overlap) {
    Eigen::VectorXd dist(b);
    double dmin = std::numeric_limits<double>::infinity();
    for (int c = 0; c < b; ++c) {
      dist(c) = (x - reg.regions[c].center).norm();
      dmin = std::min(dmin, dist(c));
    }
    const double cutoff = (1.0 + reg.overlap) * dmin;
    for (int c = 0; c < b; ++c)
      if (dist(c) <= cutoff) out.push_back(c);
  } else {
    for (int c = 0; c < b; ++c) {
      const Region& r = reg.regions[c];
      bool inside = true;
      for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double margin = reg.overlap * (r.box_hi(j) - r.box_lo(j));
        if (x(j) < r.box_lo(j) - margin || x(j) > r.box_hi(j) + margin) {
          inside = false;
          break;
        }
      }
      if (inside) out.push_back(c);
    }
    if (out.empty()) {
      int best = 0;
      double best_d = detail::box_distance(x, reg.regions[0].box_lo, reg.regions[0].box_hi);
      for (int c = 1; c < b; ++c) {
        const double d = detail::box_distance(x, reg.regions[c].box_lo, reg.regions[c].box_hi);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      out.push_back(best);
    }
  }
  return out;
}

/// The overlap cell of x: the index set I with x in X_I. Identical to
/// membership; exposed under this name so risk decompositions over cells
/// read the same way as the underlying theory.
inline std::vector<int> overlap_cell(const Regionalization& reg,
                                     const Eigen::Ref<const Eigen::VectorXd>& x) {
  return membership(reg, x);
}

namespace detail {

inline std::vector<int> occupancy_counts(const Regionalization& reg,
                                         const Eigen::MatrixXd& x) {
  std::vector<int> counts(reg.region_count(), 0);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (int c : membership(reg, x.row(i).transpose())) ++counts[c];
  return counts;
}

}  // namespace detail

/// Fits a regionalization on the region-training sample. Regions below the
/// occupancy floor are merged into their nearest neighbor region until the
/// floor holds, so the fitted region count may be smaller than requested.
inline Regionalization fit_regions(const Dataset& region_sample,
                                   const RegionalizationSpec& spec) {
  spec.validate();
  if (region_sample.empty())
    throw domain_error("fit_regions: empty region-training sample");
  if (region_sample.size() < static_cast<std::size_t>(spec.min_points))
    throw fit_error("fit_regions: sample of " + std::to_string(region_sample.size()) +
                    " points cannot satisfy min_points = " +
                    std::to_string(spec.min_points));

  const Eigen::MatrixXd& x = region_sample.x;
  Regionalization reg;
  reg.method = spec.method;
  reg.overlap = spec.overlap;
  reg.seed = spec.seed;
  reg.bounds_lo = x.colwise().minCoeff().transpose();
  reg.bounds_hi = x.colwise().maxCoeff().transpose();

  if (spec.method == RegionMethod::voronoi_overlap) {
    const int k = std::min<int>(spec.target_regions, static_cast<int>(x.rows()));
    for (auto& c : detail::kmeans_centers(x, k, spec.seed)) {
      Region r;
      r.center = std::move(c);
      reg.regions.push_back(std::move(r));
    }
  } else {
    const int cells = spec.target_regions;
    const Eigen::Index d = x.cols();
    const Eigen::VectorXd extent = reg.bounds_hi - reg.bounds_lo;
    std::vector<int> idx(d, 0);
    while (true) {
      Region r;
      r.box_lo.resize(d);
      r.box_hi.resize(d);
      r.center.resize(d);
      for (Eigen::Index j = 0; j < d; ++j) {
        const double w = extent(j) / cells;
        r.box_lo(j) = reg.bounds_lo(j) + idx[j] * w;
        r.box_hi(j) = reg.bounds_lo(j) + (idx[j] + 1) * w;
        r.center(j) = 0.5 * (r.box_lo(j) + r.box_hi(j));
      }
      reg.regions.push_back(std::move(r));
      Eigen::Index axis = 0;
      while (axis < d && ++idx[axis] == cells) {
        idx[axis] = 0;
        ++axis;
      }
      if (axis == d) break;
    }
  }

  // Occupancy floor, the finite-sample stand-in for regions growing without
  // bound: merge the thinnest region into its nearest neighbor until every
  // region holds at least min_points sample points.
  while (reg.region_count() > 1) {
    const std::vector<int> counts = detail::occupancy_counts(reg, x);
    int victim = 0;
    for (std::size_t c = 1; c < counts.size(); ++c)
      if (counts[c] < counts[victim]) victim = static_cast<int>(c);
    if (counts[victim] >= spec.min_points) break;

    int nearest = victim == 0 ? 1 : 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < reg.region_count(); ++c) {
      if (static_cast<int>(c) == victim) continue;
      const double d =
          (reg.regions[c].center - reg.regions[victim].center).norm();
      if (d < best_d) {
        best_d = d;
        nearest = static_cast<int>(c);
      }
    }
    if (reg.method == RegionMethod::grid_overlap) {
      Region& keep = reg.regions[nearest];
      const Region& gone = reg.regions[victim];
      keep.box_lo = keep.box_lo.cwiseMin(gone.box_lo);
      keep.box_hi = keep.box_hi.cwiseMax(gone.box_hi);
      keep.center = 0.5 * (keep.box_lo + keep.box_hi);
    }
    reg.regions.erase(reg.regions.begin() + victim);
  }
  return reg;
}

/// Regional subsamples D_{n,b}: subsample b holds every data point whose
/// membership includes b, reweighted uniformly to 1/n_b. Points in overlaps
/// appear in every covering region's subsample; regions without points get
/// an empty dataset.
inline std::vector<Dataset> assign_subsamples(const Regionalization& reg,
                                              const Dataset& data) {
  const std::size_t b = reg.region_count();
  std::vector<std::vector<Eigen::Index>> rows(b);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(data.size()); ++i)
    for (int c : membership(reg, data.x.row(i).transpose())) rows[c].push_back(i);

  std::vector<Dataset> out(b);
  for (std::size_t c = 0; c < b; ++c) {
    const std::size_t nb = rows[c].size();
    Eigen::MatrixXd x(nb, data.x.cols());
    Eigen::VectorXd y(nb);
    for (std::size_t i = 0; i < nb; ++i) {
      x.row(i) = data.x.row(rows[c][i]);
      y(i) = data.y(rows[c][i]);
    }
    out[c] = Dataset(std::move(x), std::move(y));
  }
  return out;
}

/// Bounding box of the region-training sample inflated by rho per axis;
/// degenerate axes get unit padding. Evaluation grids live here.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> inflated_bounds(
    const Regionalization& reg) {
  Eigen::VectorXd lo = reg.bounds_lo;
  Eigen::VectorXd hi = reg.bounds_hi;
  for (Eigen::Index j = 0; j < lo.size(); ++j) {
    double pad = reg.overlap * (hi(j) - lo(j));
    if (hi(j) - lo(j) <= 0.0) pad = 1.0;
    lo(j) -= pad;
    hi(j) += pad;
  }
  return {lo, hi};
}

}  // namespace locsvm

#endif  // LOCSVM_REGIONALIZATION_HPP
