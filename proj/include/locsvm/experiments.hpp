#ifndef LOCSVM_EXPERIMENTS_HPP
#define LOCSVM_EXPERIMENTS_HPP

#include <atomic>
#include <cstdint>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "locsvm/composer.hpp"
#include "locsvm/config.hpp"
#include "locsvm/dataset.hpp"
#include "locsvm/errors.hpp"
#include "locsvm/numeric.hpp"
#include "locsvm/regionalization.hpp"
#include "locsvm/risk.hpp"
#include "locsvm/robustness.hpp"
#include "locsvm/solver.hpp"

namespace locsvm {

namespace detail {

/// Runs fn(0..count-1) on up to `jobs` worker threads. Tasks own their
/// results by index and their RNG streams by task id, so the outcome does
/// not depend on the schedule. The first exception wins and is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    threads.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline std::string join_doubles(const std::vector<double>& vs, char sep = ';') {
  std::string s;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) s.push_back(sep);
    s += format_double(vs[i]);
  }
  return s;
}

}  // namespace detail

/// Splits a dataset into a region-training part of exactly `region_count`
/// observations and the disjoint remainder, by seeded shuffling of indices.
inline std::pair<Dataset, Dataset> split_dataset(const Dataset& data,
                                                 std::size_t region_count,
                                                 std::uint64_t seed) {
  const std::size_t n = data.size();
  if (region_count < 1 || region_count >= n)
    throw config_error("split: need 0 < r < N, got r = " +
                       std::to_string(region_count) + ", N = " + std::to_string(n));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng = make_rng(seed, 0x5b117ULL);
  std::shuffle(idx.begin(), idx.end(), rng);

  const auto take = [&](std::size_t from, std::size_t count) {
    Eigen::MatrixXd x(count, data.x.cols());
    Eigen::VectorXd y(count);
    for (std::size_t i = 0; i < count; ++i) {
      x.row(i) = data.x.row(idx[from + i]);
      y(i) = data.y(idx[from + i]);
    }
    return Dataset(std::move(x), std::move(y));
  };
  return {take(0, region_count), take(region_count, n - region_count)};
}

inline std::size_t region_sample_count(std::size_t total, double fraction) {
  auto r = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
  if (r < 1) r = 1;
  if (r >= total) r = total - 1;
  return r;
}

struct RegionReportRow {
  int region = 0;
  std::size_t n_b = 0;
  double lambda_b = 0.0;
  double objective = 0.0;
  double objective_shifted = 0.0;
  bool empty_region = false;
};

struct TrainedComposite {
  ComposedModel model;
  std::vector<RegionReportRow> report;
  std::size_t region_sample_size = 0;
  std::size_t train_sample_size = 0;
};

/// The full training pipeline: split the data into the region-training part
/// and the SVM-training part, fit the regionalization on the former, train
/// one local SVM per region on the latter with lambda_b = schedule(n_b),
/// and compose under the configured weights.
inline TrainedComposite train_composite(const Dataset& data,
                                        const RegionalizationSpec& region_spec,
                                        const Kernel& kernel, const Loss& loss,
                                        const LambdaSchedule& schedule,
                                        const SolverConfig& solver_cfg,
                                        const WeightScheme& weights,
                                        double region_fraction,
                                        std::uint64_t master_seed, int jobs = 1) {
  const std::size_t r = region_sample_count(data.size(), region_fraction);
  auto [region_sample, train_sample] = split_dataset(data, r, master_seed);
  const Regionalization reg = fit_regions(region_sample, region_spec);
  const std::vector<Dataset> subsamples = assign_subsamples(reg, train_sample);

  std::vector<LocalModel> locals(reg.region_count());
  detail::parallel_for(reg.region_count(), jobs, [&](std::size_t b) {
    const std::size_t nb = subsamples[b].size();
    const double lambda_b = schedule.at(std::max<std::size_t>(nb, 1));
    locals[b] = train_local(subsamples[b], loss, kernel, lambda_b, solver_cfg);
    locals[b].region_index = static_cast<int>(b);
  });

  TrainedComposite out{ComposedModel(reg, std::move(locals), weights), {}, r,
                       data.size() - r};
  for (std::size_t b = 0; b < out.model.locals.size(); ++b) {
    const LocalModel& m = out.model.locals[b];
    out.report.push_back(RegionReportRow{static_cast<int>(b), subsamples[b].size(),
                                         m.lambda, m.objective_value,
                                         m.objective_value_shifted, m.empty_region});
  }
  return out;
}

inline TrainedComposite train_composite(const Dataset& data,
                                        const ExperimentConfig& cfg, int jobs = 1) {
  return train_composite(data, cfg.regionalization, cfg.kernel, cfg.loss,
                         cfg.schedule, cfg.solver, cfg.weights,
                         cfg.region_fraction, cfg.seed, jobs);
}

// ---------------------------------------------------------------------------
// Consistency experiment: excess shifted risk against growing n under the
// schedule lambda_b = c * n_b^(-p).
// ---------------------------------------------------------------------------

struct ConsistencyRow {
  std::size_t n = 0;      // SVM-training sample size |D_n|
  int repetition = 0;
  double lambda = 0.0;    // schedule value at n
  double excess = 0.0;
  double stderr_ = 0.0;
};

struct ConsistencyResult {
  std::vector<ConsistencyRow> rows;          // sorted by (n, repetition)
  std::vector<std::pair<std::size_t, double>> medians;  // per size
  bool trend_ok = false;
};

inline ConsistencyResult run_consistency(const ExperimentConfig& cfg, int jobs = 1) {
  if (!cfg.generator)
    throw config_error("consistency experiment needs a generator-based config "
                       "(the Bayes oracle has no reference on file datasets)");
  const SyntheticGenerator& gen = *cfg.generator;
  const std::size_t sizes = cfg.sample_sizes.size();
  const std::size_t reps = static_cast<std::size_t>(cfg.repetitions);

  ConsistencyResult out;
  out.rows.resize(sizes * reps);
  detail::parallel_for(sizes * reps, jobs, [&](std::size_t task) {
    const std::size_t si = task / reps;
    const int rep = static_cast<int>(task % reps);
    const std::size_t n = cfg.sample_sizes[si];
    const std::uint64_t task_seed = derive_seed(cfg.seed, 7919 * si + rep);

    // Draw enough for both the region-training subsample and D_n of size n.
    const std::size_t total = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) / (1.0 - cfg.region_fraction)));
    SyntheticGenerator task_gen = gen;
    task_gen.seed = derive_seed(task_seed, 1);
    const Dataset data = task_gen.sample(std::max(total, n + 1), 0);

    RegionalizationSpec rspec = cfg.regionalization;
    rspec.seed = derive_seed(task_seed, 2);
    const std::size_t r = data.size() - n;
    auto [region_sample, train_sample] = split_dataset(data, r, derive_seed(task_seed, 3));
    const Regionalization reg = fit_regions(region_sample, rspec);
    const std::vector<Dataset> subsamples = assign_subsamples(reg, train_sample);

    std::vector<LocalModel> locals(reg.region_count());
    for (std::size_t b = 0; b < reg.region_count(); ++b) {
      const double lambda_b = cfg.schedule.at(std::max<std::size_t>(subsamples[b].size(), 1));
      locals[b] = train_local(subsamples[b], cfg.loss, cfg.kernel, lambda_b, cfg.solver);
      locals[b].region_index = static_cast<int>(b);
    }
    const ComposedModel model(reg, std::move(locals), cfg.weights);

    const ExcessRisk ex = excess_risk(model, task_gen, cfg.loss,
                                      cfg.consistency.mc_samples,
                                      derive_seed(task_seed, 4));
    out.rows[task] =
        ConsistencyRow{n, rep, cfg.schedule.at(n), ex.excess, ex.stderr_};
  });

  for (std::size_t si = 0; si < sizes; ++si) {
    std::vector<double> excesses;
    for (std::size_t rep = 0; rep < reps; ++rep)
      excesses.push_back(out.rows[si * reps + rep].excess);
    out.medians.emplace_back(cfg.sample_sizes[si], median(excesses));
  }

  bool finite = true;
  for (const auto& row : out.rows) finite = finite && std::isfinite(row.excess);
  const double first = out.medians.front().second;
  const double last = out.medians.back().second;
  out.trend_ok = finite && last < cfg.consistency.trend_factor * first &&
                 last < cfg.consistency.absolute_threshold;
  return out;
}

// ---------------------------------------------------------------------------
// Robustness experiment: randomized contamination trials checking that the
// observed predictor shift never exceeds the maxbias bound.
// ---------------------------------------------------------------------------

struct RobustnessTrialRow {
  int trial = 0;
  std::string loss;
  int region_count = 0;
  std::vector<double> epsilons;
  std::vector<double> lambdas;
  double bound = 0.0;
  double empirical = 0.0;
  double slack = 0.0;
  bool pass = false;
};

struct RobustnessResult {
  std::vector<RobustnessTrialRow> rows;
  bool all_pass = false;
};

namespace detail {

/// Adversarial contaminant for one region: support points sampled inside the
/// region, labels flipped (classification) or shifted far away (regression).
inline Dataset make_contaminant(const Regionalization& reg, std::size_t b,
                                const Dataset& regional, bool classification,
                                int points, std::mt19937_64& rng) {
  const Eigen::Index d = static_cast<Eigen::Index>(reg.dim());
  std::normal_distribution<double> jitter(0.0, 1.0);
  Eigen::MatrixXd x(points, d);
  Eigen::VectorXd y(points);

  const Eigen::VectorXd anchor = reg.regions[b].center;
  Eigen::VectorXd scale(d);
  const auto [lo, hi] = inflated_bounds(reg);
  for (Eigen::Index j = 0; j < d; ++j)
    scale(j) = 0.1 * (hi(j) - lo(j)) / static_cast<double>(reg.region_count());

  double mean_y = 0.0;
  if (!regional.empty()) mean_y = regional.y.mean();

  for (int i = 0; i < points; ++i) {
    Eigen::VectorXd candidate(d);
    bool placed = false;
    for (int attempt = 0; attempt < 50 && !placed; ++attempt) {
      for (Eigen::Index j = 0; j < d; ++j)
        candidate(j) = anchor(j) + scale(j) * jitter(rng);
      const auto covering = membership(reg, candidate);
      placed = std::find(covering.begin(), covering.end(), static_cast<int>(b)) !=
               covering.end();
    }
    if (!placed) candidate = anchor;  // the region's own anchor always qualifies
    x.row(i) = candidate.transpose();
    if (classification) {
      y(i) = mean_y >= 0.0 ? -1.0 : 1.0;
    } else {
      y(i) = mean_y + (i % 2 == 0 ? 25.0 : -40.0);
    }
  }
  return Dataset(std::move(x), std::move(y));
}

}  // namespace detail

/// Runs the randomized contamination trials. Every trial draws its own RNG
/// stream from (master seed, trial index), trains the clean and the
/// contaminated composed model on a shared regionalization, and compares
/// the observed sup-norm shift on a low-discrepancy grid against the
/// maxbias bound plus a solver-tolerance slack. Every tenth trial forces
/// eps = 0, where bound and shift must both vanish.
inline RobustnessResult run_robustness(const ExperimentConfig& cfg, int jobs = 1) {
  const RobustnessSettings& rs = cfg.robustness;
  RobustnessResult out;
  out.rows.resize(static_cast<std::size_t>(rs.trials));

  detail::parallel_for(static_cast<std::size_t>(rs.trials), jobs, [&](std::size_t t) {
    std::mt19937_64 rng = make_rng(cfg.seed, 0xb1a5 + t);

    std::uniform_int_distribution<std::size_t> pick_loss(0, rs.pinball_taus.size());
    const std::size_t li = pick_loss(rng);
    const Loss loss = li == 0 ? Loss::hinge() : Loss::pinball(rs.pinball_taus[li - 1]);
    const bool classification = loss.kind == LossKind::hinge;

    std::uniform_int_distribution<std::size_t> pick_b(0, rs.region_counts.size() - 1);
    const int target_regions = rs.region_counts[pick_b(rng)];

    SyntheticGenerator gen;
    if (classification) {
      gen.kind = GeneratorKind::two_cluster_classification;
      gen.separation = 2.0;
      gen.cluster_scale = 0.6;
      gen.flip_prob = 0.1;
    } else {
      gen.kind = GeneratorKind::piecewise_median_regression;
      gen.breakpoints = {1.0 / 3.0, 2.0 / 3.0};
      gen.levels = {0.5, -0.5, 1.0};
      gen.noise_scale = 0.3;
    }
    gen.dim = 1;
    gen.seed = derive_seed(cfg.seed, 0xda7a + t);
    const Dataset data = gen.sample(static_cast<std::size_t>(rs.train_points), 0);

    RegionalizationSpec rspec;
    rspec.method = RegionMethod::voronoi_overlap;
    rspec.target_regions = target_regions;
    rspec.overlap = 0.1;
    rspec.min_points = 3;
    rspec.seed = derive_seed(cfg.seed, 0x4e6 + t);
    const Regionalization reg = fit_regions(data, rspec);
    const std::size_t b_count = reg.region_count();
    const std::vector<Dataset> clean = assign_subsamples(reg, data);

    std::uniform_real_distribution<double> pick_lambda(rs.lambda_min, rs.lambda_max);
    std::uniform_real_distribution<double> pick_eps(0.0, rs.epsilon_max);
    const bool zero_trial = t % 10 == 0;
    std::vector<double> lambdas(b_count);
    std::vector<double> epsilons(b_count);
    for (std::size_t b = 0; b < b_count; ++b) {
      lambdas[b] = pick_lambda(rng);
      epsilons[b] = zero_trial ? 0.0 : pick_eps(rng);
    }

    ContaminationSpec cspec;
    cspec.epsilons = epsilons;
    cspec.seed = derive_seed(cfg.seed, t);
    for (std::size_t b = 0; b < b_count; ++b)
      cspec.contaminants.push_back(detail::make_contaminant(
          reg, b, clean[b], classification, rs.contaminant_points, rng));
    const std::vector<Dataset> dirty = contaminate(reg, clean, cspec);

    const WeightScheme weights;  // indicator average
    std::vector<LocalModel> clean_locals(b_count);
    std::vector<LocalModel> dirty_locals(b_count);
    for (std::size_t b = 0; b < b_count; ++b) {
      clean_locals[b] = train_local(clean[b], loss, cfg.kernel, lambdas[b], cfg.solver);
      clean_locals[b].region_index = static_cast<int>(b);
      dirty_locals[b] = train_local(dirty[b], loss, cfg.kernel, lambdas[b], cfg.solver);
      dirty_locals[b].region_index = static_cast<int>(b);
    }
    const ComposedModel clean_model(reg, std::move(clean_locals), weights);
    const ComposedModel dirty_model(reg, std::move(dirty_locals), weights);

    const Eigen::MatrixXd grid = evaluation_grid(reg, rs.grid_points);
    RobustnessTrialRow row;
    row.trial = static_cast<int>(t);
    row.loss = loss.kind == LossKind::hinge
                   ? std::string("hinge")
                   : "pinball(" + detail::format_double(loss.tau) + ")";
    row.region_count = static_cast<int>(b_count);
    row.epsilons = epsilons;
    row.lambdas = lambdas;
    row.bound = maxbias_bound(loss, std::vector<Kernel>(b_count, cfg.kernel),
                              lambdas, epsilons);
    row.empirical = empirical_maxbias(clean_model, dirty_model, grid);
    row.slack = 2.0 * cfg.solver.tol;
    row.pass = row.empirical <= row.bound + row.slack;
    out.rows[t] = row;
  });

  out.all_pass = true;
  for (const auto& row : out.rows) out.all_pass = out.all_pass && row.pass;
  return out;
}

// ---------------------------------------------------------------------------
// CSV reports. Every report opens with a comment line carrying the config
// hash and the master seed, then the column header and the data rows.
// ---------------------------------------------------------------------------

namespace detail {

inline std::ofstream open_report(const std::string& path,
                                 const std::string& config_hash,
                                 std::uint64_t master_seed) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << "# config_hash=" << config_hash << " master_seed=" << master_seed << '\n';
  return out;
}

}  // namespace detail

inline void write_region_report_csv(const std::vector<RegionReportRow>& rows,
                                    const std::string& path,
                                    const std::string& config_hash,
                                    std::uint64_t master_seed) {
  auto out = detail::open_report(path, config_hash, master_seed);
  out << "region,n_b,lambda,objective,objective_shifted,empty\n";
  for (const auto& r : rows)
    out << r.region << ',' << r.n_b << ',' << detail::format_double(r.lambda_b)
        << ',' << detail::format_double(r.objective) << ','
        << detail::format_double(r.objective_shifted) << ','
        << (r.empty_region ? "true" : "false") << '\n';
}

inline void write_consistency_csv(const ConsistencyResult& result,
                                  const std::string& path,
                                  const std::string& config_hash,
                                  std::uint64_t master_seed) {
  auto out = detail::open_report(path, config_hash, master_seed);
  out << "n,repetition,lambda,excess,stderr\n";
  for (const auto& r : result.rows)
    out << r.n << ',' << r.repetition << ',' << detail::format_double(r.lambda)
        << ',' << detail::format_double(r.excess) << ','
        << detail::format_double(r.stderr_) << '\n';
  for (const auto& [n, med] : result.medians)
    out << n << ",median,," << detail::format_double(med) << ",\n";
}

inline void write_robustness_csv(const RobustnessResult& result,
                                 const std::string& path,
                                 const std::string& config_hash,
                                 std::uint64_t master_seed,
                                 std::size_t grid_points = 2048) {
  auto out = detail::open_report(path, config_hash, master_seed);
  out << "# eval_grid=halton[2,3,5,...] points=" << grid_points
      << " domain=inflated_bounding_box\n";
  out << "trial,loss,B,epsilons,lambdas,bound,empirical,slack,pass\n";
  for (const auto& r : result.rows)
    out << r.trial << ',' << r.loss << ',' << r.region_count << ",\""
        << detail::join_doubles(r.epsilons) << "\",\""
        << detail::join_doubles(r.lambdas) << "\","
        << detail::format_double(r.bound) << ','
        << detail::format_double(r.empirical) << ','
        << detail::format_double(r.slack) << ',' << (r.pass ? "true" : "false")
        << '\n';
}

struct RiskReportRow {
  std::string experiment_id;
  std::size_t n = 0;
  double lambda = 0.0;
  std::size_t region_count = 0;
  double risk = 0.0;
  bool has_oracle = false;
  double bayes = 0.0;
  double excess = 0.0;
  double stderr_ = 0.0;
  std::uint64_t seed = 0;
};

inline void write_risk_report_csv(const std::vector<RiskReportRow>& rows,
                                  const std::string& path,
                                  const std::string& config_hash,
                                  std::uint64_t master_seed) {
  auto out = detail::open_report(path, config_hash, master_seed);
  out << "experiment_id,n,lambda,region_count,risk,bayes,excess,stderr,seed\n";
  for (const auto& r : rows) {
    out << r.experiment_id << ',' << r.n << ',' << detail::format_double(r.lambda)
        << ',' << r.region_count << ',' << detail::format_double(r.risk) << ',';
    if (r.has_oracle)
      out << detail::format_double(r.bayes) << ','
          << detail::format_double(r.excess) << ','
          << detail::format_double(r.stderr_);
    else
      out << ",,";
    out << ',' << r.seed << '\n';
  }
}

}  // namespace locsvm

#endif  // LOCSVM_EXPERIMENTS_HPP
