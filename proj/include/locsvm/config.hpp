#ifndef LOCSVM_CONFIG_HPP
#define LOCSVM_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "locsvm/errors.hpp"
#include "locsvm/model_io.hpp"
#include "locsvm/numeric.hpp"
#include "locsvm/risk.hpp"
#include "locsvm/robustness.hpp"
#include "locsvm/solver.hpp"

namespace locsvm {

/// Regularization schedule lambda(n) = c * n^(-p). The exponent is confined
/// to (0, 1/2): then lambda_n -> 0 while lambda_n^2 * n = c^2 * n^(1-2p)
/// grows without bound, the regime in which composed predictors are risk
/// consistent.
struct LambdaSchedule {
  double c = 1.0;
  double p = 0.25;

  double at(std::size_t n) const {
    return c * std::pow(static_cast<double>(std::max<std::size_t>(n, 1)), -p);
  }
};

struct ConsistencySettings {
  std::size_t mc_samples = 100000;     // Monte Carlo draws for the Bayes oracle
  double trend_factor = 0.5;           // largest-n median must drop below this
                                       // fraction of the smallest-n median
  double absolute_threshold = 0.1;     // and below this absolute level
};

struct RobustnessSettings {
  int trials = 100;
  double epsilon_max = 0.4;
  double lambda_min = 0.05;
  double lambda_max = 2.0;
  std::size_t grid_points = 2048;
  int train_points = 90;       // observations per trial
  int contaminant_points = 10; // contaminant support points per region
  std::vector<int> region_counts = {1, 2, 3};
  std::vector<double> pinball_taus = {0.25, 0.5, 0.75};
};

struct ExperimentConfig {
  std::string experiment_id = "experiment";
  std::optional<std::string> data_path;
  std::optional<SyntheticGenerator> generator;
  double region_fraction = 0.2;  // share of the data used to fit regions
  RegionalizationSpec regionalization;
  Kernel kernel;
  Loss loss;
  LambdaSchedule schedule;
  SolverConfig solver;
  WeightScheme weights;
  std::vector<std::size_t> sample_sizes = {200, 800, 3200};
  int repetitions = 10;
  std::size_t train_size = 400;  // generator draws for the train command
  std::uint64_t seed = 0;
  std::string output_dir = ".";
  ConsistencySettings consistency;
  RobustnessSettings robustness;
  json raw;  // the parsed document, hashed into every report

  std::string config_hash() const {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(raw.dump())));
    return buf;
  }
};

namespace detail {

class ConfigErrors {
 public:
  void add(const std::string& field, const std::string& what) {
    messages_.push_back(field + ": " + what);
  }
  template <typename Fn>
  void guard(const std::string& field, Fn&& fn) {
    try {
      fn();
    } catch (const error& e) {
      add(field, e.what());
    } catch (const json::exception& e) {
      add(field, e.what());
    }
  }
  void raise_if_any() const {
    if (messages_.empty()) return;
    std::string all = "invalid config:";
    for (const auto& m : messages_) all += "\n  - " + m;
    throw config_error(all);
  }

 private:
  std::vector<std::string> messages_;
};

inline SyntheticGenerator generator_from_json(const json& j) {
  SyntheticGenerator gen;
  gen.kind = generator_kind_from_string(j.at("kind").get<std::string>());
  gen.noise = noise_kind_from_string(j.value("noise", "gaussian"));
  gen.seed = j.value("seed", std::uint64_t{0});
  const json params = j.value("params", json::object());
  gen.dim = params.value("dim", 1);
  if (gen.kind == GeneratorKind::piecewise_median_regression) {
    gen.breakpoints =
        params.value("breakpoints", std::vector<double>{1.0 / 3.0, 2.0 / 3.0});
    gen.levels = params.value("levels", std::vector<double>{0.5, -0.5, 1.0});
    gen.noise_scale = params.value("noise_scale", 0.2);
  } else {
    gen.separation = params.value("separation", 2.0);
    gen.cluster_scale = params.value("cluster_scale", 0.5);
    gen.flip_prob = params.value("flip_prob", 0.1);
  }
  gen.validate();
  return gen;
}

}  // namespace detail

/// Parses and validates an experiment configuration; all violations are
/// collected and reported together, one line per offending field.
inline ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  cfg.raw = j;
  detail::ConfigErrors errs;

  cfg.experiment_id = j.value("experiment_id", std::string("experiment"));
  if (j.contains("data") && j.contains("generator"))
    errs.add("data/generator", "config must name a dataset or a generator, not both");
  if (!j.contains("data") && !j.contains("generator"))
    errs.add("data/generator", "config must name a dataset path or a generator");
  if (j.contains("data"))
    errs.guard("data.path", [&] {
      cfg.data_path = j.at("data").at("path").get<std::string>();
    });
  if (j.contains("generator"))
    errs.guard("generator", [&] {
      cfg.generator = detail::generator_from_json(j.at("generator"));
    });

  errs.guard("split.region_fraction", [&] {
    cfg.region_fraction = j.value("split", json::object()).value("region_fraction", 0.2);
    if (!(cfg.region_fraction > 0.0 && cfg.region_fraction < 1.0))
      throw config_error("must lie strictly between 0 and 1");
  });

  errs.guard("regionalization", [&] {
    const json r = j.value("regionalization", json::object());
    cfg.regionalization.method =
        region_method_from_string(r.value("method", "voronoi_overlap"));
    cfg.regionalization.target_regions = r.value("target_regions", 1);
    cfg.regionalization.overlap = r.value("overlap", 0.0);
    cfg.regionalization.min_points = r.value("min_points", 1);
    cfg.regionalization.seed = r.value("seed", std::uint64_t{0});
    cfg.regionalization.validate();
  });

  errs.guard("kernel", [&] {
    if (j.contains("kernel")) cfg.kernel = kernel_from_json(j.at("kernel"));
  });
  errs.guard("loss", [&] {
    if (j.contains("loss")) cfg.loss = loss_from_json(j.at("loss"));
  });

  errs.guard("lambda_schedule", [&] {
    const json s = j.value("lambda_schedule", json::object());
    cfg.schedule.c = s.value("c", 1.0);
    cfg.schedule.p = s.value("p", 0.25);
    if (!(cfg.schedule.c > 0.0)) throw config_error("c must be > 0");
    if (!(cfg.schedule.p > 0.0 && cfg.schedule.p < 0.5))
      throw config_error("p must lie in the open interval (0, 0.5)");
  });

  errs.guard("solver", [&] {
    const json s = j.value("solver", json::object());
    cfg.solver.max_iters = s.value("max_iters", 50000);
    cfg.solver.tol = s.value("tol", 1e-10);
    cfg.solver.window = s.value("window", 500);
    cfg.solver.seed = s.value("seed", std::uint64_t{0});
    cfg.solver.validate();
  });

  errs.guard("weights", [&] {
    if (j.contains("weights")) cfg.weights = weight_scheme_from_json(j.at("weights"));
  });

  errs.guard("sample_sizes", [&] {
    cfg.sample_sizes =
        j.value("sample_sizes", std::vector<std::size_t>{200, 800, 3200});
    if (cfg.sample_sizes.empty()) throw config_error("must not be empty");
    for (std::size_t i = 0; i < cfg.sample_sizes.size(); ++i) {
      if (cfg.sample_sizes[i] < 2) throw config_error("sizes must be >= 2");
      if (i > 0 && cfg.sample_sizes[i] <= cfg.sample_sizes[i - 1])
        throw config_error("sizes must be strictly increasing");
    }
  });

  errs.guard("repetitions", [&] {
    cfg.repetitions = j.value("repetitions", 10);
    if (cfg.repetitions < 1) throw config_error("must be >= 1");
  });
  errs.guard("train_size", [&] {
    cfg.train_size = j.value("train_size", std::size_t{400});
    if (cfg.train_size < 2) throw config_error("must be >= 2");
  });

  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.output_dir = j.value("output_dir", std::string("."));

  errs.guard("consistency", [&] {
    const json c = j.value("consistency", json::object());
    cfg.consistency.mc_samples = c.value("mc_samples", std::size_t{100000});
    cfg.consistency.trend_factor = c.value("trend_factor", 0.5);
    cfg.consistency.absolute_threshold = c.value("absolute_threshold", 0.1);
    if (cfg.consistency.mc_samples < 10000)
      throw config_error("mc_samples must be >= 10000");
    if (!(cfg.consistency.trend_factor > 0.0))
      throw config_error("trend_factor must be > 0");
  });

  errs.guard("robustness", [&] {
    const json r = j.value("robustness", json::object());
    cfg.robustness.trials = r.value("trials", 100);
    cfg.robustness.epsilon_max = r.value("epsilon_max", 0.4);
    cfg.robustness.lambda_min = r.value("lambda_min", 0.05);
    cfg.robustness.lambda_max = r.value("lambda_max", 2.0);
    cfg.robustness.grid_points = r.value("grid_points", std::size_t{2048});
    cfg.robustness.train_points = r.value("train_points", 90);
    cfg.robustness.contaminant_points = r.value("contaminant_points", 10);
    cfg.robustness.region_counts =
        r.value("region_counts", std::vector<int>{1, 2, 3});
    cfg.robustness.pinball_taus =
        r.value("pinball_taus", std::vector<double>{0.25, 0.5, 0.75});
    if (cfg.robustness.trials < 1) throw config_error("trials must be >= 1");
    if (!(cfg.robustness.epsilon_max >= 0.0 && cfg.robustness.epsilon_max < 0.5))
      throw config_error("epsilon_max must lie in [0, 0.5)");
    if (!(cfg.robustness.lambda_min > 0.0 &&
          cfg.robustness.lambda_max >= cfg.robustness.lambda_min))
      throw config_error("need 0 < lambda_min <= lambda_max");
    if (cfg.robustness.grid_points < 1) throw config_error("grid_points must be >= 1");
    if (cfg.robustness.train_points < 4) throw config_error("train_points must be >= 4");
    if (cfg.robustness.contaminant_points < 1)
      throw config_error("contaminant_points must be >= 1");
    if (cfg.robustness.region_counts.empty())
      throw config_error("region_counts must not be empty");
    for (int b : cfg.robustness.region_counts)
      if (b < 1) throw config_error("region_counts entries must be >= 1");
    for (double t : cfg.robustness.pinball_taus)
      if (!(t > 0.0 && t < 1.0)) throw config_error("pinball taus must lie in (0,1)");
  });

  errs.raise_if_any();
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw io_error("config '" + path + "': " + e.what());
  }
  return parse_config(j);
}

}  // namespace locsvm

#endif  // LOCSVM_CONFIG_HPP
