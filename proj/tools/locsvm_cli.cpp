// Command line frontend: train/predict/eval plus the consistency and
// robustness experiment drivers. All outputs are CSV/JSON files under the
// configured output directory.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "locsvm/locsvm.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  int jobs = 1;
  bool strict = false;
};

locsvm::ExperimentConfig load_with_overrides(const CommonArgs& args) {
  locsvm::ExperimentConfig cfg = locsvm::load_config(args.config_path);
  if (args.seed) cfg.seed = *args.seed;
  if (args.out_dir) cfg.output_dir = *args.out_dir;
  fs::create_directories(cfg.output_dir);
  return cfg;
}

locsvm::Dataset load_training_data(const locsvm::ExperimentConfig& cfg) {
  if (cfg.data_path) return locsvm::read_dataset_csv(*cfg.data_path);
  return cfg.generator->sample(cfg.train_size, locsvm::derive_seed(cfg.seed, 0));
}

int cmd_train(const CommonArgs& args) {
  const locsvm::ExperimentConfig cfg = load_with_overrides(args);
  const locsvm::Dataset data = load_training_data(cfg);
  const locsvm::TrainedComposite trained =
      locsvm::train_composite(data, cfg, args.jobs);

  const std::string model_path = cfg.output_dir + "/model.json";
  locsvm::save_model(trained.model, model_path);
  locsvm::write_region_report_csv(trained.report,
                                  cfg.output_dir + "/training_report.csv",
                                  cfg.config_hash(), cfg.seed);
  std::cout << "trained " << trained.model.region_count() << " regions on "
            << trained.train_sample_size << " observations (regionalization: "
            << trained.region_sample_size << "); model: " << model_path << '\n';
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& input_path,
                const std::string& output_path) {
  const locsvm::ComposedModel model = locsvm::load_model(model_path);
  const Eigen::MatrixXd xs = locsvm::read_features_csv(input_path);
  const std::vector<double> preds = locsvm::predict_batch(model, xs);
  std::ofstream out(output_path);
  if (!out) throw locsvm::io_error("cannot open '" + output_path + "' for writing");
  out << "prediction\n";
  for (double p : preds) out << locsvm::detail::format_double(p) << '\n';
  std::cout << "wrote " << preds.size() << " predictions to " << output_path << '\n';
  return 0;
}

int cmd_eval(const CommonArgs& args, const std::string& model_path) {
  const locsvm::ExperimentConfig cfg = load_with_overrides(args);
  const locsvm::ComposedModel model = locsvm::load_model(model_path);

  locsvm::RiskReportRow row;
  row.experiment_id = cfg.experiment_id;
  row.region_count = model.region_count();
  row.seed = cfg.seed;
  if (cfg.generator) {
    const auto oracle_ok =
        cfg.loss.kind == locsvm::LossKind::hinge ||
        (cfg.loss.kind == locsvm::LossKind::pinball && cfg.loss.tau == 0.5);
    row.n = cfg.consistency.mc_samples;
    row.lambda = cfg.schedule.at(row.n);
    if (oracle_ok) {
      const locsvm::ExcessRisk ex = locsvm::excess_risk(
          model, *cfg.generator, cfg.loss, cfg.consistency.mc_samples, cfg.seed);
      row.risk = ex.model_risk;
      row.bayes = ex.bayes_risk;
      row.excess = ex.excess;
      row.stderr_ = ex.stderr_;
      row.has_oracle = true;
    } else {
      row.risk = locsvm::mc_risk(model, *cfg.generator, cfg.loss, true,
                                 cfg.consistency.mc_samples, cfg.seed)
                     .mean;
    }
  } else {
    const locsvm::Dataset data = locsvm::read_dataset_csv(*cfg.data_path);
    row.n = data.size();
    row.lambda = cfg.schedule.at(row.n);
    row.risk = locsvm::empirical_risk(model, data, cfg.loss, /*shifted=*/true);
  }
  const std::string path = cfg.output_dir + "/risk_report.csv";
  locsvm::write_risk_report_csv({row}, path, cfg.config_hash(), cfg.seed);
  std::cout << "risk " << row.risk << (row.has_oracle ? " (excess " : "")
            << (row.has_oracle ? std::to_string(row.excess) + ")" : "")
            << "; report: " << path << '\n';
  return 0;
}

int cmd_consistency(const CommonArgs& args) {
  const locsvm::ExperimentConfig cfg = load_with_overrides(args);
  const locsvm::ConsistencyResult result = locsvm::run_consistency(cfg, args.jobs);
  const std::string path = cfg.output_dir + "/consistency_report.csv";
  locsvm::write_consistency_csv(result, path, cfg.config_hash(), cfg.seed);
  for (const auto& [n, med] : result.medians)
    std::cout << "n=" << n << " median excess " << med << '\n';
  std::cout << (result.trend_ok ? "trend check passed" : "trend check FAILED")
            << "; report: " << path << '\n';
  if (args.strict && !result.trend_ok) return 1;
  return 0;
}

int cmd_robustness(const CommonArgs& args) {
  const locsvm::ExperimentConfig cfg = load_with_overrides(args);
  const locsvm::RobustnessResult result = locsvm::run_robustness(cfg, args.jobs);
  const std::string path = cfg.output_dir + "/robustness_report.csv";
  locsvm::write_robustness_csv(result, path, cfg.config_hash(), cfg.seed,
                               cfg.robustness.grid_points);
  int violations = 0;
  for (const auto& r : result.rows) violations += r.pass ? 0 : 1;
  std::cout << result.rows.size() << " trials, " << violations
            << " dominance violations; report: " << path << '\n';
  return result.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Localized kernel learning: regional SVM training, composed "
               "prediction, and consistency/robustness experiments"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string model_path;
  std::string input_path;
  std::string output_path = "predictions.csv";

  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", args.config_path, "experiment config JSON");
    if (needs_config) opt->required();
    sub->add_option("--seed", args.seed, "master seed override");
    sub->add_option("--out", args.out_dir, "output directory override");
    sub->add_option("--jobs", args.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--strict", args.strict, "nonzero exit when a criterion check fails");
  };

  auto* train = app.add_subcommand("train", "fit regions, train local SVMs, write the model");
  add_common(train, true);

  auto* predict = app.add_subcommand("predict", "evaluate a model file on feature rows");
  predict->add_option("--model", model_path, "model JSON file")->required();
  predict->add_option("--input", input_path, "feature CSV (header x1,...,xd)")->required();
  predict->add_option("--output", output_path, "prediction CSV path");

  auto* eval = app.add_subcommand("eval", "report risks of a model file");
  add_common(eval, true);
  eval->add_option("--model", model_path, "model JSON file")->required();

  auto* consistency = app.add_subcommand("consistency", "excess-risk trend experiment");
  add_common(consistency, true);

  auto* robustness = app.add_subcommand("robustness", "contamination dominance trials");
  add_common(robustness, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(args);
    if (predict->parsed()) return cmd_predict(model_path, input_path, output_path);
    if (eval->parsed()) return cmd_eval(args, model_path);
    if (consistency->parsed()) return cmd_consistency(args);
    if (robustness->parsed()) return cmd_robustness(args);
  } catch (const locsvm::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const locsvm::io_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 2;
  } catch (const locsvm::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
