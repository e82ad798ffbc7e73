#ifndef LOCSVM_MODEL_IO_HPP
#define LOCSVM_MODEL_IO_HPP

#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "locsvm/composer.hpp"
#include "locsvm/errors.hpp"
#include "locsvm/kernel.hpp"
#include "locsvm/loss.hpp"
#include "locsvm/regionalization.hpp"
#include "locsvm/solver.hpp"

namespace locsvm {

using json = nlohmann::json;

// JSON dumps order keys alphabetically and print doubles in shortest
// round-trip form, so identical models serialize to identical bytes and
// every stored real parses back to the same double.

inline json kernel_to_json(const Kernel& k) {
  return json{{"kind", to_string(k.kind)}, {"gamma", k.gamma}};
}

inline Kernel kernel_from_json(const json& j) {
  return Kernel(kernel_kind_from_string(j.at("kind").get<std::string>()),
                j.at("gamma").get<double>());
}

inline json loss_to_json(const Loss& l) {
  json params = json::object();
  if (l.kind == LossKind::pinball) params["tau"] = l.tau;
  if (l.kind == LossKind::eps_insensitive) params["eps"] = l.eps;
  return json{{"kind", to_string(l.kind)}, {"params", params}};
}

inline Loss loss_from_json(const json& j) {
  const LossKind kind = loss_kind_from_string(j.at("kind").get<std::string>());
  const json params = j.value("params", json::object());
  switch (kind) {
    case LossKind::hinge: return Loss::hinge();
    case LossKind::pinball: {
      if (!params.contains("tau"))
        throw config_error("pinball loss needs params.tau");
      return Loss::pinball(params.at("tau").get<double>());
    }
    case LossKind::eps_insensitive:
      return Loss::eps_insensitive(params.value("eps", 0.0));
    case LossKind::least_squares: return Loss::least_squares();
  }
  throw config_error("unreachable loss kind");
}

namespace detail {

inline json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Eigen::VectorXd vector_from_json(const json& a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v(i) = a[i].get<double>();
  return v;
}

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    rows.push_back(vector_to_json(m.row(i).transpose()));
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const json& rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    m.row(i) = vector_from_json(rows[i]).transpose();
  return m;
}

}  // namespace detail

inline json regionalization_to_json(const Regionalization& reg) {
  json regions = json::array();
  for (const Region& r : reg.regions) {
    json jr = json::object();
    if (reg.method == RegionMethod::voronoi_overlap) {
      jr["center"] = detail::vector_to_json(r.center);
    } else {
      jr["box_lo"] = detail::vector_to_json(r.box_lo);
      jr["box_hi"] = detail::vector_to_json(r.box_hi);
      jr["center"] = detail::vector_to_json(r.center);
    }
    regions.push_back(std::move(jr));
  }
  return json{{"method", to_string(reg.method)},
              {"overlap", reg.overlap},
              {"seed", reg.seed},
              {"bounds_lo", detail::vector_to_json(reg.bounds_lo)},
              {"bounds_hi", detail::vector_to_json(reg.bounds_hi)},
              {"regions", regions}};
}

inline Regionalization regionalization_from_json(const json& j) {
  Regionalization reg;
  reg.method = region_method_from_string(j.at("method").get<std::string>());
  reg.overlap = j.at("overlap").get<double>();
  reg.seed = j.at("seed").get<std::uint64_t>();
  reg.bounds_lo = detail::vector_from_json(j.at("bounds_lo"));
  reg.bounds_hi = detail::vector_from_json(j.at("bounds_hi"));
  for (const json& jr : j.at("regions")) {
    Region r;
    r.center = detail::vector_from_json(jr.at("center"));
    if (reg.method == RegionMethod::grid_overlap) {
      r.box_lo = detail::vector_from_json(jr.at("box_lo"));
      r.box_hi = detail::vector_from_json(jr.at("box_hi"));
    }
    reg.regions.push_back(std::move(r));
  }
  return reg;
}

inline json weight_scheme_to_json(const WeightScheme& s) {
  json j{{"kind", to_string(s.kind)}};
  if (s.kind == WeightKind::theta_weighted) j["thetas"] = s.thetas;
  return j;
}

inline WeightScheme weight_scheme_from_json(const json& j) {
  WeightScheme s;
  s.kind = weight_kind_from_string(j.at("kind").get<std::string>());
  if (s.kind == WeightKind::theta_weighted)
    s.thetas = j.at("thetas").get<std::vector<double>>();
  return s;
}

inline json local_model_to_json(const LocalModel& m) {
  return json{{"region_index", m.region_index},
              {"lambda", m.lambda},
              {"empty_region", m.empty_region},
              {"kernel", kernel_to_json(m.expansion.kernel)},
              {"loss", loss_to_json(m.loss)},
              {"objective", m.objective_value},
              {"objective_shifted", m.objective_value_shifted},
              {"points", detail::matrix_to_json(m.expansion.points)},
              {"coefficients", detail::vector_to_json(m.expansion.coefficients)}};
}

inline LocalModel local_model_from_json(const json& j, Eigen::Index dim) {
  LocalModel m;
  m.region_index = j.at("region_index").get<int>();
  m.lambda = j.at("lambda").get<double>();
  m.empty_region = j.at("empty_region").get<bool>();
  m.loss = loss_from_json(j.at("loss"));
  m.objective_value = j.at("objective").get<double>();
  m.objective_value_shifted = j.at("objective_shifted").get<double>();
  m.expansion = KernelExpansion(kernel_from_json(j.at("kernel")),
                                detail::matrix_from_json(j.at("points"), dim),
                                detail::vector_from_json(j.at("coefficients")));
  return m;
}

inline json model_to_json(const ComposedModel& model) {
  json locals = json::array();
  for (const LocalModel& m : model.locals) locals.push_back(local_model_to_json(m));
  return json{{"format", "locsvm-model"},
              {"version", 1},
              {"dimension", model.regionalization.dim()},
              {"regionalization", regionalization_to_json(model.regionalization)},
              {"scheme", weight_scheme_to_json(model.scheme)},
              {"locals", locals}};
}

inline ComposedModel model_from_json(const json& j) {
  if (j.value("format", "") != "locsvm-model")
    throw io_error("not a locsvm model file");
  if (j.value("version", 0) != 1)
    throw io_error("unsupported model version " + j.value("version", json()).dump());
  const Eigen::Index dim = j.at("dimension").get<Eigen::Index>();
  Regionalization reg = regionalization_from_json(j.at("regionalization"));
  WeightScheme scheme = weight_scheme_from_json(j.at("scheme"));
  std::vector<LocalModel> locals;
  for (const json& jm : j.at("locals")) locals.push_back(local_model_from_json(jm, dim));
  return ComposedModel(std::move(reg), std::move(locals), std::move(scheme));
}

inline void save_model(const ComposedModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << model_to_json(model).dump(2) << '\n';
}

inline ComposedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "' for reading");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw io_error("'" + path + "': " + e.what());
  }
  return model_from_json(j);
}

}  // namespace locsvm

#endif  // LOCSVM_MODEL_IO_HPP
