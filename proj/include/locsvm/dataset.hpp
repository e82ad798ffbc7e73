#ifndef LOCSVM_DATASET_HPP
#define LOCSVM_DATASET_HPP

#include <Eigen/Core>
#include <charconv>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "locsvm/errors.hpp"

namespace locsvm {

/// Weighted sample of (x, y) pairs. Weights are nonnegative and sum to one,
/// which makes the dataset an empirical probability measure; plain i.i.d.
/// samples carry uniform weights 1/n.
struct Dataset {
  Eigen::MatrixXd x;  // n x d, one row per observation
  Eigen::VectorXd y;  // n
  Eigen::VectorXd w;  // n, nonnegative, sums to 1 for nonempty data

  Dataset() = default;
  Dataset(Eigen::MatrixXd xs, Eigen::VectorXd ys)
      : x(std::move(xs)), y(std::move(ys)) {
    w = Eigen::VectorXd::Constant(y.size(), y.size() > 0 ? 1.0 / y.size() : 0.0);
  }
  Dataset(Eigen::MatrixXd xs, Eigen::VectorXd ys, Eigen::VectorXd ws)
      : x(std::move(xs)), y(std::move(ys)), w(std::move(ws)) {}

  std::size_t size() const { return static_cast<std::size_t>(y.size()); }
  std::size_t dim() const { return static_cast<std::size_t>(x.cols()); }
  bool empty() const { return size() == 0; }

  double weight_sum() const { return size() ? w.sum() : 0.0; }
};

namespace detail {

inline double parse_number(const std::string& field, std::size_t line_no,
                           std::size_t col_no) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw io_error("CSV line " + std::to_string(line_no) + ", column " +
                   std::to_string(col_no) + ": not a number: '" + field + "'");
  }
  return value;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace detail

/// Reads a dataset from CSV with header `x1,...,xd,y`. Rows with missing or
/// non-numeric values are rejected with the offending line number.
inline Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "' for reading");

  std::string line;
  if (!std::getline(in, line)) throw io_error("'" + path + "': empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = detail::split_csv_line(line);
  if (header.size() < 2 || header.back() != "y")
    throw io_error("'" + path + "' line 1: header must be x1,...,xd,y");
  for (std::size_t j = 0; j + 1 < header.size(); ++j) {
    if (header[j] != "x" + std::to_string(j + 1))
      throw io_error("'" + path + "' line 1: expected column 'x" +
                     std::to_string(j + 1) + "', found '" + header[j] + "'");
  }
  const std::size_t d = header.size() - 1;

  std::vector<double> xs;
  std::vector<double> ys;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != d + 1)
      throw io_error("'" + path + "' line " + std::to_string(line_no) +
                     ": expected " + std::to_string(d + 1) + " fields, found " +
                     std::to_string(fields.size()));
    for (std::size_t j = 0; j < d; ++j)
      xs.push_back(detail::parse_number(fields[j], line_no, j + 1));
    ys.push_back(detail::parse_number(fields[d], line_no, d + 1));
  }

  const std::size_t n = ys.size();
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x(i, j) = xs[i * d + j];
    y(i) = ys[i];
  }
  return Dataset(std::move(x), std::move(y));
}

/// Reads a feature matrix from CSV with header `x1,...,xd` (no label
/// column); same strictness as read_dataset_csv.
inline Eigen::MatrixXd read_features_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "' for reading");

  std::string line;
  if (!std::getline(in, line)) throw io_error("'" + path + "': empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_csv_line(line);
  if (header.empty()) throw io_error("'" + path + "' line 1: empty header");
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] != "x" + std::to_string(j + 1))
      throw io_error("'" + path + "' line 1: expected column 'x" +
                     std::to_string(j + 1) + "', found '" + header[j] + "'");
  }
  const std::size_t d = header.size();

  std::vector<double> xs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != d)
      throw io_error("'" + path + "' line " + std::to_string(line_no) +
                     ": expected " + std::to_string(d) + " fields, found " +
                     std::to_string(fields.size()));
    for (std::size_t j = 0; j < d; ++j)
      xs.push_back(detail::parse_number(fields[j], line_no, j + 1));
  }
  const std::size_t n = xs.size() / d;
  Eigen::MatrixXd x(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) x(i, j) = xs[i * d + j];
  return x;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  for (std::size_t j = 0; j < data.dim(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < data.dim(); ++j)
      out << detail::format_double(data.x(i, j)) << ',';
    out << detail::format_double(data.y(i)) << '\n';
  }
}

}  // namespace locsvm

#endif  // LOCSVM_DATASET_HPP
