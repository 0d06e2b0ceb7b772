#include "nsgp/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "nsgp/errors.hpp"

namespace nsgp {

double latent_1d(double x) {
  return (std::sin(5.0 * x) + std::cos(10.0 * x) +
          2.0 * (x - 0.4) * (x - 0.4) * std::cos(100.0 * x) + 2.597) /
         3.94;
}

double latent_linear_1d(double x) { return x; }

double latent_trig_1d(double x) {
  return 0.5 + 0.4 * std::sin(6.0 * std::numbers::pi * x);
}

double latent_varying_trig_1d(double x) {
  // Amplitude grows linearly, instantaneous frequency chirps upward.
  return 0.5 + 0.45 * x * std::sin(2.0 * std::numbers::pi * (2.0 * x + 6.0 * x * x));
}

namespace {

Dataset sample_latent(double (*f)(double), const std::string& name, int n_points,
                      double noise_variance, std::uint64_t seed) {
  if (n_points < 1) throw Error("synthetic dataset: n_points must be >= 1");
  if (noise_variance < 0.0) throw Error("synthetic dataset: negative noise variance");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Dataset ds;
  ds.name = name;
  ds.x.resize(n_points, 1);
  ds.y.resize(n_points);
  for (int i = 0; i < n_points; ++i) ds.x(i, 0) = unit(rng);
  const double noise_std = std::sqrt(noise_variance);
  for (int i = 0; i < n_points; ++i)
    ds.y[i] = f(ds.x(i, 0)) + noise_std * gauss(rng);

  // Inputs and latent image already live on the unit square.
  ds.normalization.x_min = Eigen::VectorXd::Zero(1);
  ds.normalization.x_max = Eigen::VectorXd::Ones(1);
  ds.normalization.y_min = 0.0;
  ds.normalization.y_max = 1.0;
  return ds;
}

}  // namespace

Dataset synth_1d(int n_points, double noise_variance, std::uint64_t seed) {
  return sample_latent(&latent_1d, "synth", n_points, noise_variance, seed);
}

Dataset synth_named(const std::string& kind, int n_points, double noise_variance,
                    std::uint64_t seed) {
  if (kind == "synth") return synth_1d(n_points, noise_variance, seed);
  if (kind == "synth-linear")
    return sample_latent(&latent_linear_1d, kind, n_points, noise_variance, seed);
  if (kind == "synth-trig")
    return sample_latent(&latent_trig_1d, kind, n_points, noise_variance, seed);
  if (kind == "synth-vartrig")
    return sample_latent(&latent_varying_trig_1d, kind, n_points, noise_variance, seed);
  throw DataError("unknown synthetic dataset '" + kind + "'");
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto begin = field.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
      fields.emplace_back();
    } else {
      const auto end = field.find_last_not_of(" \t\r");
      fields.push_back(field.substr(begin, end - begin + 1));
    }
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  try {
    std::size_t consumed = 0;
    out = std::stod(s, &consumed);
    return consumed == s.size();
  } catch (...) {
    return false;
  }
}

}  // namespace

Dataset normalize_dataset(const Eigen::MatrixXd& x_raw, const Eigen::VectorXd& y_raw,
                          const std::string& name,
                          std::vector<std::string>* warnings) {
  if (x_raw.rows() < 1) throw DataError("normalize_dataset: no rows");
  if (x_raw.rows() != y_raw.size())
    throw DimensionError("normalize_dataset: x rows and y entries differ");

  Dataset ds;
  ds.name = name;
  const Eigen::Index n = x_raw.rows(), d = x_raw.cols();
  ds.normalization.x_min = x_raw.colwise().minCoeff();
  ds.normalization.x_max = x_raw.colwise().maxCoeff();
  ds.normalization.y_min = y_raw.minCoeff();
  ds.normalization.y_max = y_raw.maxCoeff();

  ds.x.resize(n, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double lo = ds.normalization.x_min[j], hi = ds.normalization.x_max[j];
    if (hi > lo) {
      ds.x.col(j) = (x_raw.col(j).array() - lo) / (hi - lo);
    } else {
      ds.x.col(j).setConstant(0.5);
      if (warnings)
        warnings->push_back("input column " + std::to_string(j + 1) +
                            " is constant; normalized to 0.5");
    }
  }
  if (ds.normalization.y_max > ds.normalization.y_min) {
    ds.y = (y_raw.array() - ds.normalization.y_min) /
           (ds.normalization.y_max - ds.normalization.y_min);
  } else {
    ds.y = Eigen::VectorXd::Constant(n, 0.5);
    if (warnings) warnings->push_back("output column is constant; normalized to 0.5");
  }
  return ds;
}

Dataset load_csv(const std::string& path, int n_input_columns, CsvLoadInfo* info) {
  if (n_input_columns < 1) throw DataError("load_csv: n_input_columns must be >= 1");
  std::ifstream file(path);
  if (!file) throw DataError("load_csv: cannot open '" + path + "'");

  CsvLoadInfo local;
  CsvLoadInfo& stats = info ? *info : local;
  stats = CsvLoadInfo{};

  const int expected = n_input_columns + 1;
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  bool first_content_row = true;
  while (std::getline(file, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> fields = split_fields(line);

    if (first_content_row) {
      first_content_row = false;
      bool numeric = static_cast<int>(fields.size()) >= expected;
      double tmp;
      for (const auto& f : fields)
        if (!parse_double(f, tmp)) numeric = false;
      if (!numeric) {
        stats.had_header = true;
        continue;
      }
    }

    if (static_cast<int>(fields.size()) < expected)
      throw DataError("load_csv: row " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, expected at least " +
                      std::to_string(expected));

    std::vector<double> values(expected);
    bool finite = true;
    for (int j = 0; j < expected; ++j) {
      double v;
      if (!parse_double(fields[j], v))
        throw DataError("load_csv: row " + std::to_string(line_no) +
                        " has a non-numeric field '" + fields[j] + "'");
      if (!std::isfinite(v)) finite = false;
      values[j] = v;
    }
    if (!finite) {
      ++stats.dropped_rows;
      continue;
    }
    rows.push_back(std::move(values));
  }

  if (rows.empty()) throw DataError("load_csv: no valid rows in '" + path + "'");

  Eigen::MatrixXd x(rows.size(), n_input_columns);
  Eigen::VectorXd y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < n_input_columns; ++j) x(static_cast<Eigen::Index>(i), j) = rows[i][j];
    y[static_cast<Eigen::Index>(i)] = rows[i][n_input_columns];
  }
  return normalize_dataset(x, y, path, &stats.warnings);
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& dataset,
                                             double test_fraction,
                                             std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw Error("train_test_split: test_fraction must be in (0, 1)");
  const Eigen::Index n = dataset.rows();
  const Eigen::Index n_test =
      static_cast<Eigen::Index>(std::llround(static_cast<double>(n) * test_fraction));
  if (n_test < 1 || n_test >= n)
    throw Error("train_test_split: fraction leaves an empty side");

  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);

  auto take = [&](Eigen::Index begin, Eigen::Index count, const std::string& suffix) {
    Dataset part;
    part.name = dataset.name + suffix;
    part.normalization = dataset.normalization;
    part.x.resize(count, dataset.dim());
    part.y.resize(count);
    for (Eigen::Index i = 0; i < count; ++i) {
      part.x.row(i) = dataset.x.row(idx[begin + i]);
      part.y[i] = dataset.y[idx[begin + i]];
    }
    return part;
  };
  return {take(n_test, n - n_test, "/train"), take(0, n_test, "/test")};
}

Eigen::VectorXd normalize_x(const Normalization& norm, const Eigen::VectorXd& x_raw) {
  if (x_raw.size() != norm.x_min.size())
    throw DimensionError("normalize_x: dimension mismatch");
  Eigen::VectorXd out(x_raw.size());
  for (Eigen::Index j = 0; j < x_raw.size(); ++j) {
    const double span = norm.x_max[j] - norm.x_min[j];
    out[j] = span > 0.0 ? (x_raw[j] - norm.x_min[j]) / span : 0.5;
  }
  return out;
}

Eigen::VectorXd denormalize_x(const Normalization& norm, const Eigen::VectorXd& x_unit) {
  if (x_unit.size() != norm.x_min.size())
    throw DimensionError("denormalize_x: dimension mismatch");
  Eigen::VectorXd out(x_unit.size());
  for (Eigen::Index j = 0; j < x_unit.size(); ++j)
    out[j] = norm.x_min[j] + x_unit[j] * (norm.x_max[j] - norm.x_min[j]);
  return out;
}

double denormalize_y(const Normalization& norm, double y_unit) {
  return norm.y_min + y_unit * (norm.y_max - norm.y_min);
}

double denormalize_variance(const Normalization& norm, double var_unit) {
  const double span = norm.y_max - norm.y_min;
  return var_unit * span * span;
}

}  // namespace nsgp
