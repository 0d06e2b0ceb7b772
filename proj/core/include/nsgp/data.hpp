#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace nsgp {

/// Per-column input ranges and the output range used to map a dataset onto
/// the unit cube. Kept so predictions can be mapped back to original units.
struct Normalization {
  Eigen::VectorXd x_min;
  Eigen::VectorXd x_max;
  double y_min = 0.0;
  double y_max = 1.0;
};

struct Dataset {
  Eigen::MatrixXd x;  // N x n, normalized to [0,1]
  Eigen::VectorXd y;  // N, normalized to [0,1]
  Normalization normalization;
  std::string name;

  Eigen::Index rows() const noexcept { return x.rows(); }
  Eigen::Index dim() const noexcept { return x.cols(); }
};

/// The 1-D synthetic latent function
/// (sin(5x) + cos(10x) + 2 (x-0.4)^2 cos(100x) + 2.597) / 3.94,
/// which maps [0,1] into [0,1].
double latent_1d(double x);

/// Companion test signals for the non-stationarity diagnostics: a pure linear
/// ramp, a constant-amplitude oscillation, and a chirp with growing amplitude
/// and frequency.
double latent_linear_1d(double x);
double latent_trig_1d(double x);
double latent_varying_trig_1d(double x);

/// x ~ U[0,1], y = latent_1d(x) + eps with eps ~ N(0, noise_variance).
/// Normalization is the identity; the latent already lives on the unit square.
Dataset synth_1d(int n_points = 50, double noise_variance = 1e-3,
                 std::uint64_t seed = 0);

/// Named synthetic datasets: "synth", "synth-linear", "synth-trig",
/// "synth-vartrig".
Dataset synth_named(const std::string& kind, int n_points, double noise_variance,
                    std::uint64_t seed);

struct CsvLoadInfo {
  int dropped_rows = 0;
  bool had_header = false;
  std::vector<std::string> warnings;
};

/// Comma-separated numeric file: the first n_input_columns columns are
/// inputs, the next column is the output. A non-numeric first row is treated
/// as a header. Rows containing non-finite values are dropped (counted in
/// info); ragged or non-numeric rows are structured errors naming the row.
/// The result is normalized to the unit cube with the ranges stored.
Dataset load_csv(const std::string& path, int n_input_columns,
                 CsvLoadInfo* info = nullptr);

/// Normalize raw columns onto [0,1]; constant columns map to 0.5 with a
/// warning recorded in *warnings when given.
Dataset normalize_dataset(const Eigen::MatrixXd& x_raw, const Eigen::VectorXd& y_raw,
                          const std::string& name,
                          std::vector<std::string>* warnings = nullptr);

/// Disjoint, exhaustive, seed-deterministic split.
std::pair<Dataset, Dataset> train_test_split(const Dataset& dataset,
                                             double test_fraction,
                                             std::uint64_t seed);

Eigen::VectorXd normalize_x(const Normalization& norm, const Eigen::VectorXd& x_raw);
Eigen::VectorXd denormalize_x(const Normalization& norm, const Eigen::VectorXd& x_unit);
double denormalize_y(const Normalization& norm, double y_unit);
double denormalize_variance(const Normalization& norm, double var_unit);

}  // namespace nsgp
