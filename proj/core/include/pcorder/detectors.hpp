#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pcorder/properties.hpp"

// Raw per-window detectors. All functions are pure; inputs are the normalized
// values of the rows inside one window, aligned by position for pairs.
namespace pcorder::detect {

/// Substitute bandwidth / neighbor scale for windows with zero spread.
inline constexpr double kBandwidthFallback = 1e-3;
/// Floor applied to the reference probability inside every KL log ratio.
inline constexpr double kProbabilityFloor = 1e-12;
inline constexpr int kDefaultFanBins = 20;

struct PearsonResult {
  double r = 0.0;
  /// sum (x - mean_x)(y - mean_y); routed to the variance properties.
  double covariance_numerator = 0.0;
};

PearsonResult pearson(std::span<const double> xs, std::span<const double> ys);

/// Fisher-Pearson coefficient m3 / m2^(3/2); 0 for constant input.
double skewness(std::span<const double> xs);

/// Linear-interpolated quantile at rank q * (n - 1) of a sorted sample.
double quantile_sorted(std::span<const double> sorted, double q);

/// Count of points outside the Tukey fences [Q1 - 1.5 IQR, Q3 + 1.5 IQR].
std::size_t outliers(std::span<const double> xs);

/// Population standard deviation, or kBandwidthFallback when it vanishes.
double window_bandwidth(std::span<const double> xs);

/// Gaussian KDE of `points` evaluated at `eval_at`, renormalized to a
/// probability vector over the evaluation points.
std::vector<double> kde_density(std::span<const double> points, std::span<const double> eval_at, double h);

/// KL divergence between the per-point KDE probability vectors of the two
/// axes, each with its own window bandwidth.
double density_change(std::span<const double> x_rows, std::span<const double> y_rows);

/// density_change of one primary window against several secondaries; the
/// primary-axis KDE is computed once.
std::vector<double> density_change_batch(std::span<const double> x_rows,
                                         std::span<const std::vector<double>> y_rows_per_axis);

/// Dense row-major square matrix.
struct SquareMatrix {
  std::size_t n = 0;
  std::vector<double> data;

  double operator()(std::size_t r, std::size_t c) const { return data[r * n + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data[r * n + c]; }
};

/// Row i holds p(x_j | x_i): Gaussian neighbor probabilities with scale
/// sigma, zero diagonal, rows summing to 1.
SquareMatrix neighborhood_probabilities(std::span<const double> points, double sigma);

/// Summed KL divergence between neighbor distributions on the two axes.
double clear_grouping(std::span<const double> x_rows, std::span<const double> y_rows);

/// clear_grouping of one primary window against several secondaries; each
/// primary-axis neighbor row is computed once.
std::vector<double> clear_grouping_batch(std::span<const double> x_rows,
                                         std::span<const std::vector<double>> y_rows_per_axis);

/// 1 - (angle extent / (pi/2)) of the line segments between the two axes.
double parallelism(std::span<const double> x_rows, std::span<const double> y_rows);

/// Fraction of `bins` equal bins on the secondary axis hit by the window.
double fan(std::span<const double> x_rows, std::span<const double> y_rows, int bins = kDefaultFanBins);

/// Raw, un-normalized value of one property on one window. `value` is null
/// for windows below the minimum population.
struct RawWindowValue {
  PropertyId property{};
  std::size_t window_index = 0;
  std::optional<double> value;
  std::size_t n_points = 0;
};

}  // namespace pcorder::detect
