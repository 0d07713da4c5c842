#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcorder/properties.hpp"

namespace pcorder {

inline constexpr int kDefaultPermutations = 200;

/// Per-property weights in [0,1], as set by the sidebar sliders.
class Weights {
 public:
  Weights() = default;

  /// Parses "pos_corr=1.0,fan=0.5"; unnamed properties stay 0.
  static Weights parse(std::string_view text);
  static Weights single(PropertyId p, double w = 1.0);

  double operator[](PropertyId p) const { return values_[p]; }
  void set(PropertyId p, double w);

  bool any_active() const;
  double total() const;
  /// Throws Error(NoActiveProperties) when every weight is zero.
  void require_active() const;

  const PropertyMap<double>& values() const noexcept { return values_; }
  /// Canonical "key=value" list of the nonzero weights.
  std::string to_string() const;

  bool operator==(const Weights&) const = default;

 private:
  PropertyMap<double> values_{};
};

/// A signed raw statistic split into a positive and a negative [0,1] score;
/// at most one side is nonzero.
struct SignedScore {
  double pos = 0.0;
  double neg = 0.0;
};

/// Two-sided p-value of the correlation t-test with n - 2 degrees of freedom.
double correlation_p_value(double r, std::size_t n);

/// Confidence-adjusted correlation: |r| * (1 - p), routed by sign.
SignedScore normalize_correlation(double r, std::size_t n);

/// Sign-flip permutation test of the skewness `g` of `xs`: score
/// min(|g|, 1) * (1 - p), routed by sign. Reproducible for a given seed.
SignedScore normalize_skewness(double g, std::span<const double> xs, int permutations, std::uint64_t seed);

/// z-score of a raw clear-grouping divergence against its dataset-wide pool,
/// mapped through a logistic so that low divergence reads as high grouping.
class LogisticPool {
 public:
  static LogisticPool fit(std::span<const double> pooled);

  double mean() const noexcept { return mean_; }
  double stddev() const noexcept { return stddev_; }
  bool degenerate() const noexcept { return degenerate_; }

  double clear_grouping(double raw) const;
  static double split_up(double clear_grouping) { return 1.0 - clear_grouping; }

 private:
  double mean_ = 0.0;
  double stddev_ = 0.0;
  bool degenerate_ = true;
};

/// Min-max scaling against a pooled sample.
class MinMaxPool {
 public:
  static MinMaxPool fit(std::span<const double> pooled, double degenerate_value);

  double operator()(double raw) const;
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
  double degenerate_value_ = 0.0;
};

/// Scales a Pargnostics-style score down when the window holds fewer points
/// than a uniform spread would put in it.
double scale_pargnostics(double value, std::size_t n_window, std::size_t n_total, double window_fraction);

}  // namespace pcorder
