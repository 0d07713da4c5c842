#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pcorder/data.hpp"
#include "pcorder/detectors.hpp"
#include "pcorder/properties.hpp"
#include "pcorder/scoring.hpp"
#include "pcorder/windows.hpp"

namespace pcorder {

/// Ordered axis pair: `primary` is the left PCP axis, `secondary` the right.
struct AxisPair {
  std::size_t primary = 0;
  std::size_t secondary = 0;

  bool operator==(const AxisPair&) const = default;
};

struct AnalysisOptions {
  std::uint64_t seed = 0;
  int permutations = kDefaultPermutations;
  int fan_bins = detect::kDefaultFanBins;
  /// Worker threads for the detector pass; 0 = hardware concurrency.
  unsigned threads = 0;

  bool operator==(const AnalysisOptions& o) const {
    return seed == o.seed && permutations == o.permutations && fan_bins == o.fan_bins;
  }
};

/// Normalized per-window property intensities for one ordered pair.
struct WindowProfile {
  AxisPair pair;
  std::vector<std::pair<double, double>> window_bounds;
  std::vector<std::size_t> n_points;
  PropertyMap<std::vector<std::optional<double>>> per_property;

  std::size_t window_count() const noexcept { return window_bounds.size(); }
};

/// Directed D x D heatmap of weighted property scores. Row-major; the
/// diagonal (and any cell outside a restricted view) is null.
struct ScoreMatrix {
  std::vector<std::string> dims;
  std::vector<std::optional<double>> cells;
  std::vector<std::optional<PropertyMap<double>>> breakdown;

  std::size_t size() const noexcept { return dims.size(); }
  const std::optional<double>& cell(std::size_t i, std::size_t j) const { return cells[i * dims.size() + j]; }
  std::optional<double>& cell(std::size_t i, std::size_t j) { return cells[i * dims.size() + j]; }
  const std::optional<PropertyMap<double>>& cell_breakdown(std::size_t i, std::size_t j) const {
    return breakdown[i * dims.size() + j];
  }
  std::size_t non_null_cells() const;

  /// Matrix with the given row-major cell values (diagonal ignored) and zero
  /// breakdowns; names default to "a0", "a1", ...
  static ScoreMatrix from_values(std::size_t d, std::span<const double> values);
};

/// Raw detector output and normalized profiles for every ordered axis pair
/// of a dataset at one window setting. Weight-independent, so it is computed
/// once and reused for every weight change.
///
/// Computation is two-phase: all raw window values first, then the pooled
/// normalization statistics, then per-window scores. Results do not depend
/// on thread scheduling.
class Analysis {
 public:
  static Analysis compute(const Dataset& dataset, const WindowSpec& spec, const AnalysisOptions& options = {});

  std::size_t dims() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t row_count() const noexcept { return row_count_; }
  const WindowSpec& spec() const noexcept { return spec_; }
  const AnalysisOptions& options() const noexcept { return options_; }

  const std::vector<Window>& windows(std::size_t axis) const;
  const WindowProfile& profile(AxisPair pair) const;
  /// Mean of the non-null window scores of every property on the pair.
  const PropertyMap<double>& breakdown(AxisPair pair) const;
  std::vector<detect::RawWindowValue> raw_values(AxisPair pair) const;

  /// Pool statistics, exposed for verification.
  const LogisticPool& grouping_pool() const noexcept { return grouping_pool_; }
  const MinMaxPool& density_pool() const noexcept { return density_pool_; }
  const MinMaxPool& outlier_pool() const noexcept { return outlier_pool_; }
  double variance_scale() const noexcept { return variance_scale_; }

  /// Rough resident size, for cache accounting.
  std::size_t approx_bytes() const;

  struct MarginalRaw {
    std::size_t n_points = 0;
    double skewness = 0.0;
    SignedScore skew_score;
    std::size_t outliers = 0;
  };
  struct PairRaw {
    std::size_t n_points = 0;
    double r = 0.0;
    double covariance_numerator = 0.0;
    double density_change = 0.0;
    double clear_grouping = 0.0;
    double parallelism = 0.0;
    double fan = 0.0;
  };

 private:
  std::size_t pair_index(AxisPair pair) const;

  std::vector<std::string> names_;
  std::size_t row_count_ = 0;
  WindowSpec spec_;
  AnalysisOptions options_;
  std::vector<std::vector<Window>> windows_;
  std::vector<std::vector<MarginalRaw>> marginal_;
  std::vector<std::vector<PairRaw>> pair_raw_;
  std::vector<WindowProfile> profiles_;
  std::vector<PropertyMap<double>> breakdowns_;
  LogisticPool grouping_pool_;
  MinMaxPool density_pool_;
  MinMaxPool outlier_pool_;
  double variance_scale_ = 0.0;
};

/// Seed of the skewness permutation stream for one (axis, window).
std::uint64_t window_seed(std::uint64_t seed, std::size_t axis, std::size_t window);

WindowProfile build_profile(const Dataset& dataset, AxisPair pair, const WindowSpec& spec,
                            const AnalysisOptions& options = {});

ScoreMatrix build_matrix(const Analysis& analysis, const Weights& weights);
ScoreMatrix build_matrix(const Dataset& dataset, const Weights& weights, const WindowSpec& spec,
                         const AnalysisOptions& options = {});

/// Weighted mean of a breakdown; the single formula behind every cell.
double weighted_cell(const PropertyMap<double>& breakdown, const Weights& weights);

}  // namespace pcorder
