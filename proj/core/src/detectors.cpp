#include "pcorder/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pcorder/error.hpp"

namespace pcorder::detect {

namespace {

bool all_equal(std::span<const double> xs) {
  return std::adjacent_find(xs.begin(), xs.end(), std::not_equal_to<>()) == xs.end();
}

double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double v : xs) s += v;
  return s / static_cast<double>(xs.size());
}

void require_aligned(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "paired series differ in length (" + std::to_string(xs.size()) + " vs " +
                    std::to_string(ys.size()) + ")");
  }
}

// Fills `row` with exp(-(d_j - min d)) for the scaled squared distances from
// points[i] to every other point and returns log of the normalizer, so that
// p_j = row[j] / sum and log p_j = -(d_j - min d) - log(sum).
struct NeighborRow {
  std::vector<double> weight;  // unnormalized, diagonal 0
  std::vector<double> shifted; // d_j - min d, diagonal unused
  double sum = 0.0;
  double log_sum = 0.0;
};

void neighbor_row(std::span<const double> points, std::size_t i, double inv_sigma2, NeighborRow& row) {
  const std::size_t n = points.size();
  row.weight.assign(n, 0.0);
  row.shifted.assign(n, 0.0);
  double min_d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    const double diff = points[i] - points[j];
    const double d = diff * diff * inv_sigma2;
    row.shifted[j] = d;
    min_d = std::min(min_d, d);
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    row.shifted[j] -= min_d;
    row.weight[j] = std::exp(-row.shifted[j]);
    sum += row.weight[j];
  }
  row.sum = sum;
  row.log_sum = std::log(sum);
}

}  // namespace

PearsonResult pearson(std::span<const double> xs, std::span<const double> ys) {
  require_aligned(xs, ys);
  if (xs.empty() || all_equal(xs) || all_equal(ys)) return {};
  const double mx = mean_of(xs);
  const double my = mean_of(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  const double denom = std::sqrt(sxx) * std::sqrt(syy);
  if (!(denom > 0.0)) return {};
  return {std::clamp(sxy / denom, -1.0, 1.0), sxy};
}

double skewness(std::span<const double> xs) {
  if (xs.empty() || all_equal(xs)) return 0.0;
  const double m = mean_of(xs);
  double m2 = 0.0, m3 = 0.0;
  for (double v : xs) {
    const double d = v - m;
    m2 += d * d;
    m3 += d * d * d;
  }
  const double n = static_cast<double>(xs.size());
  m2 /= n;
  m3 /= n;
  if (!(m2 > 0.0)) return 0.0;
  return m3 / std::pow(m2, 1.5);
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double rank = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::size_t outliers(std::span<const double> xs) {
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double q1 = quantile_sorted(sorted, 0.25);
  const double q3 = quantile_sorted(sorted, 0.75);
  const double iqr = q3 - q1;
  const double lo = q1 - 1.5 * iqr;
  const double hi = q3 + 1.5 * iqr;
  return static_cast<std::size_t>(
      std::count_if(xs.begin(), xs.end(), [&](double v) { return v < lo || v > hi; }));
}

double window_bandwidth(std::span<const double> xs) {
  if (xs.size() < 2 || all_equal(xs)) return kBandwidthFallback;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double v : xs) ss += (v - m) * (v - m);
  const double sd = std::sqrt(ss / static_cast<double>(xs.size()));
  return sd > 0.0 ? sd : kBandwidthFallback;
}

std::vector<double> kde_density(std::span<const double> points, std::span<const double> eval_at, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::ZeroBandwidth, "KDE bandwidth must be positive", {{"h", h}});
  }
  if (points.empty()) return std::vector<double>(eval_at.size(), 0.0);

  // Sums are taken relative to each evaluation point's nearest sample so that
  // narrow bandwidths cannot underflow to an all-zero density.
  const double inv_2h2 = 1.0 / (2.0 * h * h);
  const double log_norm = -std::log(static_cast<double>(points.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  std::vector<double> log_density(eval_at.size());
  for (std::size_t j = 0; j < eval_at.size(); ++j) {
    double min_d = std::numeric_limits<double>::infinity();
    for (double p : points) {
      const double diff = eval_at[j] - p;
      min_d = std::min(min_d, diff * diff * inv_2h2);
    }
    double s = 0.0;
    for (double p : points) {
      const double diff = eval_at[j] - p;
      s += std::exp(-(diff * diff * inv_2h2 - min_d));
    }
    log_density[j] = log_norm - min_d + std::log(s);
  }

  std::vector<double> out(eval_at.size(), 0.0);
  if (eval_at.empty()) return out;
  const double top = *std::max_element(log_density.begin(), log_density.end());
  double total = 0.0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = std::exp(log_density[j] - top);
    total += out[j];
  }
  for (double& v : out) v /= total;
  return out;
}

double density_change(std::span<const double> x_rows, std::span<const double> y_rows) {
  require_aligned(x_rows, y_rows);
  const std::vector<double> ys(y_rows.begin(), y_rows.end());
  return density_change_batch(x_rows, std::span<const std::vector<double>>(&ys, 1)).front();
}

std::vector<double> density_change_batch(std::span<const double> x_rows,
                                         std::span<const std::vector<double>> y_rows_per_axis) {
  const auto px = kde_density(x_rows, x_rows, window_bandwidth(x_rows));
  std::vector<double> out;
  out.reserve(y_rows_per_axis.size());
  for (const auto& y_rows : y_rows_per_axis) {
    require_aligned(x_rows, y_rows);
    const auto py = kde_density(y_rows, y_rows, window_bandwidth(y_rows));
    double d = 0.0;
    for (std::size_t i = 0; i < px.size(); ++i) {
      if (px[i] <= 0.0) continue;
      d += px[i] * std::log(px[i] / std::max(py[i], kProbabilityFloor));
    }
    out.push_back(std::max(d, 0.0));
  }
  return out;
}

SquareMatrix neighborhood_probabilities(std::span<const double> points, double sigma) {
  const std::size_t n = points.size();
  SquareMatrix m{n, std::vector<double>(n * n, 0.0)};
  if (n < 2) return m;
  const double inv_sigma2 = 1.0 / (sigma * sigma);
  NeighborRow row;
  for (std::size_t i = 0; i < n; ++i) {
    neighbor_row(points, i, inv_sigma2, row);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) m(i, j) = row.weight[j] / row.sum;
    }
  }
  return m;
}

double clear_grouping(std::span<const double> x_rows, std::span<const double> y_rows) {
  require_aligned(x_rows, y_rows);
  const std::vector<double> ys(y_rows.begin(), y_rows.end());
  return clear_grouping_batch(x_rows, std::span<const std::vector<double>>(&ys, 1)).front();
}

std::vector<double> clear_grouping_batch(std::span<const double> x_rows,
                                         std::span<const std::vector<double>> y_rows_per_axis) {
  const std::size_t n = x_rows.size();
  const std::size_t k = y_rows_per_axis.size();
  std::vector<double> totals(k, 0.0);
  for (const auto& y_rows : y_rows_per_axis) require_aligned(x_rows, y_rows);
  if (n < 2) return totals;

  const double sx = window_bandwidth(x_rows);
  const double inv_sx2 = 1.0 / (sx * sx);
  std::vector<double> inv_sy2(k);
  for (std::size_t a = 0; a < k; ++a) {
    const double sy = window_bandwidth(y_rows_per_axis[a]);
    inv_sy2[a] = 1.0 / (sy * sy);
  }
  const double log_floor = std::log(kProbabilityFloor);

  NeighborRow rx, ry;
  for (std::size_t i = 0; i < n; ++i) {
    neighbor_row(x_rows, i, inv_sx2, rx);
    for (std::size_t a = 0; a < k; ++a) {
      neighbor_row(y_rows_per_axis[a], i, inv_sy2[a], ry);
      double row_total = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double p = rx.weight[j] / rx.sum;
        if (p <= 0.0) continue;
        const double log_p = -rx.shifted[j] - rx.log_sum;
        const double log_q = std::max(-ry.shifted[j] - ry.log_sum, log_floor);
        row_total += p * (log_p - log_q);
      }
      totals[a] += row_total;
    }
  }
  for (double& t : totals) t = std::max(t, 0.0);
  return totals;
}

double parallelism(std::span<const double> x_rows, std::span<const double> y_rows) {
  require_aligned(x_rows, y_rows);
  if (x_rows.empty()) return 1.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < x_rows.size(); ++i) {
    const double angle = std::atan(y_rows[i] - x_rows[i]);
    lo = std::min(lo, angle);
    hi = std::max(hi, angle);
  }
  return std::clamp(1.0 - (hi - lo) / (std::numbers::pi / 2.0), 0.0, 1.0);
}

double fan(std::span<const double> x_rows, std::span<const double> y_rows, int bins) {
  require_aligned(x_rows, y_rows);
  if (bins < 1) throw Error(ErrorCode::BadRequest, "fan needs at least one bin");
  std::vector<bool> hit(static_cast<std::size_t>(bins), false);
  for (double y : y_rows) {
    const double v = std::clamp(y, 0.0, 1.0);
    const auto b = std::min(static_cast<std::size_t>(v * bins), hit.size() - 1);
    hit[b] = true;
  }
  const auto occupied = std::count(hit.begin(), hit.end(), true);
  return static_cast<double>(occupied) / static_cast<double>(bins);
}

}  // namespace pcorder::detect
