#include "pcorder/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "pcorder/error.hpp"
#include "pcorder/stats.hpp"

namespace pcorder {

namespace {

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

void gather(const Column& col, const std::vector<std::size_t>& rows, std::vector<double>& out) {
  out.resize(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) out[k] = col.normalized[rows[k]];
}

}  // namespace

std::uint64_t window_seed(std::uint64_t seed, std::size_t axis, std::size_t window) {
  std::uint64_t h = stats::splitmix64(seed);
  h = stats::splitmix64(h ^ static_cast<std::uint64_t>(axis));
  return stats::splitmix64(h ^ (static_cast<std::uint64_t>(window) << 32));
}

std::size_t ScoreMatrix::non_null_cells() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const auto& c) { return c.has_value(); }));
}

ScoreMatrix ScoreMatrix::from_values(std::size_t d, std::span<const double> values) {
  if (values.size() != d * d) throw Error(ErrorCode::LengthMismatch, "matrix needs d*d values");
  ScoreMatrix m;
  for (std::size_t i = 0; i < d; ++i) m.dims.push_back("a" + std::to_string(i));
  m.cells.resize(d * d);
  m.breakdown.resize(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (i == j) continue;
      m.cells[i * d + j] = values[i * d + j];
      m.breakdown[i * d + j] = PropertyMap<double>{};
    }
  }
  return m;
}

Analysis Analysis::compute(const Dataset& dataset, const WindowSpec& spec, const AnalysisOptions& options) {
  spec.validate();
  const std::size_t d = dataset.dims();
  if (d < 2) throw Error(ErrorCode::EmptyMatrix, "need at least two axes", {{"dims", d}});
  if (options.permutations < 1) throw Error(ErrorCode::BadRequest, "permutations must be positive");
  if (options.fan_bins < 2) throw Error(ErrorCode::BadRequest, "fan needs at least two bins");

  Analysis a;
  a.names_ = dataset.column_names();
  a.row_count_ = dataset.row_count();
  a.spec_ = spec;
  a.options_ = options;

  a.windows_.resize(d);
  for (std::size_t axis = 0; axis < d; ++axis) a.windows_[axis] = make_windows(dataset.column(axis), spec);
  const std::size_t w_count = a.windows_.front().size();

  // Phase 1: raw detector values.
  a.marginal_.assign(d, std::vector<MarginalRaw>(w_count));
  parallel_for(d * w_count, options.threads, [&](std::size_t task) {
    const std::size_t axis = task / w_count;
    const std::size_t w = task % w_count;
    const Window& win = a.windows_[axis][w];
    MarginalRaw& out = a.marginal_[axis][w];
    out.n_points = win.member_rows.size();
    if (!win.populated()) return;
    std::vector<double> xs;
    gather(dataset.column(axis), win.member_rows, xs);
    out.skewness = detect::skewness(xs);
    out.skew_score = normalize_skewness(out.skewness, xs, options.permutations, window_seed(options.seed, axis, w));
    out.outliers = detect::outliers(xs);
  });

  const std::size_t pairs = d * (d - 1);
  a.pair_raw_.assign(pairs, std::vector<PairRaw>(w_count));
  // One task per primary window: the primary-axis KDE and neighbor rows are
  // shared by all of its secondaries.
  parallel_for(d * w_count, options.threads, [&](std::size_t task) {
    const std::size_t i = task / w_count;
    const std::size_t w = task % w_count;
    const Window& win = a.windows_[i][w];
    for (std::size_t jj = 0; jj + 1 < d; ++jj) a.pair_raw_[i * (d - 1) + jj][w].n_points = win.member_rows.size();
    if (!win.populated()) return;
    std::vector<double> xs;
    gather(dataset.column(i), win.member_rows, xs);
    std::vector<std::vector<double>> ys(d - 1);
    for (std::size_t jj = 0; jj + 1 < d; ++jj) {
      gather(dataset.column(jj < i ? jj : jj + 1), win.member_rows, ys[jj]);
    }
    const auto dc = detect::density_change_batch(xs, ys);
    const auto cg = detect::clear_grouping_batch(xs, ys);
    for (std::size_t jj = 0; jj + 1 < d; ++jj) {
      PairRaw& out = a.pair_raw_[i * (d - 1) + jj][w];
      const auto pr = detect::pearson(xs, ys[jj]);
      out.r = pr.r;
      out.covariance_numerator = pr.covariance_numerator;
      out.density_change = dc[jj];
      out.clear_grouping = cg[jj];
      out.parallelism = detect::parallelism(xs, ys[jj]);
      out.fan = detect::fan(xs, ys[jj], options.fan_bins);
    }
  });

  // Phase 2: dataset-wide pools, gathered in fixed pair/window order.
  std::vector<double> grouping, density, counts;
  double max_abs_cov = 0.0;
  for (const auto& per_pair : a.pair_raw_) {
    for (const PairRaw& raw : per_pair) {
      if (raw.n_points < kMinWindowPopulation) continue;
      grouping.push_back(raw.clear_grouping);
      density.push_back(raw.density_change);
      max_abs_cov = std::max(max_abs_cov, std::fabs(raw.covariance_numerator));
    }
  }
  for (const auto& per_axis : a.marginal_) {
    for (const MarginalRaw& raw : per_axis) {
      if (raw.n_points >= kMinWindowPopulation) counts.push_back(static_cast<double>(raw.outliers));
    }
  }
  a.grouping_pool_ = LogisticPool::fit(grouping);
  a.density_pool_ = MinMaxPool::fit(density, 0.5);
  a.outlier_pool_ = MinMaxPool::fit(counts, 0.0);
  a.variance_scale_ = max_abs_cov;

  // Phase 3: normalized per-window scores and pair breakdowns.
  a.profiles_.resize(pairs);
  a.breakdowns_.resize(pairs);
  for (std::size_t pidx = 0; pidx < pairs; ++pidx) {
    const std::size_t i = pidx / (d - 1);
    const std::size_t jj = pidx % (d - 1);
    const std::size_t j = jj < i ? jj : jj + 1;
    WindowProfile& prof = a.profiles_[pidx];
    prof.pair = {i, j};
    for (PropertyId p : kAllProperties) prof.per_property[p].assign(w_count, std::nullopt);
    for (std::size_t w = 0; w < w_count; ++w) {
      const Window& win = a.windows_[i][w];
      prof.window_bounds.emplace_back(win.lo, win.hi);
      prof.n_points.push_back(win.member_rows.size());
      if (!win.populated()) continue;
      const PairRaw& raw = a.pair_raw_[pidx][w];
      const MarginalRaw& marg = a.marginal_[i][w];
      const std::size_t n = raw.n_points;
      auto set = [&](PropertyId p, double v) { prof.per_property[p][w] = std::clamp(v, 0.0, 1.0); };

      const SignedScore corr = normalize_correlation(raw.r, n);
      set(PropertyId::PosCorrelation, corr.pos);
      set(PropertyId::NegCorrelation, corr.neg);

      const double confidence = 1.0 - correlation_p_value(raw.r, n);
      const double var_mag =
          max_abs_cov > 0.0 ? std::fabs(raw.covariance_numerator) / max_abs_cov * confidence : 0.0;
      set(PropertyId::PosVariance, raw.covariance_numerator > 0.0 ? var_mag : 0.0);
      set(PropertyId::NegVariance, raw.covariance_numerator < 0.0 ? var_mag : 0.0);

      set(PropertyId::PosSkewness, marg.skew_score.pos);
      set(PropertyId::NegSkewness, marg.skew_score.neg);
      set(PropertyId::Outliers, a.outlier_pool_(static_cast<double>(marg.outliers)));
      set(PropertyId::DensityChange, a.density_pool_(raw.density_change));

      const double cg = a.grouping_pool_.clear_grouping(raw.clear_grouping);
      prof.per_property[PropertyId::ClearGrouping][w] = cg;
      prof.per_property[PropertyId::SplitUp][w] = LogisticPool::split_up(cg);

      set(PropertyId::Neighborhood, scale_pargnostics(raw.parallelism, n, a.row_count_, spec.window_fraction));
      set(PropertyId::Fan, scale_pargnostics(raw.fan, n, a.row_count_, spec.window_fraction));
    }
    PropertyMap<double>& b = a.breakdowns_[pidx];
    for (PropertyId p : kAllProperties) {
      double sum = 0.0;
      std::size_t count = 0;
      for (const auto& v : prof.per_property[p]) {
        if (!v) continue;
        sum += *v;
        ++count;
      }
      b[p] = count > 0 ? std::clamp(sum / static_cast<double>(count), 0.0, 1.0) : 0.0;
    }
  }
  return a;
}

std::size_t Analysis::pair_index(AxisPair pair) const {
  const std::size_t d = dims();
  if (pair.primary >= d || pair.secondary >= d) {
    throw Error(ErrorCode::UnknownAxis, "axis pair out of range",
                {{"i", pair.primary}, {"j", pair.secondary}, {"dims", d}});
  }
  if (pair.primary == pair.secondary) {
    throw Error(ErrorCode::InvalidPair, "axis pair must join two distinct axes", {{"i", pair.primary}});
  }
  const std::size_t jj = pair.secondary < pair.primary ? pair.secondary : pair.secondary - 1;
  return pair.primary * (d - 1) + jj;
}

const std::vector<Window>& Analysis::windows(std::size_t axis) const {
  if (axis >= dims()) throw Error(ErrorCode::UnknownAxis, "axis out of range", {{"axis", axis}});
  return windows_[axis];
}

const WindowProfile& Analysis::profile(AxisPair pair) const { return profiles_[pair_index(pair)]; }

const PropertyMap<double>& Analysis::breakdown(AxisPair pair) const { return breakdowns_[pair_index(pair)]; }

std::vector<detect::RawWindowValue> Analysis::raw_values(AxisPair pair) const {
  const std::size_t pidx = pair_index(pair);
  std::vector<detect::RawWindowValue> out;
  const auto& raws = pair_raw_[pidx];
  for (std::size_t w = 0; w < raws.size(); ++w) {
    const PairRaw& raw = raws[w];
    const MarginalRaw& marg = marginal_[pair.primary][w];
    const bool ok = raw.n_points >= kMinWindowPopulation;
    for (PropertyId p : kAllProperties) {
      detect::RawWindowValue v{p, w, std::nullopt, raw.n_points};
      if (ok) {
        switch (p) {
          case PropertyId::PosCorrelation:
          case PropertyId::NegCorrelation: v.value = raw.r; break;
          case PropertyId::PosVariance:
          case PropertyId::NegVariance: v.value = raw.covariance_numerator; break;
          case PropertyId::PosSkewness:
          case PropertyId::NegSkewness: v.value = marg.skewness; break;
          case PropertyId::Outliers: v.value = static_cast<double>(marg.outliers); break;
          case PropertyId::DensityChange: v.value = raw.density_change; break;
          case PropertyId::ClearGrouping:
          case PropertyId::SplitUp: v.value = raw.clear_grouping; break;
          case PropertyId::Neighborhood: v.value = raw.parallelism; break;
          case PropertyId::Fan: v.value = raw.fan; break;
        }
      }
      out.push_back(v);
    }
  }
  return out;
}

std::size_t Analysis::approx_bytes() const {
  std::size_t bytes = sizeof(Analysis);
  for (const auto& ws : windows_) {
    for (const auto& w : ws) bytes += sizeof(Window) + w.member_rows.size() * sizeof(std::size_t);
  }
  const std::size_t w_count = windows_.empty() ? 0 : windows_.front().size();
  bytes += profiles_.size() * (sizeof(WindowProfile) + w_count * (kPropertyCount * sizeof(std::optional<double>) +
                                                                  sizeof(std::pair<double, double>) +
                                                                  sizeof(std::size_t) + sizeof(PairRaw)));
  bytes += marginal_.size() * w_count * sizeof(MarginalRaw);
  bytes += breakdowns_.size() * sizeof(PropertyMap<double>);
  return bytes;
}

WindowProfile build_profile(const Dataset& dataset, AxisPair pair, const WindowSpec& spec,
                            const AnalysisOptions& options) {
  if (pair.primary == pair.secondary) {
    throw Error(ErrorCode::InvalidPair, "axis pair must join two distinct axes", {{"i", pair.primary}});
  }
  dataset.column(pair.primary);
  dataset.column(pair.secondary);
  return Analysis::compute(dataset, spec, options).profile(pair);
}

double weighted_cell(const PropertyMap<double>& breakdown, const Weights& weights) {
  double num = 0.0;
  double den = 0.0;
  for (PropertyId p : kAllProperties) {
    num += weights[p] * breakdown[p];
    den += weights[p];
  }
  if (!(den > 0.0)) throw Error(ErrorCode::NoActiveProperties, "at least one property weight must be > 0");
  return std::clamp(num / den, 0.0, 1.0);
}

ScoreMatrix build_matrix(const Analysis& analysis, const Weights& weights) {
  weights.require_active();
  const std::size_t d = analysis.dims();
  ScoreMatrix m;
  m.dims = analysis.names();
  m.cells.resize(d * d);
  m.breakdown.resize(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (i == j) continue;
      const auto& b = analysis.breakdown({i, j});
      m.breakdown[i * d + j] = b;
      m.cells[i * d + j] = weighted_cell(b, weights);
    }
  }
  return m;
}

ScoreMatrix build_matrix(const Dataset& dataset, const Weights& weights, const WindowSpec& spec,
                         const AnalysisOptions& options) {
  weights.require_active();
  return build_matrix(Analysis::compute(dataset, spec, options), weights);
}

}  // namespace pcorder
