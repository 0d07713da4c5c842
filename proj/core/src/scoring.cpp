#include "pcorder/scoring.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "pcorder/detectors.hpp"
#include "pcorder/error.hpp"
#include "pcorder/stats.hpp"

namespace pcorder {

namespace {

constexpr double kCorrelationClamp = 1.0 - 1e-12;

SignedScore route_by_sign(double signed_value, double magnitude) {
  SignedScore s;
  if (signed_value > 0.0) s.pos = magnitude;
  if (signed_value < 0.0) s.neg = magnitude;
  return s;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Weights Weights::parse(std::string_view text) {
  Weights w;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view item = trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
    if (!item.empty()) {
      const std::size_t eq = item.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorCode::InvalidWeights, "weight '" + std::string(item) + "' is not key=value",
                    {{"item", std::string(item)}});
      }
      const std::string_view key = trim(item.substr(0, eq));
      const std::string_view value = trim(item.substr(eq + 1));
      const auto prop = property_from_key(key);
      if (!prop) {
        throw Error(ErrorCode::InvalidWeights, "unknown property '" + std::string(key) + "'",
                    {{"property", std::string(key)}});
      }
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw Error(ErrorCode::InvalidWeights, "weight for '" + std::string(key) + "' is not a number",
                    {{"property", std::string(key)}});
      }
      w.set(*prop, v);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return w;
}

Weights Weights::single(PropertyId p, double w) {
  Weights out;
  out.set(p, w);
  return out;
}

void Weights::set(PropertyId p, double w) {
  if (!std::isfinite(w) || w < 0.0 || w > 1.0) {
    throw Error(ErrorCode::InvalidWeights,
                "weight for '" + std::string(property_key(p)) + "' must lie in [0,1]",
                {{"property", std::string(property_key(p))}, {"value", std::isfinite(w) ? w : -1.0}});
  }
  values_[p] = w;
}

bool Weights::any_active() const {
  return std::any_of(values_.values.begin(), values_.values.end(), [](double w) { return w > 0.0; });
}

double Weights::total() const {
  double t = 0.0;
  for (double w : values_.values) t += w;
  return t;
}

void Weights::require_active() const {
  if (!any_active()) throw Error(ErrorCode::NoActiveProperties, "at least one property weight must be > 0");
}

std::string Weights::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (PropertyId p : kAllProperties) {
    if (values_[p] == 0.0) continue;
    if (!first) os << ',';
    first = false;
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, values_[p]);
    os << property_key(p) << '=' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
  }
  return os.str();
}

double correlation_p_value(double r, std::size_t n) {
  if (n < 3) return 1.0;
  if (std::fabs(r) >= 1.0) return 0.0;
  const double rc = std::clamp(r, -kCorrelationClamp, kCorrelationClamp);
  const double dof = static_cast<double>(n - 2);
  const double t = rc * std::sqrt(dof) / std::sqrt(1.0 - rc * rc);
  return std::clamp(stats::student_t_two_sided_p(t, dof), 0.0, 1.0);
}

SignedScore normalize_correlation(double r, std::size_t n) {
  if (r == 0.0 || !std::isfinite(r)) return {};
  if (std::fabs(r) >= 1.0) return route_by_sign(r, 1.0);
  const double m = std::clamp(std::fabs(r) * (1.0 - correlation_p_value(r, n)), 0.0, 1.0);
  return route_by_sign(r, m);
}

SignedScore normalize_skewness(double g, std::span<const double> xs, int permutations, std::uint64_t seed) {
  if (xs.empty() || permutations <= 0 || !std::isfinite(g)) return {};
  double mean = 0.0;
  for (double v : xs) mean += v;
  mean /= static_cast<double>(xs.size());

  std::mt19937_64 rng(seed);
  std::vector<double> resample(xs.size());
  const double target = std::fabs(g);
  int at_least_as_extreme = 0;
  for (int k = 0; k < permutations; ++k) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const bool flip = (rng() >> 63) != 0;
      resample[i] = flip ? 2.0 * mean - xs[i] : xs[i];
    }
    if (std::fabs(detect::skewness(resample)) >= target) ++at_least_as_extreme;
  }
  const double p = static_cast<double>(at_least_as_extreme) / static_cast<double>(permutations);
  return route_by_sign(g, std::min(target, 1.0) * (1.0 - p));
}

LogisticPool LogisticPool::fit(std::span<const double> pooled) {
  LogisticPool pool;
  if (pooled.size() < 2) return pool;
  double mean = 0.0;
  for (double v : pooled) mean += v;
  mean /= static_cast<double>(pooled.size());
  double ss = 0.0;
  for (double v : pooled) ss += (v - mean) * (v - mean);
  pool.mean_ = mean;
  pool.stddev_ = std::sqrt(ss / static_cast<double>(pooled.size()));
  pool.degenerate_ = !(pool.stddev_ > 0.0);
  return pool;
}

double LogisticPool::clear_grouping(double raw) const {
  if (degenerate_) return 0.5;
  const double z = (raw - mean_) / stddev_;
  const double logistic = 1.0 / (1.0 + std::exp(-z));
  return std::clamp(1.0 - logistic, 0.0, 1.0);
}

MinMaxPool MinMaxPool::fit(std::span<const double> pooled, double degenerate_value) {
  MinMaxPool pool;
  pool.degenerate_value_ = degenerate_value;
  if (pooled.empty()) return pool;
  const auto [mn, mx] = std::minmax_element(pooled.begin(), pooled.end());
  pool.lo_ = *mn;
  pool.hi_ = *mx;
  return pool;
}

double MinMaxPool::operator()(double raw) const {
  if (!(hi_ > lo_)) return degenerate_value_;
  return std::clamp((raw - lo_) / (hi_ - lo_), 0.0, 1.0);
}

double scale_pargnostics(double value, std::size_t n_window, std::size_t n_total, double window_fraction) {
  if (n_total == 0) throw Error(ErrorCode::EmptyDataset, "scaling needs a nonempty dataset");
  const double expected = static_cast<double>(n_total) * window_fraction;
  if (!(expected > 0.0)) return value;
  const double factor = std::min(1.0, static_cast<double>(n_window) / expected);
  return value * factor;
}

}  // namespace pcorder
