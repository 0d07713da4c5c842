#include "pcorder/windows.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pcorder/error.hpp"

namespace pcorder {

namespace {

// Upper edges within this distance of 1 are treated as reaching the end of
// the axis; absorbs k * stride rounding.
constexpr double kEdgeTolerance = 1e-12;

template <typename Fn>
void for_each_bound(const WindowSpec& spec, Fn&& fn) {
  for (std::size_t k = 0;; ++k) {
    const double lo = static_cast<double>(k) * spec.stride_fraction;
    // Never leave a rounding gap before the next window's lower edge.
    const double hi = std::max(lo + spec.window_fraction, static_cast<double>(k + 1) * spec.stride_fraction);
    if (hi >= 1.0 - kEdgeTolerance) {
      fn(lo, 1.0);
      return;
    }
    fn(lo, hi);
  }
}

}  // namespace

void WindowSpec::validate() const {
  const bool ok = std::isfinite(window_fraction) && std::isfinite(stride_fraction) && window_fraction > 0.0 &&
                  window_fraction <= 1.0 && stride_fraction > 0.0 && stride_fraction <= window_fraction;
  if (!ok) {
    throw Error(ErrorCode::InvalidWindowSpec,
                "window spec needs 0 < stride <= window <= 1 (window=" + std::to_string(window_fraction) +
                    ", stride=" + std::to_string(stride_fraction) + ")",
                {{"window_fraction", window_fraction}, {"stride_fraction", stride_fraction}});
  }
}

std::size_t WindowSpec::window_count() const {
  validate();
  std::size_t n = 0;
  for_each_bound(*this, [&](double, double) { ++n; });
  return n;
}

std::vector<Window> make_windows(std::span<const double> normalized, const WindowSpec& spec) {
  spec.validate();

  std::vector<std::size_t> by_value(normalized.size());
  std::iota(by_value.begin(), by_value.end(), std::size_t{0});
  std::stable_sort(by_value.begin(), by_value.end(),
                   [&](std::size_t a, std::size_t b) { return normalized[a] < normalized[b]; });

  std::vector<Window> windows;
  for_each_bound(spec, [&](double lo, double hi) {
    Window w;
    w.lo = lo;
    w.hi = hi;
    auto first = std::lower_bound(by_value.begin(), by_value.end(), lo,
                                  [&](std::size_t row, double v) { return normalized[row] < v; });
    auto last = std::upper_bound(by_value.begin(), by_value.end(), hi,
                                 [&](double v, std::size_t row) { return v < normalized[row]; });
    w.member_rows.assign(first, last);
    std::sort(w.member_rows.begin(), w.member_rows.end());
    windows.push_back(std::move(w));
  });
  return windows;
}

std::vector<Window> make_windows(const Column& axis, const WindowSpec& spec) {
  return make_windows(axis.normalized, spec);
}

}  // namespace pcorder
