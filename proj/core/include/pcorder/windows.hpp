#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pcorder/data.hpp"

namespace pcorder {

/// Windows holding fewer rows than this yield null scores for every property.
inline constexpr std::size_t kMinWindowPopulation = 5;

/// Sliding-window geometry as fractions of the normalized axis range.
struct WindowSpec {
  double window_fraction = 0.2;
  double stride_fraction = 0.1;

  /// Half-overlapping windows: stride = window / 2.
  static WindowSpec with_default_stride(double window_fraction) {
    return WindowSpec{window_fraction, window_fraction / 2.0};
  }

  /// Throws Error(InvalidWindowSpec) unless 0 < stride <= window <= 1.
  void validate() const;

  /// Number of windows make_windows() will emit for this spec.
  std::size_t window_count() const;

  bool operator==(const WindowSpec&) const = default;
};

/// Closed interval [lo, hi] on the normalized primary axis with the rows
/// that fall inside it, in ascending row order.
struct Window {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> member_rows;

  bool populated() const noexcept { return member_rows.size() >= kMinWindowPopulation; }
};

/// Windows start at k * stride and stop at the first one reaching the top of
/// the axis (clamped to 1).
std::vector<Window> make_windows(std::span<const double> normalized, const WindowSpec& spec);
std::vector<Window> make_windows(const Column& axis, const WindowSpec& spec);

}  // namespace pcorder
