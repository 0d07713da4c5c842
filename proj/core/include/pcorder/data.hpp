#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pcorder {

/// One numeric feature. `normalized` is the min-max image of `raw` on [0,1];
/// constant columns sit at 0.5.
struct Column {
  std::string name;
  std::vector<double> raw;
  std::vector<double> normalized;
  double raw_min = 0.0;
  double raw_max = 0.0;

  bool is_constant() const noexcept { return !(raw_max > raw_min); }
};

/// Column-major numeric table. Immutable once built, so it can be shared
/// freely between worker threads.
class Dataset {
 public:
  struct NamedSeries {
    std::string name;
    std::vector<double> values;
  };

  /// Validates (>= 2 rows, aligned lengths, unique nonempty names, finite
  /// values) and normalizes every column.
  static Dataset from_columns(std::string name, std::vector<NamedSeries> series);

  const std::string& name() const noexcept { return name_; }
  std::size_t row_count() const noexcept { return row_count_; }
  std::size_t dims() const noexcept { return columns_.size(); }
  const std::vector<Column>& columns() const noexcept { return columns_; }
  const Column& column(std::size_t axis) const;
  std::vector<std::string> column_names() const;

 private:
  Dataset() = default;

  std::string name_;
  std::vector<Column> columns_;
  std::size_t row_count_ = 0;
};

struct LoadResult {
  Dataset dataset;
  std::size_t dropped_rows = 0;
};

/// Min-max normalization used for every column. Returns all-0.5 for constant
/// input. Writes the observed range to `lo`/`hi`.
std::vector<double> normalize_min_max(std::span<const double> values, double& lo, double& hi);

/// Parses CSV text. Rows with a missing or unparsable cell in any selected
/// column are dropped and counted; a column whose non-missing cells are
/// mostly non-numeric is rejected as categorical.
LoadResult parse_csv(std::string_view text, std::string name,
                     const std::optional<std::vector<std::string>>& selected_columns = std::nullopt);

LoadResult load_csv(const std::filesystem::path& path,
                    const std::optional<std::vector<std::string>>& selected_columns = std::nullopt);

}  // namespace pcorder
