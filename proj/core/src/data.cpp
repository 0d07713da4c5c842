#include "pcorder/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "pcorder/error.hpp"

namespace pcorder {

namespace {

constexpr std::size_t kMinRows = 2;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// RFC-4180 field splitting for a single record. Quoted fields may contain
// commas and doubled quotes; embedded newlines are not supported.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.emplace_back(trim(current));
  return fields;
}

bool is_missing_marker(std::string_view cell) {
  static const std::set<std::string_view> markers = {"",    "NA",  "N/A", "na",   "n/a", "NaN",
                                                     "nan", "NAN", "null", "NULL", "?",   "."};
  return markers.count(cell) > 0;
}

enum class CellKind { Number, Missing, Text };

CellKind classify(std::string_view cell, double& out) {
  if (is_missing_marker(cell)) return CellKind::Missing;
  std::string_view s = cell;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec == std::errc() && ptr == last) {
    return std::isfinite(out) ? CellKind::Number : CellKind::Missing;
  }
  return CellKind::Text;
}

}  // namespace

std::vector<double> normalize_min_max(std::span<const double> values, double& lo, double& hi) {
  std::vector<double> out(values.size(), 0.5);
  if (values.empty()) {
    lo = hi = 0.0;
    return out;
  }
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  lo = *mn;
  hi = *mx;
  if (hi > lo) {
    const double range = hi - lo;
    for (std::size_t i = 0; i < values.size(); ++i) {
      out[i] = std::clamp((values[i] - lo) / range, 0.0, 1.0);
    }
  }
  return out;
}

Dataset Dataset::from_columns(std::string name, std::vector<NamedSeries> series) {
  Dataset ds;
  ds.name_ = std::move(name);
  if (series.empty()) {
    throw Error(ErrorCode::EmptyDataset, "dataset has no columns");
  }
  ds.row_count_ = series.front().values.size();
  std::set<std::string> seen;
  for (const auto& s : series) {
    if (s.name.empty()) throw Error(ErrorCode::InvalidHeader, "column names must be nonempty");
    if (!seen.insert(s.name).second) {
      throw Error(ErrorCode::DuplicateColumnName, "duplicate column name '" + s.name + "'",
                  {{"column", s.name}});
    }
    if (s.values.size() != ds.row_count_) {
      throw Error(ErrorCode::LengthMismatch, "column '" + s.name + "' has a different length");
    }
    for (std::size_t r = 0; r < s.values.size(); ++r) {
      if (!std::isfinite(s.values[r])) {
        throw Error(ErrorCode::NonNumericColumn, "column '" + s.name + "' holds a non-finite value",
                    {{"column", s.name}, {"row", r}});
      }
    }
  }
  if (ds.row_count_ < kMinRows) {
    throw Error(ErrorCode::EmptyDataset, "dataset needs at least 2 usable rows",
                {{"rows", ds.row_count_}});
  }
  ds.columns_.reserve(series.size());
  for (auto& s : series) {
    Column c;
    c.name = std::move(s.name);
    c.raw = std::move(s.values);
    c.normalized = normalize_min_max(c.raw, c.raw_min, c.raw_max);
    ds.columns_.push_back(std::move(c));
  }
  return ds;
}

const Column& Dataset::column(std::size_t axis) const {
  if (axis >= columns_.size()) {
    throw Error(ErrorCode::UnknownAxis, "axis index " + std::to_string(axis) + " out of range",
                {{"axis", axis}, {"dims", columns_.size()}});
  }
  return columns_[axis];
}

std::vector<std::string> Dataset::column_names() const {
  std::vector<std::string> names;
  names.reserve(columns_.size());
  for (const auto& c : columns_) names.push_back(c.name);
  return names;
}

LoadResult parse_csv(std::string_view text, std::string name,
                     const std::optional<std::vector<std::string>>& selected_columns) {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t end = text.find('\n', start);
      const std::size_t stop = end == std::string_view::npos ? text.size() : end;
      lines.push_back(text.substr(start, stop - start));
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
  }
  // skip a UTF-8 BOM and any leading blank lines
  std::size_t header_line = 0;
  while (header_line < lines.size() && trim(lines[header_line]).empty()) ++header_line;
  if (header_line == lines.size()) {
    throw Error(ErrorCode::EmptyDataset, "CSV has no header row");
  }
  std::string_view header_text = lines[header_line];
  if (header_text.substr(0, 3) == "\xEF\xBB\xBF") header_text.remove_prefix(3);
  const std::vector<std::string> header = split_record(header_text);

  std::unordered_map<std::string, std::size_t> header_index;
  std::set<std::string> duplicated;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!header_index.emplace(header[c], c).second) duplicated.insert(header[c]);
  }

  std::vector<std::size_t> picked;
  std::vector<std::string> picked_names;
  if (selected_columns) {
    std::set<std::string> requested;
    for (const auto& col : *selected_columns) {
      if (!requested.insert(col).second) {
        throw Error(ErrorCode::DuplicateColumnName, "column '" + col + "' selected twice", {{"column", col}});
      }
      if (duplicated.count(col)) {
        throw Error(ErrorCode::DuplicateColumnName, "header repeats column '" + col + "'", {{"column", col}});
      }
      auto it = header_index.find(col);
      if (it == header_index.end()) {
        throw Error(ErrorCode::UnknownColumn, "column '" + col + "' not in header", {{"column", col}});
      }
      picked.push_back(it->second);
      picked_names.push_back(col);
    }
  } else {
    if (!duplicated.empty()) {
      const std::string& col = *duplicated.begin();
      throw Error(ErrorCode::DuplicateColumnName, "header repeats column '" + col + "'", {{"column", col}});
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c].empty()) {
        throw Error(ErrorCode::InvalidHeader, "header column " + std::to_string(c) + " has no name");
      }
      picked.push_back(c);
      picked_names.push_back(header[c]);
    }
  }
  if (picked.empty()) throw Error(ErrorCode::EmptyDataset, "no columns selected");

  struct ColumnTally {
    std::size_t numeric = 0;
    std::size_t text = 0;
    std::size_t first_text_line = 0;
  };
  std::vector<ColumnTally> tally(picked.size());
  std::vector<std::vector<double>> values(picked.size());
  std::size_t dropped = 0;

  std::vector<double> row_values(picked.size());
  for (std::size_t li = header_line + 1; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const std::vector<std::string> fields = split_record(lines[li]);
    bool usable = true;
    for (std::size_t k = 0; k < picked.size(); ++k) {
      const std::size_t c = picked[k];
      double v = 0.0;
      const CellKind kind = c < fields.size() ? classify(fields[c], v) : CellKind::Missing;
      switch (kind) {
        case CellKind::Number:
          ++tally[k].numeric;
          row_values[k] = v;
          break;
        case CellKind::Text:
          if (tally[k].text++ == 0) tally[k].first_text_line = li + 1;
          usable = false;
          break;
        case CellKind::Missing:
          usable = false;
          break;
      }
    }
    if (!usable) {
      ++dropped;
      continue;
    }
    for (std::size_t k = 0; k < picked.size(); ++k) values[k].push_back(row_values[k]);
  }

  for (std::size_t k = 0; k < picked.size(); ++k) {
    if (tally[k].text > 0 && tally[k].text >= tally[k].numeric) {
      throw Error(ErrorCode::NonNumericColumn,
                  "column '" + picked_names[k] + "' is not numeric (first offending line " +
                      std::to_string(tally[k].first_text_line) + ")",
                  {{"column", picked_names[k]}, {"line", tally[k].first_text_line}});
    }
  }
  if (values.front().size() < kMinRows) {
    throw Error(ErrorCode::EmptyDataset, "fewer than 2 usable rows",
                {{"rows", values.front().size()}, {"dropped_rows", dropped}});
  }

  std::vector<Dataset::NamedSeries> series;
  series.reserve(picked.size());
  for (std::size_t k = 0; k < picked.size(); ++k) {
    series.push_back({picked_names[k], std::move(values[k])});
  }
  return LoadResult{Dataset::from_columns(std::move(name), std::move(series)), dropped};
}

LoadResult load_csv(const std::filesystem::path& path,
                    const std::optional<std::vector<std::string>>& selected_columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::FileNotFound, "cannot open '" + path.string() + "'", {{"path", path.string()}});
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path.stem().string(), selected_columns);
}

}  // namespace pcorder
