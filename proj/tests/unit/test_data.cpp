#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles/oracles.hpp"
#include "pcorder/data.hpp"
#include "pcorder/error.hpp"

using namespace pcorder;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected pcorder::Error");
  return ErrorCode::Internal;
}

}  // namespace

TEST_CASE("two-point columns normalize to 0 and 1") {
  const auto r = parse_csv("a,b\n1,2\n3,4\n", "t");
  CHECK(r.dropped_rows == 0);
  REQUIRE(r.dataset.dims() == 2);
  CHECK(r.dataset.column(0).normalized == std::vector<double>{0.0, 1.0});
  CHECK(r.dataset.column(1).normalized == std::vector<double>{0.0, 1.0});
  CHECK(r.dataset.column(1).raw_min == 2.0);
  CHECK(r.dataset.column(1).raw_max == 4.0);
}

TEST_CASE("constant column sits at 0.5") {
  const auto r = parse_csv("a,c\n1,5\n2,5\n3,5\n", "t");
  CHECK(r.dataset.column(1).is_constant());
  CHECK(r.dataset.column(1).normalized == std::vector<double>{0.5, 0.5, 0.5});
}

TEST_CASE("missing and unparsable cells drop the whole row") {
  const auto r = parse_csv("a,b,c\n1,2,3\n4,NA,6\n7,8,\n9,x,1\n10,11,12\n0,1,2\n", "t");
  CHECK(r.dropped_rows == 3);
  REQUIRE(r.dataset.row_count() == 3);
  // Alignment: each retained row keeps the values of one source line.
  CHECK(r.dataset.column(0).raw == std::vector<double>{1, 10, 0});
  CHECK(r.dataset.column(1).raw == std::vector<double>{2, 11, 1});
  CHECK(r.dataset.column(2).raw == std::vector<double>{3, 12, 2});
}

TEST_CASE("column selection ignores other columns entirely") {
  const auto r = parse_csv("name,a,b\nx,1,2\ny,3,NA\nz,5,6\n", "t", std::vector<std::string>{"a"});
  CHECK(r.dropped_rows == 0);
  CHECK(r.dataset.row_count() == 3);
  CHECK(r.dataset.column_names() == std::vector<std::string>{"a"});
}

TEST_CASE("quoted fields, CRLF and BOM") {
  const auto r = parse_csv("\xEF\xBB\xBF\"a\",\"b,c\"\r\n\"1\",2\r\n3,\"4\"\r\n", "t");
  CHECK(r.dataset.column_names() == std::vector<std::string>{"a", "b,c"});
  CHECK(r.dataset.column(1).raw == std::vector<double>{2, 4});
}

TEST_CASE("errors") {
  CHECK(code_of([] { load_csv("/nonexistent/file.csv"); }) == ErrorCode::FileNotFound);
  CHECK(code_of([] { parse_csv("a,b\n1,2\n", "t"); }) == ErrorCode::EmptyDataset);
  CHECK(code_of([] { parse_csv("", "t"); }) == ErrorCode::EmptyDataset);
  CHECK(code_of([] { parse_csv("a,a\n1,2\n3,4\n", "t"); }) == ErrorCode::DuplicateColumnName);
  CHECK(code_of([] { parse_csv("a,b\n1,2\n3,4\n", "t", std::vector<std::string>{"z"}); }) ==
        ErrorCode::UnknownColumn);

  try {
    parse_csv("a,species\n1,adelie\n2,gentoo\n3,chinstrap\n", "t");
    FAIL("categorical column accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonNumericColumn);
    CHECK(e.detail()["column"] == "species");
    CHECK(e.detail()["line"] == 2);
  }
}

TEST_CASE("from_columns validation") {
  CHECK(code_of([] { Dataset::from_columns("t", {{"a", {1, 2}}, {"b", {1}}}); }) == ErrorCode::LengthMismatch);
  CHECK(code_of([] { Dataset::from_columns("t", {{"a", {1, NAN}}}); }) == ErrorCode::NonNumericColumn);
  CHECK(code_of([] { Dataset::from_columns("t", {{"a", {1}}}); }) == ErrorCode::EmptyDataset);
  CHECK(code_of([] { Dataset::from_columns("t", {{"", {1, 2}}}); }) == ErrorCode::InvalidHeader);
}

TEST_CASE("normalization properties") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(3.0, 40.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> raw(2 + trial);
    for (double& v : raw) v = g(rng);
    double lo = 0, hi = 0;
    const auto once = normalize_min_max(raw, lo, hi);
    CHECK(*std::min_element(once.begin(), once.end()) == 0.0);
    CHECK(*std::max_element(once.begin(), once.end()) == 1.0);
    const auto twice = normalize_min_max(once, lo, hi);
    for (std::size_t i = 0; i < once.size(); ++i) CHECK(twice[i] == doctest::Approx(once[i]).epsilon(1e-12));
  }
}

TEST_CASE("penguins row count matches a line-counting oracle") {
  const std::string path = std::string(PCORDER_DATA_DIR) + "/penguins.csv";
  const auto r = load_csv(path);
  const auto names = r.dataset.column_names();
  CHECK(names.size() == 6);
  const std::size_t expected = oracle::count_complete_rows(path, names);
  CHECK(r.dataset.row_count() == expected);
  CHECK(r.dataset.row_count() <= 2000);

  std::ifstream in(path);
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) lines += line.empty() ? 0 : 1;
  CHECK(r.dataset.row_count() + r.dropped_rows == lines - 1);
}
