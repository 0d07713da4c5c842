#include <random>

#include "doctest.h"
#include "oracles/oracles.hpp"
#include "pcorder/error.hpp"
#include "pcorder/windows.hpp"

using namespace pcorder;

TEST_CASE("single global window") {
  const std::vector<double> v{0.0, 0.3, 1.0, 0.5, 0.7};
  const auto w = make_windows(v, WindowSpec{1.0, 1.0});
  REQUIRE(w.size() == 1);
  CHECK(w[0].lo == 0.0);
  CHECK(w[0].hi == 1.0);
  CHECK(w[0].member_rows == std::vector<std::size_t>{0, 1, 2, 3, 4});
}

TEST_CASE("half window with quarter stride") {
  const std::vector<double> v{0.0, 1.0};
  const auto w = make_windows(v, WindowSpec{0.5, 0.25});
  REQUIRE(w.size() == 3);
  CHECK(w[0].lo == 0.0);
  CHECK(w[0].hi == 0.5);
  CHECK(w[1].lo == 0.25);
  CHECK(w[1].hi == 0.75);
  CHECK(w[2].lo == 0.5);
  CHECK(w[2].hi == 1.0);
  CHECK(WindowSpec{0.5, 0.25}.window_count() == 3);
}

TEST_CASE("default stride is half the window") {
  CHECK(WindowSpec::with_default_stride(0.2).stride_fraction == doctest::Approx(0.1));
}

TEST_CASE("invalid specs") {
  for (const WindowSpec s : {WindowSpec{0.0, 0.1}, WindowSpec{0.2, 0.0}, WindowSpec{0.2, 0.3}, WindowSpec{1.5, 0.1},
                             WindowSpec{-0.1, -0.2}}) {
    CHECK_THROWS_AS(s.validate(), Error);
  }
  CHECK_NOTHROW(WindowSpec{0.2, 0.2}.validate());
}

TEST_CASE("membership equals a brute-force interval scan") {
  std::mt19937_64 rng(3);
  const auto values = oracle::uniform(rng, 1000);
  const WindowSpec spec{0.2, 0.1};
  const auto w = make_windows(values, spec);
  CHECK(w.size() == spec.window_count());
  for (std::size_t k = 0; k < w.size(); ++k) {
    CHECK(w[k].member_rows == oracle::members(values, w[k].lo, w[k].hi));
    if (k > 0 && k + 1 < w.size()) {
      CHECK(w[k].member_rows.size() > 150);
      CHECK(w[k].member_rows.size() < 250);
    }
  }
}

TEST_CASE("coverage: every value lies in some window") {
  std::mt19937_64 rng(5);
  for (double wf : {0.05, 0.1, 0.15, 0.3, 0.33, 0.7, 1.0}) {
    for (double sf : {wf, wf / 2, wf / 3}) {
      auto values = oracle::uniform(rng, 300);
      values.push_back(0.0);
      values.push_back(1.0);
      const auto w = make_windows(values, WindowSpec{wf, sf});
      CHECK(w.front().lo == 0.0);
      CHECK(w.back().hi == 1.0);
      for (std::size_t k = 0; k + 1 < w.size(); ++k) CHECK(w[k + 1].lo <= w[k].hi);
      std::vector<bool> seen(values.size(), false);
      for (const auto& win : w)
        for (auto r : win.member_rows) seen[r] = true;
      CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
    }
  }
}

TEST_CASE("monotone membership when the window shrinks") {
  std::mt19937_64 rng(9);
  const auto values = oracle::uniform(rng, 500);
  const auto wide = make_windows(values, WindowSpec{0.4, 0.1});
  const auto narrow = make_windows(values, WindowSpec{0.2, 0.1});
  for (std::size_t k = 0; k < std::min(wide.size(), narrow.size()); ++k) {
    REQUIRE(wide[k].lo == narrow[k].lo);
    for (auto r : narrow[k].member_rows) {
      CHECK(std::binary_search(wide[k].member_rows.begin(), wide[k].member_rows.end(), r));
    }
  }
}

TEST_CASE("deterministic and ascending") {
  std::mt19937_64 rng(13);
  const auto values = oracle::uniform(rng, 400);
  const auto a = make_windows(values, WindowSpec{0.25, 0.1});
  const auto b = make_windows(values, WindowSpec{0.25, 0.1});
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].member_rows == b[k].member_rows);
    CHECK(std::is_sorted(a[k].member_rows.begin(), a[k].member_rows.end()));
  }
}

TEST_CASE("population rule") {
  Window w;
  w.member_rows = {1, 2, 3, 4};
  CHECK_FALSE(w.populated());
  w.member_rows.push_back(5);
  CHECK(w.populated());
}
