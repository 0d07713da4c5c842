#include <random>

#include "doctest.h"
#include "oracles/oracles.hpp"
#include "pcorder/error.hpp"
#include "pcorder/session.hpp"

using namespace pcorder;

namespace {

std::shared_ptr<const Analysis> six_axis_analysis() {
  static const auto shared = [] {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> g(0, 1);
    std::vector<Dataset::NamedSeries> s;
    std::vector<double> base(240);
    for (double& v : base) v = g(rng);
    for (int d = 0; d < 6; ++d) {
      std::vector<double> v(base.size());
      for (std::size_t r = 0; r < v.size(); ++r) v[r] = (d % 2 ? -1.0 : 1.0) * base[r] * (d + 1) * 0.2 + g(rng);
      s.push_back({"f" + std::to_string(d), std::move(v)});
    }
    return std::make_shared<const Analysis>(
        Analysis::compute(Dataset::from_columns("six", std::move(s)), WindowSpec{0.2, 0.1}, {.seed = 5}));
  }();
  return shared;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected pcorder::Error");
  return ErrorCode::Internal;
}

std::vector<double> dense(const ScoreMatrix& m) {
  std::vector<double> out;
  for (const auto& c : m.cells) out.push_back(c.value_or(0.0));
  return out;
}

}  // namespace

TEST_CASE("fresh session shows the full matrix") {
  auto [s, m] = start_session(six_axis_analysis(), "s-1", "ds-1", Weights::single(PropertyId::PosCorrelation), 5);
  CHECK(s.prefix.empty());
  CHECK(m.non_null_cells() == 30);
  auto [s2, m2] = start_session(six_axis_analysis(), "s-1", "ds-1", Weights::single(PropertyId::PosCorrelation), 5);
  CHECK(m.cells == m2.cells);
  CHECK_THROWS_AS(start_session(six_axis_analysis(), "s", "d", Weights{}, 0), Error);
}

TEST_CASE("chaining restricts the candidate matrix to the tail row") {
  auto [s, m0] = start_session(six_axis_analysis(), "s", "d", Weights::single(PropertyId::PosCorrelation), 5);
  const auto m = choose_pair(s, 2, 5);
  CHECK(s.prefix == std::vector<std::size_t>{2, 5});
  CHECK(m.non_null_cells() == 4);
  for (std::size_t j : {0, 1, 3, 4}) CHECK(m.cell(5, j) == m0.cell(5, j));
  CHECK(code_of([&] { choose_pair(s, 5, 2); }) == ErrorCode::AxisAlreadyUsed);
  CHECK(code_of([&] { choose_pair(s, 1, 3); }) == ErrorCode::BrokenChain);
  CHECK(code_of([&] { choose_pair(s, 5, 9); }) == ErrorCode::UnknownAxis);
  CHECK(s.prefix == std::vector<std::size_t>{2, 5});
}

TEST_CASE("five clicks give a full manual order") {
  auto [s, m] = start_session(six_axis_analysis(), "s", "d", Weights::single(PropertyId::PosCorrelation), 5);
  const std::vector<std::size_t> chain{3, 0, 4, 1, 5, 2};
  for (std::size_t k = 0; k + 1 < chain.size(); ++k) choose_pair(s, chain[k], chain[k + 1]);
  CHECK(s.prefix == chain);
  CHECK(s.step_log.size() == 5);
  const auto fin = finalize(s);
  CHECK(fin.ordering.order == chain);
  CHECK(fin.ordering.method == OrderingMethod::Manual);
  CHECK(fin.profiles.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) CHECK(fin.profiles[k].pair == AxisPair{chain[k], chain[k + 1]});
}

TEST_CASE("partial prefix is completed greedily") {
  auto [s, m] = start_session(six_axis_analysis(), "s", "d", Weights::parse("pos_corr=1,fan=0.5"), 5);
  choose_pair(s, 1, 4);
  const auto fin = finalize(s);
  const auto full = build_matrix(*s.analysis, s.current_weights);
  CHECK(fin.ordering.order == oracle::greedy_extend(dense(full), 6, {1, 4}));
  CHECK(fin.ordering.method == OrderingMethod::Greedy);
  double total = 0;
  for (std::size_t k = 0; k + 1 < 6; ++k) total += *full.cell(fin.ordering.order[k], fin.ordering.order[k + 1]);
  CHECK(fin.ordering.total_score == doctest::Approx(total).epsilon(1e-14));
}

TEST_CASE("undo") {
  auto [s, m0] = start_session(six_axis_analysis(), "s", "d", Weights::single(PropertyId::PosCorrelation), 5);
  CHECK(code_of([&] { undo(s); }) == ErrorCode::NothingToUndo);
  const Session fresh = s;
  choose_pair(s, 0, 1);
  auto back = undo(s);
  CHECK(s.prefix.empty());
  CHECK(s.same_state(fresh));
  CHECK(back.cells == m0.cells);

  choose_pair(s, 0, 1);
  const Session once = s;
  const auto m_once = candidate_matrix(s);
  choose_pair(s, 1, 3);
  const auto restored = undo(s);
  CHECK(s.same_state(once));
  CHECK(restored.cells == m_once.cells);

  Session replay = fresh;
  choose_pair(replay, 0, 1);
  undo(replay);
  choose_pair(replay, 0, 1);
  CHECK(replay.same_state(once));
}

TEST_CASE("weights may change between steps") {
  auto [s, m0] = start_session(six_axis_analysis(), "s", "d", Weights::single(PropertyId::PosCorrelation), 5);
  choose_pair(s, 0, 2);
  const auto same = set_weights(s, Weights::single(PropertyId::PosCorrelation));
  CHECK(same.cells == candidate_matrix(s).cells);
  set_weights(s, Weights::single(PropertyId::Fan));
  choose_pair(s, 2, 3);
  CHECK(s.prefix == std::vector<std::size_t>{0, 2, 3});
  REQUIRE(s.step_log.size() == 2);
  CHECK(s.step_log[0].weights != s.step_log[1].weights);
  CHECK(code_of([&] { set_weights(s, Weights{}); }) == ErrorCode::NoActiveProperties);
  CHECK(s.current_weights == Weights::single(PropertyId::Fan));
}

TEST_CASE("y = x flips between positive and negative correlation") {
  std::vector<double> x;
  for (int i = 0; i < 120; ++i) x.push_back(std::fmod(i * 0.618, 1.0));
  const auto a = std::make_shared<const Analysis>(
      Analysis::compute(Dataset::from_columns("yx", {{"x", x}, {"y", x}}), WindowSpec{0.2, 0.1}, {}));
  auto [s, m] = start_session(a, "s", "d", Weights::single(PropertyId::PosCorrelation), 0);
  CHECK(*m.cell(0, 1) == doctest::Approx(1.0).epsilon(1e-9));
  const auto flipped = set_weights(s, Weights::single(PropertyId::NegCorrelation));
  CHECK(*flipped.cell(0, 1) == 0.0);
}

TEST_CASE("empty prefix finalizes with the greedy ordering") {
  auto [s, m] = start_session(six_axis_analysis(), "s", "d", Weights::single(PropertyId::PosCorrelation), 5);
  const auto fin = finalize(s);
  CHECK(fin.ordering.order == order_greedy(m).order);
}

TEST_CASE("chain property") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 20; ++t) {
    auto [s, m] = start_session(six_axis_analysis(), "s", "d", Weights::parse("pos_corr=1,neighborhood=0.5"), 5);
    std::vector<std::size_t> axes{0, 1, 2, 3, 4, 5};
    std::shuffle(axes.begin(), axes.end(), rng);
    const std::size_t steps = 1 + t % 5;
    for (std::size_t k = 0; k < steps; ++k) choose_pair(s, axes[k], axes[k + 1]);
    const auto fin = finalize(s);
    const auto full = build_matrix(*s.analysis, s.current_weights);
    const auto tail = oracle::greedy_extend(dense(full), 6, s.prefix);
    CHECK(fin.ordering.order == tail);
    for (std::size_t k = 0; k < steps; ++k) CHECK(s.step_log[k].pair == AxisPair{axes[k], axes[k + 1]});
  }
}
