#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "pcorder/document.hpp"
#include "pcorder/error.hpp"
#include "pcorder/session.hpp"

using namespace pcorder;
using nlohmann::json;

namespace {

const Analysis& small_analysis() {
  static const Analysis a = [] {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0, 1);
    std::vector<Dataset::NamedSeries> s;
    for (int d = 0; d < 4; ++d) {
      std::vector<double> v(150);
      for (double& x : v) x = g(rng);
      s.push_back({"k" + std::to_string(d), std::move(v)});
    }
    return Analysis::compute(Dataset::from_columns("small", std::move(s)), WindowSpec{0.25, 0.125}, {.seed = 12});
  }();
  return a;
}

}  // namespace

TEST_CASE("weights round trip in both encodings") {
  const auto w = Weights::parse("pos_corr=1,split_up=0.25");
  const json j = doc::weights_json(w);
  CHECK(j.size() == kPropertyCount);
  CHECK(j["split_up"] == 0.25);
  CHECK(doc::weights_from_json(j) == w);
  CHECK(doc::weights_from_json(json("pos_corr=1,split_up=0.25")) == w);
  CHECK_THROWS_AS(doc::weights_from_json(json{{"nope", 1}}), Error);
  CHECK_THROWS_AS(doc::weights_from_json(json{{"fan", "x"}}), Error);
  CHECK_THROWS_AS(doc::weights_from_json(json(3)), Error);
}

TEST_CASE("matrix schema") {
  const auto m = build_matrix(small_analysis(), Weights::single(PropertyId::Fan));
  const json j = doc::matrix_json(m);
  REQUIRE(j["cells"].size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    REQUIRE(j["cells"][i].size() == 4);
    CHECK(j["cells"][i][i].is_null());
    CHECK(j["breakdown"][i][i].is_null());
    for (std::size_t k = 0; k < 4; ++k) {
      if (k == i) continue;
      CHECK(j["cells"][i][k].get<double>() == *m.cell(i, k));
      CHECK(j["breakdown"][i][k].size() == kPropertyCount);
    }
  }
}

TEST_CASE("profile round trip") {
  const auto& p = small_analysis().profile({1, 3});
  const json j = doc::profile_json(p);
  CHECK(j["pair"] == json::array({1, 3}));
  CHECK(j["window_bounds"].size() == p.window_count());
  const auto back = doc::profile_from_json(json::parse(j.dump()));
  CHECK(back.pair == p.pair);
  CHECK(back.window_bounds == p.window_bounds);
  CHECK(back.n_points == p.n_points);
  CHECK(back.per_property == p.per_property);

  const json members = doc::profile_with_members_json(p, small_analysis());
  REQUIRE(members["member_rows"].size() == p.window_count());
  for (std::size_t w = 0; w < p.window_count(); ++w) CHECK(members["member_rows"][w].size() == p.n_points[w]);
}

TEST_CASE("finalized ordering round trips losslessly") {
  auto a = std::make_shared<const Analysis>(small_analysis());
  auto [s, m] = start_session(a, "s-1", "ds-1", Weights::parse("pos_corr=1,fan=0.3"), 12);
  choose_pair(s, 2, 0);
  const auto fin = finalize(s);
  const auto back = doc::ordering_from_json(json::parse(doc::ordering_json(fin.ordering).dump()));
  CHECK(back.order == fin.ordering.order);
  CHECK(back.total_score == fin.ordering.total_score);
  CHECK(back.method == fin.ordering.method);
  REQUIRE(back.per_edge.size() == fin.ordering.per_edge.size());
  for (std::size_t k = 0; k < back.per_edge.size(); ++k) {
    CHECK(back.per_edge[k].from == fin.ordering.per_edge[k].from);
    CHECK(back.per_edge[k].to == fin.ordering.per_edge[k].to);
    CHECK(back.per_edge[k].score == fin.ordering.per_edge[k].score);
    CHECK(back.per_edge[k].breakdown == fin.ordering.per_edge[k].breakdown);
  }
}

TEST_CASE("donut shares equal per-edge aggregation") {
  const auto w = Weights::parse("pos_corr=1,fan=0.5,clear_grouping=0.2");
  const auto ordering = order_tsp(build_matrix(small_analysis(), w));
  const json donut = doc::donut_json(ordering, w);
  double total = 0;
  PropertyMap<double> parts{};
  for (const auto& e : ordering.per_edge) {
    for (PropertyId p : kAllProperties) {
      parts[p] += w[p] * e.breakdown[p];
      total += w[p] * e.breakdown[p];
    }
  }
  double sum = 0;
  for (PropertyId p : kAllProperties) {
    const double share = donut[std::string(property_key(p))].get<double>();
    CHECK(std::fabs(share - parts[p] / total) < 1e-6);
    sum += share;
  }
  CHECK(sum == doctest::Approx(1.0));
  CHECK(donut["outliers"] == 0.0);
}

TEST_CASE("result and order documents") {
  const auto w = Weights::single(PropertyId::PosCorrelation);
  const json r = doc::result_document(small_analysis(), w, 7);
  CHECK(r["dims"] == json::array({"k0", "k1", "k2", "k3"}));
  CHECK(r["profiles"].size() == 12);
  CHECK(r["dropped_rows"] == 7);
  CHECK(r["seed"] == 12);
  CHECK(r["window_spec"]["window_fraction"] == 0.25);
  CHECK(r["options"]["permutations"] == kDefaultPermutations);
  CHECK_FALSE(doc::find_non_finite(r));

  const auto ordering = order_tsp(build_matrix(small_analysis(), w));
  const json o = doc::order_document(small_analysis(), w, 7, ordering);
  CHECK(o["ordering"]["order"].size() == 4);
  CHECK(o["ordering_profiles"].size() == 3);
  CHECK(o.contains("donut"));
}

TEST_CASE("non-finite detection") {
  json j = {{"a", {1.0, 2.0}}, {"b/c", {{"d", std::numeric_limits<double>::quiet_NaN()}}}};
  CHECK(doc::find_non_finite(j) == std::optional<std::string>("/b~1c/d"));
  j["b/c"]["d"] = 1.0;
  j["a"][1] = std::numeric_limits<double>::infinity();
  CHECK(doc::find_non_finite(j) == std::optional<std::string>("/a/1"));
  CHECK_FALSE(doc::find_non_finite(json{{"x", nullptr}, {"y", 3}}));
}
