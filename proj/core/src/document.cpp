#include "pcorder/document.hpp"

#include <cmath>

#include "pcorder/error.hpp"

namespace pcorder::doc {

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json breakdown_json(const PropertyMap<double>& b) {
  json out = json::object();
  for (PropertyId p : kAllProperties) out[std::string(property_key(p))] = b[p];
  return out;
}

PropertyMap<double> breakdown_from_json(const json& j) {
  PropertyMap<double> b{};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (auto p = property_from_key(it.key())) b[*p] = it.value().get<double>();
  }
  return b;
}

OrderingMethod method_from_name(const std::string& s) {
  if (s == "greedy") return OrderingMethod::Greedy;
  if (s == "manual") return OrderingMethod::Manual;
  if (s == "branch_and_bound") return OrderingMethod::BranchAndBound;
  throw Error(ErrorCode::BadRequest, "unknown ordering method '" + s + "'");
}

std::string escape_pointer_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

void scan(const json& j, const std::string& path, std::optional<std::string>& bad) {
  if (bad) return;
  if (j.is_number_float()) {
    if (!std::isfinite(j.get<double>())) bad = path.empty() ? "/" : path;
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) scan(j[i], path + "/" + std::to_string(i), bad);
  } else if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) scan(it.value(), path + "/" + escape_pointer_token(it.key()), bad);
  }
}

}  // namespace

json window_spec_json(const WindowSpec& spec) {
  return {{"window_fraction", spec.window_fraction}, {"stride_fraction", spec.stride_fraction}};
}

json weights_json(const Weights& weights) {
  json out = json::object();
  for (PropertyId p : kAllProperties) out[std::string(property_key(p))] = weights[p];
  return out;
}

Weights weights_from_json(const json& j) {
  if (j.is_string()) return Weights::parse(j.get<std::string>());
  if (!j.is_object()) throw Error(ErrorCode::InvalidWeights, "weights must be a string or an object");
  Weights w;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto p = property_from_key(it.key());
    if (!p) throw Error(ErrorCode::InvalidWeights, "unknown property '" + it.key() + "'", {{"property", it.key()}});
    if (!it.value().is_number()) {
      throw Error(ErrorCode::InvalidWeights, "weight for '" + it.key() + "' is not a number", {{"property", it.key()}});
    }
    w.set(*p, it.value().get<double>());
  }
  return w;
}

json matrix_json(const ScoreMatrix& m) {
  const std::size_t d = m.size();
  json cells = json::array();
  json breakdown = json::array();
  for (std::size_t i = 0; i < d; ++i) {
    json crow = json::array();
    json brow = json::array();
    for (std::size_t j = 0; j < d; ++j) {
      crow.push_back(optional_number(m.cell(i, j)));
      const auto& b = m.cell_breakdown(i, j);
      brow.push_back(b ? breakdown_json(*b) : json(nullptr));
    }
    cells.push_back(std::move(crow));
    breakdown.push_back(std::move(brow));
  }
  return {{"cells", std::move(cells)}, {"breakdown", std::move(breakdown)}};
}

json profile_json(const WindowProfile& p) {
  json per_property = json::object();
  for (PropertyId prop : kAllProperties) {
    json series = json::array();
    for (const auto& v : p.per_property[prop]) series.push_back(optional_number(v));
    per_property[std::string(property_key(prop))] = std::move(series);
  }
  json bounds = json::array();
  for (const auto& [lo, hi] : p.window_bounds) bounds.push_back({lo, hi});
  return {{"pair", {p.pair.primary, p.pair.secondary}},
          {"window_bounds", std::move(bounds)},
          {"n_points", p.n_points},
          {"per_property", std::move(per_property)}};
}

json profile_with_members_json(const WindowProfile& p, const Analysis& a) {
  json out = profile_json(p);
  json members = json::array();
  for (const Window& w : a.windows(p.pair.primary)) members.push_back(w.member_rows);
  out["member_rows"] = std::move(members);
  return out;
}

WindowProfile profile_from_json(const json& j) {
  WindowProfile p;
  p.pair = {j.at("pair").at(0).get<std::size_t>(), j.at("pair").at(1).get<std::size_t>()};
  for (const auto& b : j.at("window_bounds")) p.window_bounds.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
  p.n_points = j.at("n_points").get<std::vector<std::size_t>>();
  const json& pp = j.at("per_property");
  for (PropertyId prop : kAllProperties) {
    for (const auto& v : pp.at(std::string(property_key(prop)))) {
      p.per_property[prop].push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
    }
  }
  return p;
}

json ordering_json(const OrderingResult& r) {
  json edges = json::array();
  for (const EdgeScore& e : r.per_edge) {
    edges.push_back({{"from", e.from}, {"to", e.to}, {"score", e.score}, {"breakdown", breakdown_json(e.breakdown)}});
  }
  return {{"order", r.order},
          {"total_score", r.total_score},
          {"per_edge", std::move(edges)},
          {"method", std::string(ordering_method_name(r.method))}};
}

OrderingResult ordering_from_json(const json& j) {
  OrderingResult r;
  r.order = j.at("order").get<std::vector<std::size_t>>();
  r.total_score = j.at("total_score").get<double>();
  r.method = method_from_name(j.at("method").get<std::string>());
  for (const auto& e : j.at("per_edge")) {
    r.per_edge.push_back({e.at("from").get<std::size_t>(), e.at("to").get<std::size_t>(), e.at("score").get<double>(),
                          breakdown_from_json(e.at("breakdown"))});
  }
  return r;
}

json donut_json(const OrderingResult& r, const Weights& weights) {
  PropertyMap<double> contribution{};
  double total = 0.0;
  for (const EdgeScore& e : r.per_edge) {
    for (PropertyId p : kAllProperties) {
      const double c = weights[p] * e.breakdown[p];
      contribution[p] += c;
      total += c;
    }
  }
  json out = json::object();
  for (PropertyId p : kAllProperties) {
    out[std::string(property_key(p))] = total > 0.0 ? contribution[p] / total : 0.0;
  }
  return out;
}

json result_document(const Analysis& a, const Weights& weights, std::size_t dropped_rows) {
  const ScoreMatrix m = build_matrix(a, weights);
  json profiles = json::array();
  for (std::size_t i = 0; i < a.dims(); ++i) {
    for (std::size_t j = 0; j < a.dims(); ++j) {
      if (i != j) profiles.push_back(profile_json(a.profile({i, j})));
    }
  }
  return {{"dims", a.names()},
          {"window_spec", window_spec_json(a.spec())},
          {"weights", weights_json(weights)},
          {"seed", a.options().seed},
          {"options", {{"permutations", a.options().permutations}, {"fan_bins", a.options().fan_bins}}},
          {"matrix", matrix_json(m)},
          {"profiles", std::move(profiles)},
          {"dropped_rows", dropped_rows}};
}

json order_document(const Analysis& a, const Weights& weights, std::size_t dropped_rows,
                    const OrderingResult& ordering) {
  json out = result_document(a, weights, dropped_rows);
  json edge_profiles = json::array();
  for (const EdgeScore& e : ordering.per_edge) edge_profiles.push_back(profile_json(a.profile({e.from, e.to})));
  out["ordering"] = ordering_json(ordering);
  out["ordering_profiles"] = std::move(edge_profiles);
  out["donut"] = donut_json(ordering, weights);
  return out;
}

std::optional<std::string> find_non_finite(const json& j) {
  std::optional<std::string> bad;
  scan(j, "", bad);
  return bad;
}

}  // namespace pcorder::doc
