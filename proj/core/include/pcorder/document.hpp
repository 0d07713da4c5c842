#pragma once

#include <cstddef>
#include <optional>

#include "json.hpp"
#include "pcorder/analysis.hpp"
#include "pcorder/ordering.hpp"
#include "pcorder/scoring.hpp"
#include "pcorder/windows.hpp"

// JSON encoding of results. The CLI and the HTTP service both go through
// these functions, so their documents are identical for identical inputs.
namespace pcorder::doc {

using nlohmann::json;

json window_spec_json(const WindowSpec& spec);
json weights_json(const Weights& weights);
/// Accepts either "pos_corr=1,fan=0.5" or {"pos_corr": 1, "fan": 0.5}.
Weights weights_from_json(const json& j);

json matrix_json(const ScoreMatrix& m);
json profile_json(const WindowProfile& p);
/// Profile plus, per window, the member row indices (local-view brushing).
json profile_with_members_json(const WindowProfile& p, const Analysis& a);
WindowProfile profile_from_json(const json& j);

json ordering_json(const OrderingResult& r);
OrderingResult ordering_from_json(const json& j);

/// Share of the total weighted ordering score contributed by each property.
json donut_json(const OrderingResult& r, const Weights& weights);

/// {dims, window_spec, weights, seed, options, matrix, profiles, dropped_rows}
json result_document(const Analysis& a, const Weights& weights, std::size_t dropped_rows);

/// result_document plus {ordering, ordering_profiles, donut}.
json order_document(const Analysis& a, const Weights& weights, std::size_t dropped_rows,
                    const OrderingResult& ordering);

/// Recursively checks that every number is finite; returns the JSON pointer
/// of the first offender.
std::optional<std::string> find_non_finite(const json& j);

}  // namespace pcorder::doc
