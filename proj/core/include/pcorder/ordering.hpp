#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "pcorder/analysis.hpp"
#include "pcorder/properties.hpp"

namespace pcorder {

/// Largest dimensionality solved exactly; above it order_tsp falls back to
/// the greedy path.
inline constexpr std::size_t kMaxExactDims = 15;

/// Manual marks an order fixed entirely by human-in-the-loop choices.
enum class OrderingMethod { BranchAndBound, Greedy, Manual };

std::string_view ordering_method_name(OrderingMethod m);

struct EdgeScore {
  std::size_t from = 0;
  std::size_t to = 0;
  double score = 0.0;
  PropertyMap<double> breakdown{};
};

struct OrderingResult {
  std::vector<std::size_t> order;
  double total_score = 0.0;
  std::vector<EdgeScore> per_edge;
  OrderingMethod method = OrderingMethod::BranchAndBound;
};

/// Maximum-score open Hamiltonian path over the directed cells, found by
/// depth-first branch and bound. Ties go to the lexicographically smallest
/// order. Switches to order_greedy above kMaxExactDims.
OrderingResult order_tsp(const ScoreMatrix& matrix);

/// Starts from the best single edge and keeps appending the best unused
/// successor of the tail.
OrderingResult order_greedy(const ScoreMatrix& matrix);

/// Extends `prefix` greedily from its tail until every axis is used.
std::vector<std::size_t> greedy_complete(const ScoreMatrix& matrix, std::vector<std::size_t> prefix);

/// Builds the result record (edge scores, breakdowns, total) for a fixed order.
OrderingResult describe_order(const ScoreMatrix& matrix, std::vector<std::size_t> order, OrderingMethod method);

}  // namespace pcorder
