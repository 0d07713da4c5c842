#include "pcorder/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pcorder/error.hpp"

namespace pcorder {

namespace {

constexpr double kNoEdge = -std::numeric_limits<double>::infinity();
// Improvements smaller than this are treated as ties, so the earlier
// (lexicographically smaller) order is kept.
constexpr double kTieTolerance = 1e-12;

std::vector<double> dense_scores(const ScoreMatrix& m) {
  const std::size_t d = m.size();
  std::vector<double> s(d * d, kNoEdge);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (i != j && m.cell(i, j)) s[i * d + j] = *m.cell(i, j);
    }
  }
  return s;
}

void require_nonempty(const ScoreMatrix& m) {
  if (m.size() == 0 || m.cells.size() != m.size() * m.size()) {
    throw Error(ErrorCode::EmptyMatrix, "ordering needs a nonempty square score matrix");
  }
}

class BranchAndBound {
 public:
  BranchAndBound(std::size_t d, std::vector<double> scores, double floor_value)
      : d_(d), scores_(std::move(scores)), used_(d, false), best_value_(floor_value) {}

  std::vector<std::size_t> solve() {
    path_.reserve(d_);
    for (std::size_t start = 0; start < d_; ++start) {
      path_.assign(1, start);
      used_[start] = true;
      descend(0.0);
      used_[start] = false;
    }
    return best_path_;
  }

 private:
  double edge(std::size_t i, std::size_t j) const { return scores_[i * d_ + j]; }

  // Partial score plus, for the tail and every unvisited node, its best edge
  // into the unvisited set, minus the smallest such term (the last node of
  // the path has no outgoing edge). A node with no usable edge must be last.
  double upper_bound(double partial) const {
    double sum = 0.0;
    double smallest = std::numeric_limits<double>::infinity();
    int dead_ends = 0;
    auto add = [&](std::size_t from) {
      double b = kNoEdge;
      for (std::size_t j = 0; j < d_; ++j) {
        if (!used_[j] && j != from) b = std::max(b, edge(from, j));
      }
      if (b == kNoEdge) {
        ++dead_ends;
        return;
      }
      sum += b;
      smallest = std::min(smallest, b);
    };
    add(path_.back());
    for (std::size_t v = 0; v < d_; ++v) {
      if (!used_[v]) add(v);
    }
    if (dead_ends > 1) return kNoEdge;
    if (dead_ends == 1) return partial + sum;
    return partial + sum - smallest;
  }

  void descend(double partial) {
    if (path_.size() == d_) {
      if (best_path_.empty() ? partial >= best_value_ : partial > best_value_ + kTieTolerance) {
        best_value_ = partial;
        best_path_ = path_;
      }
      return;
    }
    if (!best_path_.empty() || std::isfinite(best_value_)) {
      const double bound = upper_bound(partial);
      const double threshold = best_path_.empty() ? best_value_ : best_value_ + kTieTolerance;
      if (bound < threshold) return;
    }
    const std::size_t tail = path_.back();
    for (std::size_t next = 0; next < d_; ++next) {
      if (used_[next]) continue;
      const double e = edge(tail, next);
      if (e == kNoEdge) continue;
      used_[next] = true;
      path_.push_back(next);
      descend(partial + e);
      path_.pop_back();
      used_[next] = false;
    }
  }

  std::size_t d_;
  std::vector<double> scores_;
  std::vector<bool> used_;
  std::vector<std::size_t> path_;
  std::vector<std::size_t> best_path_;
  double best_value_;
};

}  // namespace

std::string_view ordering_method_name(OrderingMethod m) {
  switch (m) {
    case OrderingMethod::Greedy: return "greedy";
    case OrderingMethod::Manual: return "manual";
    case OrderingMethod::BranchAndBound: break;
  }
  return "branch_and_bound";
}

OrderingResult describe_order(const ScoreMatrix& matrix, std::vector<std::size_t> order, OrderingMethod method) {
  OrderingResult res;
  res.method = method;
  res.order = std::move(order);
  for (std::size_t k = 0; k + 1 < res.order.size(); ++k) {
    const std::size_t i = res.order[k];
    const std::size_t j = res.order[k + 1];
    EdgeScore e{i, j, matrix.cell(i, j).value_or(0.0), matrix.cell_breakdown(i, j).value_or(PropertyMap<double>{})};
    res.total_score += e.score;
    res.per_edge.push_back(e);
  }
  return res;
}

std::vector<std::size_t> greedy_complete(const ScoreMatrix& matrix, std::vector<std::size_t> prefix) {
  const std::size_t d = matrix.size();
  std::vector<bool> used(d, false);
  for (std::size_t v : prefix) used.at(v) = true;
  while (prefix.size() < d) {
    std::size_t pick = d;
    double best = kNoEdge;
    for (std::size_t j = 0; j < d; ++j) {
      if (used[j]) continue;
      const double s = prefix.empty() ? 0.0 : matrix.cell(prefix.back(), j).value_or(kNoEdge);
      if (pick == d || s > best) {
        best = s;
        pick = j;
      }
    }
    used[pick] = true;
    prefix.push_back(pick);
  }
  return prefix;
}

OrderingResult order_greedy(const ScoreMatrix& matrix) {
  require_nonempty(matrix);
  const std::size_t d = matrix.size();
  if (d == 1) return describe_order(matrix, {0}, OrderingMethod::Greedy);
  std::size_t bi = 0, bj = 1;
  double best = kNoEdge;
  bool found = false;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (i == j || !matrix.cell(i, j)) continue;
      if (!found || *matrix.cell(i, j) > best) {
        best = *matrix.cell(i, j);
        bi = i;
        bj = j;
        found = true;
      }
    }
  }
  return describe_order(matrix, greedy_complete(matrix, {bi, bj}), OrderingMethod::Greedy);
}

OrderingResult order_tsp(const ScoreMatrix& matrix) {
  require_nonempty(matrix);
  const std::size_t d = matrix.size();
  if (d > kMaxExactDims) return order_greedy(matrix);
  if (d == 1) return describe_order(matrix, {0}, OrderingMethod::BranchAndBound);

  // The greedy total is attainable, so it seeds the pruning threshold; the
  // search still visits orders lexicographically and keeps the first one
  // reaching it, which preserves the tie-break rule.
  const double seed_value = order_greedy(matrix).total_score;
  const double floor_value = std::isfinite(seed_value) ? seed_value - 1e-9 : kNoEdge;
  BranchAndBound solver(d, dense_scores(matrix), floor_value);
  auto best = solver.solve();
  if (best.empty()) {
    // every path hits a missing edge; fall back to index order
    best.resize(d);
    for (std::size_t k = 0; k < d; ++k) best[k] = k;
  }
  return describe_order(matrix, std::move(best), OrderingMethod::BranchAndBound);
}

}  // namespace pcorder
