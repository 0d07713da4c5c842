#include "pcorder/session.hpp"

#include <algorithm>

#include "pcorder/error.hpp"

namespace pcorder {

namespace {

const Analysis& analysis_of(const Session& s) {
  if (!s.analysis) throw Error(ErrorCode::Internal, "session has no analysis attached");
  return *s.analysis;
}

bool is_used(const Session& s, std::size_t axis) {
  return std::find(s.prefix.begin(), s.prefix.end(), axis) != s.prefix.end();
}

}  // namespace

SessionUpdate start_session(std::shared_ptr<const Analysis> analysis, std::string id, std::string dataset_ref,
                            Weights weights, std::uint64_t seed) {
  if (!analysis) throw Error(ErrorCode::Internal, "session needs an analysis");
  weights.require_active();
  Session s;
  s.id = std::move(id);
  s.dataset_ref = std::move(dataset_ref);
  s.current_weights = std::move(weights);
  s.spec = analysis->spec();
  s.seed = seed;
  s.analysis = std::move(analysis);
  ScoreMatrix m = candidate_matrix(s);
  return {std::move(s), std::move(m)};
}

ScoreMatrix candidate_matrix(const Session& session) {
  ScoreMatrix full = build_matrix(analysis_of(session), session.current_weights);
  if (session.prefix.empty()) return full;
  const std::size_t d = full.size();
  const std::size_t tail = session.prefix.back();
  ScoreMatrix restricted;
  restricted.dims = full.dims;
  restricted.cells.resize(d * d);
  restricted.breakdown.resize(d * d);
  for (std::size_t j = 0; j < d; ++j) {
    if (j == tail || is_used(session, j)) continue;
    restricted.cells[tail * d + j] = full.cell(tail, j);
    restricted.breakdown[tail * d + j] = full.cell_breakdown(tail, j);
  }
  return restricted;
}

ScoreMatrix choose_pair(Session& session, std::size_t i, std::size_t j) {
  const std::size_t d = analysis_of(session).dims();
  if (i >= d || j >= d) {
    throw Error(ErrorCode::UnknownAxis, "axis index out of range", {{"i", i}, {"j", j}, {"dims", d}});
  }
  if (session.prefix.empty()) {
    if (i == j) throw Error(ErrorCode::InvalidPair, "axis pair must join two distinct axes", {{"i", i}});
    session.prefix = {i, j};
  } else {
    if (i != session.prefix.back()) {
      throw Error(ErrorCode::BrokenChain, "next pair must start at the current tail axis",
                  {{"i", i}, {"tail", session.prefix.back()}});
    }
    if (is_used(session, j)) {
      throw Error(ErrorCode::AxisAlreadyUsed, "axis " + std::to_string(j) + " is already placed", {{"axis", j}});
    }
    session.prefix.push_back(j);
  }
  session.step_log.push_back({{i, j}, session.current_weights});
  return candidate_matrix(session);
}

ScoreMatrix set_weights(Session& session, const Weights& weights) {
  weights.require_active();
  session.current_weights = weights;
  return candidate_matrix(session);
}

ScoreMatrix undo(Session& session) {
  if (session.prefix.empty()) throw Error(ErrorCode::NothingToUndo, "no axis pair has been chosen yet");
  if (session.prefix.size() == 2) {
    session.prefix.clear();
  } else {
    session.prefix.pop_back();
  }
  if (!session.step_log.empty()) session.step_log.pop_back();
  return candidate_matrix(session);
}

FinalizedOrdering finalize(const Session& session) {
  const Analysis& a = analysis_of(session);
  const ScoreMatrix full = build_matrix(a, session.current_weights);
  FinalizedOrdering out;
  if (session.prefix.empty()) {
    out.ordering = order_greedy(full);
  } else {
    const bool manual = session.prefix.size() == full.size();
    out.ordering = describe_order(full, greedy_complete(full, session.prefix),
                                  manual ? OrderingMethod::Manual : OrderingMethod::Greedy);
  }
  for (const EdgeScore& e : out.ordering.per_edge) out.profiles.push_back(a.profile({e.from, e.to}));
  return out;
}

}  // namespace pcorder
