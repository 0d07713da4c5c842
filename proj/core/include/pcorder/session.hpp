#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pcorder/analysis.hpp"
#include "pcorder/ordering.hpp"
#include "pcorder/scoring.hpp"
#include "pcorder/windows.hpp"

namespace pcorder {

struct StepRecord {
  AxisPair pair;
  Weights weights;

  bool operator==(const StepRecord&) const = default;
};

/// Human-in-the-loop ordering state. The analysis is shared and never
/// mutated; only the prefix, weights and log change.
struct Session {
  std::string id;
  std::string dataset_ref;
  std::vector<std::size_t> prefix;
  Weights current_weights;
  WindowSpec spec;
  std::uint64_t seed = 0;
  std::vector<StepRecord> step_log;
  std::shared_ptr<const Analysis> analysis;

  /// Structural equality of the user-visible state.
  bool same_state(const Session& other) const {
    return id == other.id && dataset_ref == other.dataset_ref && prefix == other.prefix &&
           current_weights == other.current_weights && spec == other.spec && seed == other.seed &&
           step_log == other.step_log;
  }
};

struct SessionUpdate {
  Session session;
  ScoreMatrix matrix;
};

struct FinalizedOrdering {
  OrderingResult ordering;
  std::vector<WindowProfile> profiles;
};

/// Fresh session with an empty prefix and the full matrix.
SessionUpdate start_session(std::shared_ptr<const Analysis> analysis, std::string id, std::string dataset_ref,
                            Weights weights, std::uint64_t seed);

/// Candidate heatmap for the current state: the full matrix before the first
/// step, afterwards only the tail's row restricted to unused axes.
ScoreMatrix candidate_matrix(const Session& session);

/// Fixes (i, j) on an empty prefix, or appends j when i is the current tail.
ScoreMatrix choose_pair(Session& session, std::size_t i, std::size_t j);

ScoreMatrix set_weights(Session& session, const Weights& weights);

/// Drops the last fixed axis; after the first step both axes go.
ScoreMatrix undo(Session& session);

/// The prefix completed greedily from its tail, plus the profiles of every
/// adjacent pair in the final order.
FinalizedOrdering finalize(const Session& session);

}  // namespace pcorder
