#include "pcorder/error.hpp"

namespace pcorder {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound: return "file_not_found";
    case ErrorCode::EmptyDataset: return "empty_dataset";
    case ErrorCode::NonNumericColumn: return "non_numeric_column";
    case ErrorCode::DuplicateColumnName: return "duplicate_column_name";
    case ErrorCode::UnknownColumn: return "unknown_column";
    case ErrorCode::InvalidHeader: return "invalid_header";
    case ErrorCode::InvalidWindowSpec: return "invalid_window_spec";
    case ErrorCode::InvalidWeights: return "invalid_weights";
    case ErrorCode::InvalidPair: return "invalid_pair";
    case ErrorCode::LengthMismatch: return "length_mismatch";
    case ErrorCode::ZeroBandwidth: return "zero_bandwidth";
    case ErrorCode::NoActiveProperties: return "no_active_properties";
    case ErrorCode::EmptyMatrix: return "empty_matrix";
    case ErrorCode::AxisAlreadyUsed: return "axis_already_used";
    case ErrorCode::BrokenChain: return "broken_chain";
    case ErrorCode::UnknownAxis: return "unknown_axis";
    case ErrorCode::NothingToUndo: return "nothing_to_undo";
    case ErrorCode::UnknownDataset: return "unknown_dataset";
    case ErrorCode::UnknownSession: return "unknown_session";
    case ErrorCode::UnknownJob: return "unknown_job";
    case ErrorCode::MissingSeed: return "missing_seed";
    case ErrorCode::BadRequest: return "bad_request";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::Internal: return "internal";
  }
  return "internal";
}

}  // namespace pcorder
