#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

namespace pcorder {

/// Machine-readable error codes shared by the engine, the CLI and the HTTP
/// API. The string values are part of the public wire format.
enum class ErrorCode {
  FileNotFound,
  EmptyDataset,
  NonNumericColumn,
  DuplicateColumnName,
  UnknownColumn,
  InvalidHeader,
  InvalidWindowSpec,
  InvalidWeights,
  InvalidPair,
  LengthMismatch,
  ZeroBandwidth,
  NoActiveProperties,
  EmptyMatrix,
  AxisAlreadyUsed,
  BrokenChain,
  UnknownAxis,
  NothingToUndo,
  UnknownDataset,
  UnknownSession,
  UnknownJob,
  MissingSeed,
  BadRequest,
  NotFound,
  Internal,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, nlohmann::json detail = nullptr)
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view code_name() const { return error_code_name(code_); }
  const nlohmann::json& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  nlohmann::json detail_;
};

}  // namespace pcorder
