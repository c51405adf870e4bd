#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dtscore {

enum class Errc {
  // data model
  InvalidRecord,
  DuplicateOrder,
  OrderGap,
  // embeddings
  EmptyInput,
  DimensionMismatch,
  BackendUnavailable,
  CacheCorrupt,
  // scoring and statistics
  DegenerateVector,
  ZeroVariance,
  InsufficientData,
  AlignmentError,
  DegenerateCorrelation,
  InvalidCorrelationMatrix,
  IncompleteMatrix,
  DegenerateAnova,
  NotAttainable,
  IncompleteTable,
  InvalidArgument,
  // io
  SchemaError,
  ParseError,
  RangeError,
  ConfigError,
  IoError,
  GroupCountError,
};

std::string_view errc_name(Errc code) noexcept;

// Every failure surfaced by the library is an Error carrying a machine-readable
// code; the message holds the row/model/order context.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code), detail_(message) {}

  Errc code() const noexcept { return code_; }
  // Message without the code-name prefix, for rewrapping with more context.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace dtscore
