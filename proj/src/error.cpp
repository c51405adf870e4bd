#include "dtscore/error.hpp"

namespace dtscore {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidRecord: return "InvalidRecord";
    case Errc::DuplicateOrder: return "DuplicateOrder";
    case Errc::OrderGap: return "OrderGap";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::BackendUnavailable: return "BackendUnavailable";
    case Errc::CacheCorrupt: return "CacheCorrupt";
    case Errc::DegenerateVector: return "DegenerateVector";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::AlignmentError: return "AlignmentError";
    case Errc::DegenerateCorrelation: return "DegenerateCorrelation";
    case Errc::InvalidCorrelationMatrix: return "InvalidCorrelationMatrix";
    case Errc::IncompleteMatrix: return "IncompleteMatrix";
    case Errc::DegenerateAnova: return "DegenerateAnova";
    case Errc::NotAttainable: return "NotAttainable";
    case Errc::IncompleteTable: return "IncompleteTable";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::SchemaError: return "SchemaError";
    case Errc::ParseError: return "ParseError";
    case Errc::RangeError: return "RangeError";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
    case Errc::GroupCountError: return "GroupCountError";
  }
  return "Unknown";
}

}  // namespace dtscore
