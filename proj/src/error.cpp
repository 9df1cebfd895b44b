#include "notetok/error.hpp"

namespace notetok {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::TruncatedChunk: return "TruncatedChunk";
    case ErrorCode::BadVlq: return "BadVlq";
    case ErrorCode::MalformedEvent: return "MalformedEvent";
    case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::EmptyScore: return "EmptyScore";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnknownToken: return "UnknownToken";
    case ErrorCode::BarOverflow: return "BarOverflow";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptConfig: return "CorruptConfig";
    case ErrorCode::TargetTooSmall: return "TargetTooSmall";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace notetok
