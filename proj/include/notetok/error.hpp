#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace notetok {

enum class ErrorCode {
  // midi_io
  MalformedHeader,
  UnsupportedFormat,
  TruncatedChunk,
  BadVlq,
  MalformedEvent,
  ValueOutOfRange,
  // score / tokenizer
  EmptyScore,
  InvalidConfig,
  UnknownToken,
  BarOverflow,
  // persistence
  IoError,
  VersionMismatch,
  CorruptConfig,
  // bpe
  TargetTooSmall,
  EmptyCorpus,
  UnknownId,
  // sequence utilities
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// The single exception type thrown by the library. Callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace notetok
