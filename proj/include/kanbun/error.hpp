#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace kanbun {

enum class ErrorCode {
  // core
  EmptyInput,
  NonCjkCharacter,
  InvalidUtf8,
  InvalidOrder,
  BadCharTable,
  // kanbun-parse
  UnalignableKanji,
  AmbiguousAlignment,
  UncoveredSource,
  LeadingKana,
  NonKanbunCharacter,
  BadEscape,
  // kaeriten
  UnrepresentableOrder,
  MalformedMarks,
  LengthTooLarge,
  // reorder
  EmptyScores,
  EmptyCorpus,
  BadModel,
  // metrics
  LengthMismatch,
  EmptyList,
  EmptyText,
  ZeroVariance,
  UnequalRaterCounts,
  DegenerateAgreement,
  // corpus
  ParseError,
  DuplicateId,
  TooFewGroups,
  BadSplitSpec,
  Io,
};

std::string_view error_code_name(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// An Error tied to a line of an input file.
class LocatedError : public Error {
 public:
  LocatedError(ErrorCode code, std::string file, std::size_t line, const std::string& message)
      : Error(code, message), file_(std::move(file)), line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

}  // namespace kanbun
