#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace medclaim {

enum class ErrorCode {
  // he_engine
  InvalidParams,
  SlotOverflow,
  NonFiniteInput,
  KeyParamsMismatch,
  LevelMismatch,
  ScaleMismatch,
  NoLevelsRemaining,
  MissingRotationKey,
  // decision_model
  DegenerateColumn,
  SchemaViolation,
  EmptyDataset,
  NonBinaryLabels,
  OutOfRange,
  InvalidInterval,
  // ledger
  CorruptLedger,
  MissingDataLog,
  DuplicateResult,
  DataHashConflict,
  UnknownClaim,
  // envelope
  AuthFailure,
  BadMagic,
  WrongVersion,
  // workflow
  ExchangeUnwritable,
  StaleSubmission,
  PendingResult,
  // cli / general
  FileExists,
  InvalidArgument,
  Io,
  Malformed,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// CorruptLedger carries the index of the first block that failed to verify.
class CorruptLedgerError : public Error {
 public:
  CorruptLedgerError(std::uint64_t index, const std::string& what)
      : Error(ErrorCode::CorruptLedger, "block " + std::to_string(index) + ": " + what),
        index_(index) {}

  std::uint64_t index() const noexcept { return index_; }

 private:
  std::uint64_t index_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace medclaim
