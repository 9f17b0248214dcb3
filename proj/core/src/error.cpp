#include "medclaim/error.hpp"

namespace medclaim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::SlotOverflow: return "SlotOverflow";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::KeyParamsMismatch: return "KeyParamsMismatch";
    case ErrorCode::LevelMismatch: return "LevelMismatch";
    case ErrorCode::ScaleMismatch: return "ScaleMismatch";
    case ErrorCode::NoLevelsRemaining: return "NoLevelsRemaining";
    case ErrorCode::MissingRotationKey: return "MissingRotationKey";
    case ErrorCode::DegenerateColumn: return "DegenerateColumn";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::NonBinaryLabels: return "NonBinaryLabels";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidInterval: return "InvalidInterval";
    case ErrorCode::CorruptLedger: return "CorruptLedger";
    case ErrorCode::MissingDataLog: return "MissingDataLog";
    case ErrorCode::DuplicateResult: return "DuplicateResult";
    case ErrorCode::DataHashConflict: return "DataHashConflict";
    case ErrorCode::UnknownClaim: return "UnknownClaim";
    case ErrorCode::AuthFailure: return "AuthFailure";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::WrongVersion: return "WrongVersion";
    case ErrorCode::ExchangeUnwritable: return "ExchangeUnwritable";
    case ErrorCode::StaleSubmission: return "StaleSubmission";
    case ErrorCode::PendingResult: return "PendingResult";
    case ErrorCode::FileExists: return "FileExists";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Malformed: return "Malformed";
  }
  return "Unknown";
}

}  // namespace medclaim
