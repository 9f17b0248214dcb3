#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "medclaim/error.hpp"

namespace medclaim::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kUsage = 2,
  kCryptoOrLedger = 3,
};

/// 2 for caller mistakes (bad flags, schema, parameters, existing files),
/// 3 for everything crypto, ledger, workflow or I/O related.
int exit_code_for(ErrorCode code);

/// Environment variable naming a config file when --config is absent.
inline constexpr const char* kConfigEnv = "MEDCLAIM_CONFIG";

/// Whole command line, argv[0] included. Never throws.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace medclaim::cli
