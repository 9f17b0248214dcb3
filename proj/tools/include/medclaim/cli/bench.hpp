#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "medclaim/cli/config.hpp"

namespace medclaim::cli {

/// Means over the measured lifecycles. Field names follow the six
/// performance rows they are compared against.
struct MetricsReport {
  std::size_t records = 0;
  double enc_time_per_record_s = 0.0;   // client_submit
  double claim_processing_s = 0.0;      // process_claim
  double dec_time_s = 0.0;              // client_retrieve, checks included
  double contract_exec_s = 0.0;         // one ledger contract call
  double throughput_tps = 0.0;          // ledger transactions per second
  double storage_overhead_ratio = 0.0;  // request envelope bytes / plaintext record bytes
  std::size_t request_bytes = 0;
  std::size_t plaintext_bytes = 0;
  he::HeParams params;
  model::WeightMode weight_mode = model::WeightMode::CtCt;
  std::string hardware;
};

/// Plaintext size of one record: seven float64 features.
inline constexpr std::size_t kPlaintextRecordBytes = 7 * sizeof(double);

/// Runs `n` full lifecycles on synthetic records with fresh keys, model and
/// ledger inside `workdir` (created, and removed afterwards). n = 0 is
/// InvalidArgument.
MetricsReport run_bench(std::size_t n, const Config& cfg, const std::filesystem::path& workdir);

std::string hardware_note();

}  // namespace medclaim::cli
