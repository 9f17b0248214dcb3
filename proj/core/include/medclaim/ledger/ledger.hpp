#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "medclaim/bytes.hpp"

namespace medclaim::ledger {

inline constexpr std::string_view kMagic = "LGR1";
inline constexpr std::uint16_t kVersion = 1;

using Hash = std::array<std::uint8_t, 32>;

enum class OpTag { Genesis, LogData, LogResult };
std::string_view to_string(OpTag tag);

/// One contract call. Serialized as length-prefixed UTF-8 fields in the
/// order claim_id, data_hash, result_hash (empty when absent), op tag.
struct Transaction {
  OpTag op = OpTag::Genesis;
  std::string claim_id;
  std::string data_hash;
  std::string result_hash;

  Bytes canonical() const;
  static Transaction parse(ByteView payload);
  /// "0x" + SHA-256 of the canonical payload.
  std::string tx_hash() const;
};

struct Block {
  std::uint64_t index = 0;
  Hash prev_hash{};
  Bytes payload;
  std::uint64_t timestamp = 0;  // ms, never decreasing along the chain
  Hash block_hash{};

  Hash compute_hash() const;
  void seal() { block_hash = compute_hash(); }
  Bytes encode() const;
};

struct ComputationRecord {
  std::string claim_id;
  std::string data_hash;
  std::optional<std::string> result_hash;
  std::optional<std::uint64_t> ts_data;
  std::optional<std::uint64_t> ts_result;
  std::optional<std::uint64_t> data_block;
  std::optional<std::uint64_t> result_block;
};

struct TxReceipt {
  std::string tx_hash;
  std::uint64_t block_index = 0;
  std::uint64_t timestamp = 0;
};

enum class Reason { UnknownClaim, DataHashMismatch, ResultHashMismatch, ResultMissing, OrderViolation };
std::string_view to_string(Reason r);

struct Verification {
  std::optional<Reason> reason;
  bool valid() const { return !reason; }
  static Verification ok() { return {}; }
  static Verification invalid(Reason r) { return {r}; }
};

struct ChainStatus {
  std::optional<std::uint64_t> first_bad_index;
  std::string detail;
  bool valid() const { return !first_bad_index; }
};

/// Writes a complete ledger file from already-sealed blocks.
void write_ledger_file(const std::filesystem::path& path, const std::vector<Block>& blocks);
/// Parses and validates a ledger image; never throws on corruption.
ChainStatus verify_chain_bytes(ByteView data);
ChainStatus verify_chain_file(const std::filesystem::path& path);

class Ledger {
 public:
  /// Creates the file with a genesis block, or opens and validates an
  /// existing one (throws CorruptLedgerError naming the first bad block).
  static Ledger init(const std::filesystem::path& path);

  Ledger(Ledger&&) noexcept;
  Ledger& operator=(Ledger&&) noexcept;
  ~Ledger();

  /// A data log (no result) creates the record; a result log completes it.
  TxReceipt log_computation(const std::string& claim_id, const std::string& data_hash,
                            const std::optional<std::string>& result_hash = std::nullopt);
  Verification verify_computation(const std::string& claim_id, const std::string& data_hash,
                                  const std::string& result_hash) const;
  ChainStatus verify_chain() const;
  ComputationRecord get_record(const std::string& claim_id) const;
  std::optional<ComputationRecord> find_record(const std::string& claim_id) const;

  std::vector<Block> blocks() const;
  std::vector<ComputationRecord> records() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  explicit Ledger(std::filesystem::path path);

  struct State {
    std::vector<Block> blocks;
    std::map<std::string, ComputationRecord> records;
  };
  /// Re-reads the file under a shared advisory lock.
  State load_locked() const;

  std::filesystem::path path_;
  std::unique_ptr<std::mutex> mu_;
};

/// Records rebuilt by replaying transactions in chain order, without the
/// guards `log_computation` applies; forged ledgers surface as OrderViolation.
std::map<std::string, ComputationRecord> replay(const std::vector<Block>& blocks);

/// Structured text rendering for `ledger show`.
std::string dump(const std::vector<Block>& blocks);

}  // namespace medclaim::ledger
