#include "medclaim/ledger/ledger.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <sstream>

#include "medclaim/envelope/envelope.hpp"
#include "medclaim/error.hpp"

namespace medclaim::ledger {

namespace {

constexpr std::size_t kHeaderSize = 4 + 2;
constexpr std::uint32_t kMaxBlockSize = 1u << 20;

std::uint64_t now_ms() {
  using namespace std::chrono;
  return static_cast<std::uint64_t>(duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count());
}

Bytes header() {
  ByteWriter w;
  w.magic(kMagic);
  w.u16(kVersion);
  return std::move(w).bytes();
}

Block decode_block(ByteView body) {
  ByteReader r(body);
  Block b;
  b.index = r.u64();
  auto prev = r.raw(32);
  std::copy(prev.begin(), prev.end(), b.prev_hash.begin());
  b.payload = r.blob();
  b.timestamp = r.u64();
  auto h = r.raw(32);
  std::copy(h.begin(), h.end(), b.block_hash.begin());
  if (!r.done()) fail(ErrorCode::Malformed, "trailing bytes in block");
  return b;
}

ChainStatus bad(std::uint64_t index, std::string detail) { return {index, std::move(detail)}; }

ChainStatus parse_chain(ByteView data, std::vector<Block>& out) {
  out.clear();
  ByteReader r(data);
  if (!r.expect_magic(kMagic)) return bad(0, "bad magic");
  if (r.remaining() < 2 || r.u16() != kVersion) return bad(0, "unsupported version");
  while (!r.done()) {
    const std::uint64_t i = out.size();
    Block b;
    try {
      auto len = r.u32();
      if (len > kMaxBlockSize) return bad(i, "block length out of range");
      b = decode_block(r.raw(len));
    } catch (const Error& e) {
      return bad(i, e.what());
    }
    if (b.index != i) return bad(i, "index " + std::to_string(b.index) + " at position " + std::to_string(i));
    const Hash expected_prev = i == 0 ? Hash{} : out.back().block_hash;
    if (b.prev_hash != expected_prev) return bad(i, "prev_hash does not link to predecessor");
    if (b.compute_hash() != b.block_hash) return bad(i, "block_hash mismatch");
    try {
      auto tx = Transaction::parse(b.payload);
      if ((i == 0) != (tx.op == OpTag::Genesis)) return bad(i, "genesis transaction misplaced");
    } catch (const Error& e) {
      return bad(i, e.what());
    }
    out.push_back(std::move(b));
  }
  if (out.empty()) return bad(0, "missing genesis block");
  return {};
}

// Advisory whole-file lock; serializes writers across processes.
class FileLock {
 public:
  FileLock(const std::filesystem::path& path, bool exclusive, bool create) {
    fd_ = ::open(path.c_str(), create ? (O_RDWR | O_CREAT) : O_RDONLY, 0644);
    if (fd_ < 0) fail(ErrorCode::Io, "cannot open ledger " + path.string() + ": " + std::strerror(errno));
    while (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
      if (errno != EINTR) {
        ::close(fd_);
        fail(ErrorCode::Io, "cannot lock ledger");
      }
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

  Bytes read_all() const {
    Bytes out;
    std::uint8_t buf[65536];
    ::lseek(fd_, 0, SEEK_SET);
    for (;;) {
      ssize_t n = ::read(fd_, buf, sizeof buf);
      if (n < 0 && errno == EINTR) continue;
      if (n < 0) fail(ErrorCode::Io, "ledger read failed");
      if (n == 0) break;
      out.insert(out.end(), buf, buf + n);
    }
    return out;
  }

  void append(ByteView data) const {
    ::lseek(fd_, 0, SEEK_END);
    std::size_t off = 0;
    while (off < data.size()) {
      ssize_t n = ::write(fd_, data.data() + off, data.size() - off);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) fail(ErrorCode::Io, "ledger write failed");
      off += static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) fail(ErrorCode::Io, "ledger fsync failed");
  }

 private:
  int fd_ = -1;
};

Bytes framed(const Block& b) {
  auto body = b.encode();
  ByteWriter w;
  w.blob(body);
  return std::move(w).bytes();
}

void check_hash_arg(const std::string& h, const char* what) {
  require(is_hex64(h), ErrorCode::InvalidArgument, std::string(what) + " must be 64 lowercase hex characters");
}

}  // namespace

std::string_view to_string(OpTag tag) {
  switch (tag) {
    case OpTag::Genesis: return "genesis";
    case OpTag::LogData: return "log_data";
    case OpTag::LogResult: return "log_result";
  }
  return "?";
}

std::string_view to_string(Reason r) {
  switch (r) {
    case Reason::UnknownClaim: return "UnknownClaim";
    case Reason::DataHashMismatch: return "DataHashMismatch";
    case Reason::ResultHashMismatch: return "ResultHashMismatch";
    case Reason::ResultMissing: return "ResultMissing";
    case Reason::OrderViolation: return "OrderViolation";
  }
  return "?";
}

Bytes Transaction::canonical() const {
  ByteWriter w;
  w.str(claim_id);
  w.str(data_hash);
  w.str(result_hash);
  w.str(to_string(op));
  return std::move(w).bytes();
}

Transaction Transaction::parse(ByteView payload) {
  ByteReader r(payload);
  Transaction t;
  t.claim_id = r.str();
  t.data_hash = r.str();
  t.result_hash = r.str();
  auto tag = r.str();
  if (!r.done()) fail(ErrorCode::Malformed, "trailing bytes in transaction");
  if (tag == "genesis") {
    t.op = OpTag::Genesis;
  } else if (tag == "log_data") {
    t.op = OpTag::LogData;
  } else if (tag == "log_result") {
    t.op = OpTag::LogResult;
  } else {
    fail(ErrorCode::Malformed, "unknown op tag");
  }
  return t;
}

std::string Transaction::tx_hash() const { return "0x" + envelope::content_hash(canonical()); }

Hash Block::compute_hash() const {
  ByteWriter w;
  w.u64(index);
  w.raw(prev_hash);
  w.blob(payload);
  w.u64(timestamp);
  return envelope::sha256(w.bytes());
}

Bytes Block::encode() const {
  ByteWriter w;
  w.u64(index);
  w.raw(prev_hash);
  w.blob(payload);
  w.u64(timestamp);
  w.raw(block_hash);
  return std::move(w).bytes();
}

void write_ledger_file(const std::filesystem::path& path, const std::vector<Block>& blocks) {
  ByteWriter w;
  w.raw(header());
  for (const auto& b : blocks) w.raw(framed(b));
  write_file_atomic(path, w.bytes());
}

ChainStatus verify_chain_bytes(ByteView data) {
  std::vector<Block> blocks;
  return parse_chain(data, blocks);
}

ChainStatus verify_chain_file(const std::filesystem::path& path) {
  FileLock lock(path, false, false);
  return verify_chain_bytes(lock.read_all());
}

std::map<std::string, ComputationRecord> replay(const std::vector<Block>& blocks) {
  std::map<std::string, ComputationRecord> records;
  for (const auto& b : blocks) {
    auto tx = Transaction::parse(b.payload);
    if (tx.op == OpTag::Genesis) continue;
    auto& rec = records[tx.claim_id];
    rec.claim_id = tx.claim_id;
    if (tx.op == OpTag::LogData) {
      if (rec.data_block) continue;
      rec.data_hash = tx.data_hash;
      rec.ts_data = b.timestamp;
      rec.data_block = b.index;
    } else {
      if (rec.data_hash.empty()) rec.data_hash = tx.data_hash;
      if (rec.result_block) continue;
      rec.result_hash = tx.result_hash;
      rec.ts_result = b.timestamp;
      rec.result_block = b.index;
    }
  }
  return records;
}

std::string dump(const std::vector<Block>& blocks) {
  std::ostringstream os;
  for (const auto& b : blocks) {
    auto tx = Transaction::parse(b.payload);
    os << "block " << b.index << "\n"
       << "  timestamp_ms: " << b.timestamp << "\n"
       << "  prev_hash:    " << to_hex(b.prev_hash) << "\n"
       << "  block_hash:   " << to_hex(b.block_hash) << "\n"
       << "  op:           " << to_string(tx.op) << "\n"
       << "  tx_hash:      " << tx.tx_hash() << "\n";
    if (tx.op != OpTag::Genesis) {
      os << "  claim_id:     " << tx.claim_id << "\n"
         << "  data_hash:    " << tx.data_hash << "\n";
      if (!tx.result_hash.empty()) os << "  result_hash:  " << tx.result_hash << "\n";
    }
  }
  return os.str();
}

Ledger::Ledger(std::filesystem::path path) : path_(std::move(path)), mu_(std::make_unique<std::mutex>()) {}
Ledger::Ledger(Ledger&&) noexcept = default;
Ledger& Ledger::operator=(Ledger&&) noexcept = default;
Ledger::~Ledger() = default;

Ledger Ledger::init(const std::filesystem::path& path) {
  Ledger ledger(path);
  FileLock lock(path, true, true);
  auto data = lock.read_all();
  if (data.empty()) {
    Block genesis;
    genesis.payload = Transaction{}.canonical();
    genesis.timestamp = now_ms();
    genesis.seal();
    ByteWriter w;
    w.raw(header());
    w.raw(framed(genesis));
    lock.append(w.bytes());
    return ledger;
  }
  std::vector<Block> blocks;
  auto status = parse_chain(data, blocks);
  if (!status.valid()) throw CorruptLedgerError(*status.first_bad_index, status.detail);
  return ledger;
}

Ledger::State Ledger::load_locked() const {
  FileLock lock(path_, false, false);
  State s;
  auto status = parse_chain(lock.read_all(), s.blocks);
  if (!status.valid()) throw CorruptLedgerError(*status.first_bad_index, status.detail);
  s.records = replay(s.blocks);
  return s;
}

TxReceipt Ledger::log_computation(const std::string& claim_id, const std::string& data_hash,
                                  const std::optional<std::string>& result_hash) {
  require(!claim_id.empty(), ErrorCode::InvalidArgument, "claim_id must not be empty");
  check_hash_arg(data_hash, "data_hash");
  if (result_hash) check_hash_arg(*result_hash, "result_hash");

  std::lock_guard guard(*mu_);
  FileLock lock(path_, true, true);
  std::vector<Block> blocks;
  auto status = parse_chain(lock.read_all(), blocks);
  if (!status.valid()) throw CorruptLedgerError(*status.first_bad_index, status.detail);
  auto records = replay(blocks);
  auto it = records.find(claim_id);

  Transaction tx{result_hash ? OpTag::LogResult : OpTag::LogData, claim_id, data_hash, result_hash.value_or("")};
  if (!result_hash) {
    if (it != records.end() && it->second.data_block) {
      const auto& rec = it->second;
      if (rec.data_hash != data_hash) {
        fail(ErrorCode::DataHashConflict, "claim " + claim_id + " already logged with a different data hash");
      }
      return {tx.tx_hash(), *rec.data_block, *rec.ts_data};
    }
  } else {
    if (it == records.end() || !it->second.data_block) {
      fail(ErrorCode::MissingDataLog, "no data log for claim " + claim_id);
    }
    const auto& rec = it->second;
    if (rec.result_block) fail(ErrorCode::DuplicateResult, "claim " + claim_id + " already has a result");
    if (rec.data_hash != data_hash) {
      fail(ErrorCode::DataHashConflict, "result log data hash differs from the stored data hash");
    }
  }

  Block b;
  b.index = blocks.size();
  b.prev_hash = blocks.back().block_hash;
  b.payload = tx.canonical();
  b.timestamp = std::max(now_ms(), blocks.back().timestamp);
  b.seal();
  lock.append(framed(b));
  return {tx.tx_hash(), b.index, b.timestamp};
}

Verification Ledger::verify_computation(const std::string& claim_id, const std::string& data_hash,
                                        const std::string& result_hash) const {
  auto rec = find_record(claim_id);
  if (!rec) return Verification::invalid(Reason::UnknownClaim);
  if (!rec->data_block) return Verification::invalid(Reason::OrderViolation);
  if (rec->result_block && (*rec->result_block < *rec->data_block || *rec->ts_data > *rec->ts_result)) {
    return Verification::invalid(Reason::OrderViolation);
  }
  if (rec->data_hash != data_hash) return Verification::invalid(Reason::DataHashMismatch);
  if (!rec->result_hash) return Verification::invalid(Reason::ResultMissing);
  if (*rec->result_hash != result_hash) return Verification::invalid(Reason::ResultHashMismatch);
  return Verification::ok();
}

ChainStatus Ledger::verify_chain() const { return verify_chain_file(path_); }

std::optional<ComputationRecord> Ledger::find_record(const std::string& claim_id) const {
  auto s = load_locked();
  auto it = s.records.find(claim_id);
  if (it == s.records.end()) return std::nullopt;
  return it->second;
}

ComputationRecord Ledger::get_record(const std::string& claim_id) const {
  auto rec = find_record(claim_id);
  if (!rec) fail(ErrorCode::UnknownClaim, "no record for claim " + claim_id);
  return *rec;
}

std::vector<Block> Ledger::blocks() const { return load_locked().blocks; }

std::vector<ComputationRecord> Ledger::records() const {
  std::vector<ComputationRecord> out;
  for (auto& [id, rec] : load_locked().records) out.push_back(rec);
  return out;
}

}  // namespace medclaim::ledger
