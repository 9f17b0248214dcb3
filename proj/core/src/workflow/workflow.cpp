#include "medclaim/workflow/workflow.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>

#include "medclaim/he/serialize.hpp"

namespace medclaim::workflow {

namespace {

constexpr std::string_view kRequestSuffix = ".request.bin.aes";
constexpr std::string_view kResultSuffix = ".result.bin.aes";

void check_claim_id(const std::string& id) {
  require(valid_claim_id(id), ErrorCode::InvalidArgument, "invalid claim id '" + id + "'");
}

class ClaimLock {
 public:
  ClaimLock(const fs::path& dir, const std::string& claim_id) {
    auto path = dir / (claim_id + ".lock");
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0) fail(ErrorCode::ExchangeUnwritable, "cannot create " + path.string());
    while (::flock(fd_, LOCK_EX) != 0) {
      if (errno != EINTR) {
        ::close(fd_);
        fail(ErrorCode::Io, "cannot lock claim " + claim_id);
      }
    }
  }
  ~ClaimLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  ClaimLock(const ClaimLock&) = delete;
  ClaimLock& operator=(const ClaimLock&) = delete;

 private:
  int fd_ = -1;
};

void write_exchange(const fs::path& path, ByteView data) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  try {
    write_file_atomic(path, data);
  } catch (const Error& e) {
    fail(ErrorCode::ExchangeUnwritable, e.what());
  }
}

Check from_ledger(ledger::Reason r) {
  switch (r) {
    case ledger::Reason::UnknownClaim: return Check::UnknownClaim;
    case ledger::Reason::DataHashMismatch: return Check::DataHashMismatch;
    case ledger::Reason::ResultHashMismatch: return Check::ResultHashMismatch;
    case ledger::Reason::ResultMissing: return Check::ResultMissing;
    case ledger::Reason::OrderViolation: return Check::OrderViolation;
  }
  return Check::UnknownClaim;
}

}  // namespace

fs::path request_path(const fs::path& dir, const std::string& id) { return dir / (id + std::string(kRequestSuffix)); }
fs::path result_path(const fs::path& dir, const std::string& id) { return dir / (id + std::string(kResultSuffix)); }

bool valid_claim_id(const std::string& id) {
  if (id.empty() || id.size() > 64 || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

std::string new_claim_id(Prng& prng) { return to_hex(prng.bytes(16)); }

Client Client::load(const fs::path& private_context, const fs::path& sym_key, const fs::path& model_file) {
  Client c;
  c.keys = he::load_private_context(private_context);
  c.ev = std::make_shared<he::Evaluator>(he::HeContext::create(c.keys.params));
  c.sym = envelope::load_key(sym_key);
  c.norm = model::load_model(model_file).norm;
  return c;
}

Server Server::load(const fs::path& public_context, const fs::path& sym_key, const fs::path& encrypted_model) {
  Server s;
  s.keys = he::load_public_context(public_context);
  s.ev = std::make_shared<he::Evaluator>(he::HeContext::create(s.keys.params));
  s.sym = envelope::load_key(sym_key);
  s.model = model::deserialize_encrypted_model(read_file(encrypted_model), s.ev->context());
  return s;
}

SubmissionReceipt client_submit(const model::RawRecord& record, const Client& client, const fs::path& exchange_dir,
                                ledger::Ledger& ledger, Prng& prng) {
  auto features = model::preprocess(record, client.norm);
  SubmissionReceipt rec;
  rec.claim_id = record.claim_id.empty() ? new_claim_id(prng) : record.claim_id;
  check_claim_id(rec.claim_id);

  auto ct = model::encrypt_features(features, *client.ev, client.keys.public_key, prng);
  auto payload = he::serialize(ct);
  rec.data_hash = envelope::content_hash(payload);

  // Refuse before touching the exchange, so a conflicting resubmission
  // cannot clobber the request the ledger already vouches for.
  if (auto existing = ledger.find_record(rec.claim_id); existing && existing->data_hash != rec.data_hash) {
    fail(ErrorCode::DataHashConflict, "claim " + rec.claim_id + " was already submitted with different data");
  }

  auto path = request_path(exchange_dir, rec.claim_id);
  write_exchange(path, envelope::seal(payload, client.sym).serialize());
  rec.files.push_back(path);
  rec.tx_hash = ledger.log_computation(rec.claim_id, rec.data_hash).tx_hash;
  return rec;
}

ProcessReceipt process_claim(const std::string& claim_id, const Server& server, const fs::path& exchange_dir,
                             ledger::Ledger& ledger) {
  check_claim_id(claim_id);
  ClaimLock lock(exchange_dir, claim_id);
  auto record = ledger.find_record(claim_id);
  if (!record || !record->data_block) fail(ErrorCode::MissingDataLog, "claim " + claim_id + " has no data log");
  if (record->result_hash) fail(ErrorCode::DuplicateResult, "claim " + claim_id + " already processed");

  auto payload = envelope::open(ByteView(read_file(request_path(exchange_dir, claim_id))), server.sym);
  if (envelope::content_hash(payload) != record->data_hash) {
    fail(ErrorCode::StaleSubmission, "request for " + claim_id + " does not match its logged hash");
  }
  const auto& ctx = server.ev->context();
  auto x = he::deserialize_ciphertext(payload, ctx);
  auto out = model::predict_encrypted(x, server.model, *server.ev, server.keys.relin_key, server.keys.galois_keys);

  ProcessReceipt rec;
  rec.claim_id = claim_id;
  auto result = he::serialize(out);
  rec.result_hash = envelope::content_hash(result);
  rec.result_file = result_path(exchange_dir, claim_id);
  write_exchange(rec.result_file, envelope::seal(result, server.sym).serialize());
  rec.tx_hash = ledger.log_computation(claim_id, record->data_hash, rec.result_hash).tx_hash;
  return rec;
}

ProcessReport server_process(const Server& server, const fs::path& exchange_dir, ledger::Ledger& ledger) {
  ProcessReport report;
  std::error_code ec;
  if (!fs::is_directory(exchange_dir, ec)) return report;
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(exchange_dir)) {
    auto name = entry.path().filename().string();
    if (name.size() > kRequestSuffix.size() && name.ends_with(kRequestSuffix)) {
      ids.push_back(name.substr(0, name.size() - kRequestSuffix.size()));
    }
  }
  std::sort(ids.begin(), ids.end());
  for (const auto& id : ids) {
    if (!valid_claim_id(id)) continue;
    auto record = ledger.find_record(id);
    if (!record || !record->data_block || record->result_hash) continue;
    try {
      report.done.push_back(process_claim(id, server, exchange_dir, ledger));
    } catch (const Error& e) {
      report.failed.push_back({id, e.code(), e.what()});
    }
  }
  return report;
}

std::string_view to_string(Check c) {
  switch (c) {
    case Check::Valid: return "Valid";
    case Check::EnvelopeTamper: return "EnvelopeTamper";
    case Check::UnknownClaim: return "UnknownClaim";
    case Check::DataHashMismatch: return "DataHashMismatch";
    case Check::ResultHashMismatch: return "ResultHashMismatch";
    case Check::ResultMissing: return "ResultMissing";
    case Check::OrderViolation: return "OrderViolation";
  }
  return "?";
}

Outcome client_retrieve(const std::string& claim_id, const Client& client, const fs::path& exchange_dir,
                        const ledger::Ledger& ledger) {
  check_claim_id(claim_id);
  auto result_file = result_path(exchange_dir, claim_id);
  if (!fs::exists(result_file)) fail(ErrorCode::PendingResult, "no result yet for claim " + claim_id);
  auto result = read_file(result_file);
  auto request = read_file(request_path(exchange_dir, claim_id));
  return retrieve_from_envelopes(claim_id, request, result, client, ledger);
}

Outcome retrieve_from_envelopes(const std::string& claim_id, ByteView request_env, ByteView result_env,
                                const Client& client, const ledger::Ledger& ledger) {
  Outcome out;
  out.claim_id = claim_id;
  auto open_or_flag = [&](ByteView env, const char* what) -> std::optional<Bytes> {
    try {
      return envelope::open(env, client.sym);
    } catch (const Error& e) {
      out.verification = Check::EnvelopeTamper;
      out.detail = std::string(what) + ": " + e.what();
      return std::nullopt;
    }
  };
  auto result = open_or_flag(result_env, "result envelope");
  if (!result) return out;
  auto request = open_or_flag(request_env, "request envelope");
  if (!request) return out;

  auto v = ledger.verify_computation(claim_id, envelope::content_hash(*request), envelope::content_hash(*result));
  if (!v.valid()) {
    out.verification = from_ledger(*v.reason);
    out.detail = "ledger verification failed";
    return out;
  }
  auto ct = he::deserialize_ciphertext(*result, client.ev->context());
  double y = model::decrypt_slot0(ct, *client.ev, client.keys.secret_key);
  // The cubic leaves [0, 1] for scores beyond the fit interval.
  auto decision = model::decide(std::clamp(y, 0.0, 1.0));
  out.probability = decision.probability;
  out.verdict = decision.verdict;
  return out;
}

}  // namespace medclaim::workflow
