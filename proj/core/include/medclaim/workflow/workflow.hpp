#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "medclaim/envelope/envelope.hpp"
#include "medclaim/he/keys.hpp"
#include "medclaim/ledger/ledger.hpp"
#include "medclaim/model/encrypted.hpp"

namespace medclaim::workflow {

namespace fs = std::filesystem;

fs::path request_path(const fs::path& exchange_dir, const std::string& claim_id);
fs::path result_path(const fs::path& exchange_dir, const std::string& claim_id);

/// 1-64 characters from [A-Za-z0-9_.-], not starting with '.'; keeps claim
/// ids usable as file names.
bool valid_claim_id(const std::string& id);
/// 128-bit random lowercase hex.
std::string new_claim_id(Prng& prng);

/// Hospital side. Holds the HE secret key (needed only by retrieve).
struct Client {
  std::shared_ptr<const he::Evaluator> ev;
  he::KeyBundle keys;
  envelope::SymmetricKey sym;
  model::NormStats norm;

  static Client load(const fs::path& private_context, const fs::path& sym_key, const fs::path& model_file);
};

/// Insurer side. The key material type cannot carry a secret key.
struct Server {
  std::shared_ptr<const he::Evaluator> ev;
  he::PublicContext keys;
  envelope::SymmetricKey sym;
  model::EncryptedModel model;

  static Server load(const fs::path& public_context, const fs::path& sym_key, const fs::path& encrypted_model);
};

struct SubmissionReceipt {
  std::string claim_id;
  std::string data_hash;
  std::string tx_hash;
  std::vector<fs::path> files;
};

/// Standardize, encrypt, seal and write the request, then log its hash.
SubmissionReceipt client_submit(const model::RawRecord& record, const Client& client, const fs::path& exchange_dir,
                                ledger::Ledger& ledger, Prng& prng);

struct ProcessReceipt {
  std::string claim_id;
  std::string result_hash;
  std::string tx_hash;
  fs::path result_file;
};

/// One claim. Throws MissingDataLog, StaleSubmission, AuthFailure, ...
ProcessReceipt process_claim(const std::string& claim_id, const Server& server, const fs::path& exchange_dir,
                             ledger::Ledger& ledger);

struct ProcessFailure {
  std::string claim_id;
  ErrorCode code;
  std::string message;
};

struct ProcessReport {
  std::vector<ProcessReceipt> done;
  std::vector<ProcessFailure> failed;
};

/// Every request that has a data log and no result yet. Requests not yet
/// logged are left alone (a submit may be in flight).
ProcessReport server_process(const Server& server, const fs::path& exchange_dir, ledger::Ledger& ledger);

enum class Check { Valid, EnvelopeTamper, UnknownClaim, DataHashMismatch, ResultHashMismatch, ResultMissing, OrderViolation };
std::string_view to_string(Check c);

struct Outcome {
  std::string claim_id;
  Check verification = Check::Valid;
  std::optional<double> probability;  // only when verification is Valid
  std::optional<model::Verdict> verdict;
  std::string detail;

  bool valid() const { return verification == Check::Valid; }
};

/// Throws PendingResult when no result exists yet.
Outcome client_retrieve(const std::string& claim_id, const Client& client, const fs::path& exchange_dir,
                        const ledger::Ledger& ledger);
/// The same checks on envelope bytes already in memory.
Outcome retrieve_from_envelopes(const std::string& claim_id, ByteView request_env, ByteView result_env,
                                const Client& client, const ledger::Ledger& ledger);

}  // namespace medclaim::workflow
