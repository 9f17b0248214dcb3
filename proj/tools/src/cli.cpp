#include "medclaim/cli/cli.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "medclaim/cli/bench.hpp"
#include "medclaim/cli/config.hpp"
#include "medclaim/he/serialize.hpp"
#include "medclaim/model/pipeline.hpp"
#include "medclaim/workflow/workflow.hpp"

namespace medclaim::cli {

namespace {

using Json = nlohmann::ordered_json;

// Keeps seeded streams for different artifacts apart.
std::optional<std::uint64_t> derive(std::optional<std::uint64_t> seed, std::uint64_t salt) {
  if (!seed) return std::nullopt;
  return *seed * 0x9e3779b97f4a7c15ULL + salt;
}

std::string hex_u64(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

Json params_json(const he::HeParams& p) {
  Json j;
  j["ring_dimension"] = p.ring_dimension;
  j["slots"] = p.slot_count();
  j["max_level"] = p.max_level();
  j["scale_bits"] = static_cast<int>(std::lround(std::log2(p.scale)));
  Json chain = Json::array();
  for (auto q : p.chain) chain.push_back(static_cast<int>(std::ceil(std::log2(static_cast<double>(q)))));
  j["chain_bits"] = chain;
  j["special_bits"] = static_cast<int>(std::ceil(std::log2(static_cast<double>(p.special_prime))));
  j["params_id"] = hex_u64(p.fingerprint());
  return j;
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool json = false;
  std::string dir;

  bool force = false;

  std::string data;
  std::optional<std::size_t> synthetic;
  std::string mode;
  std::optional<int> epochs;

  std::optional<int> age, sex, children, smoker, region;
  std::optional<double> bmi, charges;
  std::string claim_id;
  std::string policy_id;
  bool interactive = false;

  std::size_t records = 20;
  std::string workdir;
};

class Session {
 public:
  Session(const Options& opt, std::istream& in, std::ostream& out, std::ostream& err)
      : opt_(opt), in_(in), out_(out), err_(err) {
    std::string path = opt.config;
    if (path.empty()) {
      if (const char* env = std::getenv(kConfigEnv); env && *env) path = env;
    }
    if (!path.empty()) cfg_ = load_config(path);
    if (!opt.dir.empty()) cfg_.paths.root = opt.dir;
    if (opt.seed) cfg_.seed = opt.seed;
  }

  int keygen();
  int train();
  int submit();
  int process();
  int retrieve();
  int ledger_show();
  int ledger_verify();
  int bench();

 private:
  fs::path at(const fs::path& p) const { return cfg_.paths.resolve(p); }
  std::string show(const fs::path& p) const { return p.generic_string(); }

  void need(const fs::path& p, const char* hint) const {
    if (!fs::exists(p)) fail(ErrorCode::Io, p.string() + " not found; " + hint);
  }
  workflow::Client load_client() const {
    need(at(cfg_.paths.private_context), "run keygen first");
    need(at(cfg_.paths.sym_key), "run keygen first");
    need(at(cfg_.paths.model), "run train first");
    return workflow::Client::load(at(cfg_.paths.private_context), at(cfg_.paths.sym_key), at(cfg_.paths.model));
  }
  workflow::Server load_server() const {
    need(at(cfg_.paths.public_context), "run keygen first");
    need(at(cfg_.paths.sym_key), "run keygen first");
    need(at(cfg_.paths.encrypted_model), "run train first");
    return workflow::Server::load(at(cfg_.paths.public_context), at(cfg_.paths.sym_key),
                                  at(cfg_.paths.encrypted_model));
  }
  void emit(const Json& j) { out_ << j.dump() << "\n"; }
  model::RawRecord read_record();

  const Options& opt_;
  std::istream& in_;
  std::ostream& out_;
  std::ostream& err_;
  Config cfg_;
};

int Session::keygen() {
  const auto params = cfg_.params();
  const std::vector<fs::path> files = {at(cfg_.paths.private_context), at(cfg_.paths.public_context),
                                       at(cfg_.paths.sym_key)};
  if (!opt_.force) {
    for (const auto& f : files) {
      if (fs::exists(f)) fail(ErrorCode::FileExists, f.string() + " already exists (use --force to replace)");
    }
  }
  for (const auto& f : files) fs::create_directories(f.parent_path());

  auto bundle = he::keygen(params, cfg_.seed);
  he::save_private_context(files[0], bundle);
  he::save_public_context(files[1], bundle.public_context());
  envelope::save_key(files[2], envelope::sym_keygen(derive(cfg_.seed, 1)));

  if (opt_.json) {
    Json j;
    j["action"] = "keygen";
    j["params"] = params_json(params);
    j["files"] = Json::array();
    for (const auto& f : files) j["files"].push_back(show(f));
    emit(j);
  } else {
    out_ << "Generated keys: N=" << params.ring_dimension << ", " << params.max_level() << " levels, scale 2^"
         << std::lround(std::log2(params.scale)) << ", params " << hex_u64(params.fingerprint()) << "\n"
         << "Files saved:\n";
    for (const auto& f : files) out_ << "- " << show(f) << "\n";
  }
  return kOk;
}

int Session::train() {
  require(opt_.data.empty() != !opt_.synthetic.has_value(), ErrorCode::InvalidArgument,
          "train needs exactly one of --data or --synthetic");
  auto mode = opt_.mode.empty() ? cfg_.weight_mode : model::weight_mode_from_string(opt_.mode);
  const auto pub_path = at(cfg_.paths.public_context);
  need(pub_path, "run keygen first");

  model::Dataset data;
  if (opt_.synthetic) {
    require(*opt_.synthetic >= 2, ErrorCode::InvalidArgument, "--synthetic needs at least two records");
    data = model::synthetic_insurance(*opt_.synthetic, cfg_.seed.value_or(1));
  } else {
    data = model::load_csv(opt_.data);
  }

  model::TrainConfig tc;
  tc.gd = {cfg_.learning_rate, opt_.epochs.value_or(cfg_.epochs)};
  tc.test_fraction = cfg_.test_fraction;
  tc.label_percentile = cfg_.label_percentile;
  tc.fit_bound = cfg_.fit_bound;
  tc.fit_grid = cfg_.fit_grid;
  tc.seed = cfg_.seed.value_or(1);
  auto report = model::train_pipeline(data, tc);

  auto pc = he::load_public_context(pub_path);
  he::Evaluator ev(he::HeContext::create(pc.params));
  Prng prng(derive(cfg_.seed, 2));
  auto em = model::encrypt_model(report.weights, ev, pc, mode, prng);

  const auto model_path = at(cfg_.paths.model);
  const auto enc_path = at(cfg_.paths.encrypted_model);
  fs::create_directories(model_path.parent_path());
  fs::create_directories(enc_path.parent_path());
  model::save_model(model_path, report.weights);
  write_file_atomic(enc_path, model::serialize(em));

  const auto& w = report.weights;
  if (opt_.json) {
    Json j;
    j["action"] = "train";
    j["train_size"] = report.train_size;
    j["test_size"] = report.test_size;
    j["train_accuracy"] = report.train_accuracy;
    j["test_accuracy"] = report.test_accuracy;
    j["forest_test_accuracy"] = report.forest_test_accuracy;
    j["outside_fit_fraction"] = report.outside_fit_fraction;
    if (w.label_rule) {
      j["label_rule"] = {{"percentile", w.label_rule->percentile}, {"cap", w.label_rule->cap}};
    } else {
      j["label_rule"] = nullptr;
    }
    j["sigmoid"] = {{"c0", w.sigmoid.poly.c0},
                    {"c1", w.sigmoid.poly.c1},
                    {"c3", w.sigmoid.poly.c3},
                    {"bound", w.sigmoid.bound},
                    {"max_err", w.sigmoid.max_err}};
    j["weight_mode"] = std::string(to_string(mode));
    j["files"] = {show(model_path), show(enc_path)};
    emit(j);
  } else {
    out_ << "Records: " << report.train_size << " train, " << report.test_size << " test\n";
    if (w.label_rule) {
      out_ << "Labels: approve when charges <= " << fixed(w.label_rule->cap, 2) << " (percentile "
           << w.label_rule->percentile << " of training charges)\n";
    } else {
      out_ << "Labels: taken from the dataset's label column\n";
    }
    out_ << "Logistic regression accuracy: train " << fixed(report.train_accuracy, 4) << ", test "
         << fixed(report.test_accuracy, 4) << "\n"
         << "Random forest baseline test accuracy: " << fixed(report.forest_test_accuracy, 4) << "\n"
         << "Sigmoid cubic on [-" << w.sigmoid.bound << ", " << w.sigmoid.bound << "]: " << w.sigmoid.poly.c0
         << (w.sigmoid.poly.c1 < 0 ? " - " : " + ") << std::abs(w.sigmoid.poly.c1) << " z"
         << (w.sigmoid.poly.c3 < 0 ? " - " : " + ") << std::abs(w.sigmoid.poly.c3) << " z^3, max error "
         << fixed(w.sigmoid.max_err, 4) << "\n"
         << "Training scores beyond the fit margin: " << fixed(100 * report.outside_fit_fraction, 2) << "%"
         << (report.outside_fit_fraction > 0.05 ? " (consider a wider sigmoid.bound)" : "") << "\n"
         << "Weights encrypted (" << to_string(mode) << "). Files saved:\n"
         << "- " << show(model_path) << "\n"
         << "- " << show(enc_path) << "\n";
  }
  return kOk;
}

template <typename T>
T parse_field(const std::string& raw, const char* field) {
  auto b = raw.find_first_not_of(" \t\r");
  auto e = raw.find_last_not_of(" \t\r");
  std::string s = b == std::string::npos ? "" : raw.substr(b, e - b + 1);
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorCode::SchemaViolation, std::string(field) + ": cannot read '" + s + "' as a " +
                                         (std::is_integral_v<T> ? "whole number" : "number"));
  }
  return v;
}

model::RawRecord Session::read_record() {
  // Prompts go to stderr in JSON mode so stdout stays machine-readable.
  std::ostream& ui = opt_.json ? err_ : out_;
  auto ask = [&](const char* prompt, const char* field) {
    ui << prompt << std::flush;
    std::string line;
    if (!std::getline(in_, line)) fail(ErrorCode::SchemaViolation, std::string(field) + ": no input");
    return line;
  };
  ui << "\nEnter the following details:\n";
  model::RawRecord r;
  r.age = parse_field<int>(ask("Age: ", "age"), "age");
  r.sex = parse_field<int>(ask("Sex (0 = female, 1 = male): ", "sex"), "sex");
  r.bmi = parse_field<double>(ask("BMI: ", "bmi"), "bmi");
  r.children = parse_field<int>(ask("Number of children: ", "children"), "children");
  r.smoker = parse_field<int>(ask("Smoker (0 = no, 1 = yes): ", "smoker"), "smoker");
  r.region = parse_field<int>(
      ask("Region (0 = southwest, 1 = southeast, 2 = northwest, 3 = northeast): ", "region"), "region");
  r.charges = parse_field<double>(ask("Recent medical charges: ", "charges"), "charges");
  return r;
}

int Session::submit() {
  const int given = opt_.age.has_value() + opt_.sex.has_value() + opt_.bmi.has_value() +
                    opt_.children.has_value() + opt_.smoker.has_value() + opt_.region.has_value() +
                    opt_.charges.has_value();
  require(given == 0 || given == 7, ErrorCode::InvalidArgument,
          "give all seven of --age --sex --bmi --children --smoker --region --charges, or none to be prompted");
  require(!(opt_.interactive && given == 7), ErrorCode::InvalidArgument, "--interactive excludes field flags");

  auto client = load_client();
  model::RawRecord r;
  if (given == 0) {
    (opt_.json ? err_ : out_) << "\n=== ENCRYPTION MODE ===\n";
    r = read_record();
  } else {
    r.age = *opt_.age;
    r.sex = *opt_.sex;
    r.bmi = *opt_.bmi;
    r.children = *opt_.children;
    r.smoker = *opt_.smoker;
    r.region = *opt_.region;
    r.charges = *opt_.charges;
  }
  r.claim_id = opt_.claim_id;
  r.policy_id = opt_.policy_id;
  model::validate(r);
  if (given == 7 && !opt_.json) out_ << "\n=== ENCRYPTION MODE ===\n";

  auto ledger = ledger::Ledger::init(at(cfg_.paths.ledger));
  Prng prng(derive(cfg_.seed, 3));
  auto rec = workflow::client_submit(r, client, at(cfg_.paths.exchange), ledger, prng);

  if (opt_.json) {
    Json j;
    j["action"] = "submit";
    j["claim_id"] = rec.claim_id;
    j["data_hash"] = rec.data_hash;
    j["tx_hash"] = rec.tx_hash;
    j["files"] = Json::array();
    for (const auto& f : rec.files) j["files"].push_back(show(f));
    emit(j);
  } else {
    out_ << "\nClaim ID: " << rec.claim_id << "\n"
         << "Blockchain TX Hash: " << rec.tx_hash << "\n"
         << "\nEncryption complete. Files saved:\n";
    for (const auto& f : rec.files) out_ << "- " << show(f) << "\n";
  }
  return kOk;
}

int Session::process() {
  auto server = load_server();
  auto ledger = ledger::Ledger::init(at(cfg_.paths.ledger));
  const auto exchange = at(cfg_.paths.exchange);

  workflow::ProcessReport report;
  if (!opt_.claim_id.empty()) {
    report.done.push_back(workflow::process_claim(opt_.claim_id, server, exchange, ledger));
  } else {
    report = workflow::server_process(server, exchange, ledger);
  }

  if (opt_.json) {
    for (const auto& d : report.done) {
      Json j;
      j["action"] = "process";
      j["claim_id"] = d.claim_id;
      j["status"] = "done";
      j["result_hash"] = d.result_hash;
      j["tx_hash"] = d.tx_hash;
      j["result_file"] = show(d.result_file);
      j["error"] = nullptr;
      emit(j);
    }
    for (const auto& f : report.failed) {
      Json j;
      j["action"] = "process";
      j["claim_id"] = f.claim_id;
      j["status"] = "failed";
      j["result_hash"] = nullptr;
      j["tx_hash"] = nullptr;
      j["result_file"] = nullptr;
      j["error"] = {{"code", std::string(to_string(f.code))}, {"message", f.message}};
      emit(j);
    }
  } else {
    out_ << "\n=== SERVER PROCESSING ===\n";
    if (report.done.empty() && report.failed.empty()) out_ << "\nNo pending claims.\n";
    for (const auto& d : report.done) {
      out_ << "\nClaim ID: " << d.claim_id << "\n"
           << "Blockchain TX Hash: " << d.tx_hash << "\n"
           << "\nComputation complete. Encrypted result saved to " << show(d.result_file) << "\n";
    }
    for (const auto& f : report.failed) err_ << "claim " << f.claim_id << " failed: " << f.message << "\n";
  }
  return report.failed.empty() ? kOk : exit_code_for(report.failed.front().code);
}

int Session::retrieve() {
  require(!opt_.claim_id.empty(), ErrorCode::InvalidArgument, "retrieve needs --claim-id");
  auto client = load_client();
  auto ledger = ledger::Ledger::init(at(cfg_.paths.ledger));
  auto out = workflow::client_retrieve(opt_.claim_id, client, at(cfg_.paths.exchange), ledger);

  if (opt_.json) {
    Json j;
    j["action"] = "retrieve";
    j["claim_id"] = out.claim_id;
    j["verification"] = std::string(to_string(out.verification));
    j["valid"] = out.valid();
    j["probability"] = out.probability ? Json(*out.probability) : Json(nullptr);
    j["verdict"] = out.verdict ? Json(std::string(to_string(*out.verdict))) : Json(nullptr);
    j["detail"] = out.detail;
    emit(j);
  } else {
    out_ << "\n=== DECRYPTION MODE ===\n\n";
    if (out.valid()) {
      out_ << "Model output (probability): " << fixed(*out.probability, 4) << "\n"
           << "Claim " << to_string(*out.verdict) << "\n"
           << "\nBlockchain Verification: Valid\n";
    } else {
      out_ << "Blockchain Verification: Invalid (" << to_string(out.verification) << ")\n";
      if (!out.detail.empty()) out_ << out.detail << "\n";
      out_ << "No verdict released.\n";
    }
  }
  return out.valid() ? kOk : kVerificationFailed;
}

int Session::ledger_show() {
  const auto path = at(cfg_.paths.ledger);
  need(path, "nothing has been logged yet");
  auto ledger = ledger::Ledger::init(path);
  auto blocks = ledger.blocks();
  auto records = ledger.records();

  if (opt_.json) {
    Json j;
    j["action"] = "ledger_show";
    j["blocks"] = Json::array();
    for (const auto& b : blocks) {
      auto tx = ledger::Transaction::parse(b.payload);
      Json jb;
      jb["index"] = b.index;
      jb["timestamp_ms"] = b.timestamp;
      jb["prev_hash"] = to_hex(b.prev_hash);
      jb["block_hash"] = to_hex(b.block_hash);
      jb["op"] = std::string(to_string(tx.op));
      jb["tx_hash"] = tx.tx_hash();
      jb["claim_id"] = tx.claim_id;
      jb["data_hash"] = tx.data_hash;
      jb["result_hash"] = tx.result_hash;
      j["blocks"].push_back(jb);
    }
    j["records"] = Json::array();
    for (const auto& r : records) {
      Json jr;
      jr["claim_id"] = r.claim_id;
      jr["data_hash"] = r.data_hash;
      jr["result_hash"] = r.result_hash ? Json(*r.result_hash) : Json(nullptr);
      jr["data_block"] = r.data_block ? Json(*r.data_block) : Json(nullptr);
      jr["result_block"] = r.result_block ? Json(*r.result_block) : Json(nullptr);
      j["records"].push_back(jr);
    }
    emit(j);
  } else {
    out_ << "ledger " << show(path) << ": " << blocks.size() << " blocks, " << records.size() << " claims\n"
         << ledger::dump(blocks);
    if (!records.empty()) out_ << "claims\n";
    for (const auto& r : records) {
      out_ << "  " << r.claim_id << ": data at block " << (r.data_block ? std::to_string(*r.data_block) : "-")
           << ", result at block " << (r.result_block ? std::to_string(*r.result_block) : "pending") << "\n";
    }
  }
  return kOk;
}

int Session::ledger_verify() {
  const auto path = at(cfg_.paths.ledger);
  need(path, "nothing has been logged yet");
  auto status = ledger::verify_chain_file(path);
  std::size_t blocks = status.valid() ? ledger::Ledger::init(path).blocks().size() : 0;
  if (opt_.json) {
    Json j;
    j["action"] = "ledger_verify";
    j["valid"] = status.valid();
    j["blocks"] = status.valid() ? Json(blocks) : Json(nullptr);
    j["first_bad_index"] = status.first_bad_index ? Json(*status.first_bad_index) : Json(nullptr);
    j["detail"] = status.detail;
    emit(j);
  } else if (status.valid()) {
    out_ << "Chain valid: " << blocks << " blocks\n";
  } else {
    out_ << "Chain invalid: first bad block " << *status.first_bad_index << " (" << status.detail << ")\n";
  }
  return status.valid() ? kOk : kVerificationFailed;
}

int Session::bench() {
  fs::path workdir = opt_.workdir.empty()
                         ? fs::temp_directory_path() / ("medclaim-bench-" + std::to_string(::getpid()))
                         : fs::path(opt_.workdir);
  auto rep = run_bench(opt_.records, cfg_, workdir);

  struct Row {
    const char* key;
    const char* label;
    double value;
    const char* unit;
    const char* reference;
  };
  const Row rows[] = {
      {"enc_time_per_record_s", "Data encryption time", rep.enc_time_per_record_s, "s/record", "~0.35 s/record"},
      {"claim_processing_s", "Claim processing time (encrypted)", rep.claim_processing_s, "s/claim",
       "~2.4 s/claim"},
      {"dec_time_s", "Data decryption time", rep.dec_time_s, "s/result", "~0.22 s/result"},
      {"contract_exec_s", "Contract execution time", rep.contract_exec_s, "s/call", "~1.1 s"},
      {"throughput_tps", "Ledger transaction throughput", rep.throughput_tps, "tx/s", "25-30 tx/s"},
      {"storage_overhead_ratio", "Storage overhead", rep.storage_overhead_ratio, "x plaintext", "~2.3x"},
  };
  const std::string note =
      "Storage ratio is request envelope bytes (HE ciphertext plus AES-GCM framing) over 56 plaintext bytes "
      "(seven float64 features). A fresh ciphertext at these parameters holds two ring polynomials over the "
      "whole modulus chain, so its expansion exceeds the ~2.3x reference by orders of magnitude. Timings depend "
      "on hardware and are reported for qualitative comparison only.";

  if (opt_.json) {
    Json j;
    j["action"] = "bench";
    j["records"] = rep.records;
    for (const auto& r : rows) j[r.key] = r.value;
    j["request_bytes"] = rep.request_bytes;
    j["plaintext_bytes"] = rep.plaintext_bytes;
    Json ref;
    for (const auto& r : rows) ref[r.key] = r.reference;
    j["reference"] = ref;
    j["params"] = params_json(rep.params);
    j["weight_mode"] = std::string(to_string(rep.weight_mode));
    j["hardware"] = rep.hardware;
    j["note"] = note;
    emit(j);
  } else {
    out_ << "Benchmark over " << rep.records << " claim lifecycles (N=" << rep.params.ring_dimension << ", "
         << rep.params.max_level() << " levels, " << to_string(rep.weight_mode) << ")\n"
         << "Hardware: " << rep.hardware << "\n\n";
    out_ << std::left << std::setw(36) << "metric" << std::setw(16) << "measured" << std::setw(14) << "unit"
         << "reference\n";
    for (const auto& r : rows) {
      std::ostringstream v;
      v << std::setprecision(4) << r.value;
      out_ << std::left << std::setw(36) << r.label << std::setw(16) << v.str() << std::setw(14) << r.unit
           << r.reference << "\n";
    }
    out_ << "\nRequest envelope: " << rep.request_bytes << " bytes per record\n" << note << "\n";
  }
  return kOk;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParams:
    case ErrorCode::SlotOverflow:
    case ErrorCode::NonFiniteInput:
    case ErrorCode::DegenerateColumn:
    case ErrorCode::SchemaViolation:
    case ErrorCode::EmptyDataset:
    case ErrorCode::NonBinaryLabels:
    case ErrorCode::OutOfRange:
    case ErrorCode::InvalidInterval:
    case ErrorCode::FileExists:
    case ErrorCode::InvalidArgument:
      return kUsage;
    default:
      return kCryptoOrLedger;
  }
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Encrypted insurance claim adjudication with a hash-chained audit log", "medclaim"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", opt.config, std::string("JSON config file (default: $") + kConfigEnv + ")");
  app.add_option("--seed", opt.seed, "Seed for reproducible keys, splits and ciphertexts");
  app.add_flag("--json", opt.json, "One JSON object per action on stdout");
  app.add_option("--dir", opt.dir, "Artifact directory (overrides paths.root)");

  auto* keygen = app.add_subcommand("keygen", "Create HE contexts and the AES key");
  keygen->add_flag("--force", opt.force, "Replace existing key files");

  auto* train = app.add_subcommand("train", "Train the model and write plain and encrypted weights");
  train->add_option("--data", opt.data, "CSV dataset")->check(CLI::ExistingFile);
  train->add_option("--synthetic", opt.synthetic, "Train on N synthetic records instead");
  train->add_option("--mode", opt.mode, "Weight encryption: ct-ct or ct-pt")->check(CLI::IsMember({"ct-ct", "ct-pt"}));
  train->add_option("--epochs", opt.epochs, "Gradient descent epochs");

  auto* submit = app.add_subcommand("submit", "Encrypt a claim, write its request and log its hash");
  submit->add_option("--age", opt.age);
  submit->add_option("--sex", opt.sex, "0 = female, 1 = male");
  submit->add_option("--bmi", opt.bmi);
  submit->add_option("--children", opt.children);
  submit->add_option("--smoker", opt.smoker, "0 = no, 1 = yes");
  submit->add_option("--region", opt.region, "0 = southwest, 1 = southeast, 2 = northwest, 3 = northeast");
  submit->add_option("--charges", opt.charges, "Recent medical charges");
  submit->add_option("--claim-id", opt.claim_id, "Claim id (random when omitted)");
  submit->add_option("--policy-id", opt.policy_id);
  submit->add_flag("--interactive", opt.interactive, "Prompt for each field (the default without field flags)");

  auto* process = app.add_subcommand("process", "Score pending requests under encryption");
  process->add_option("--claim-id", opt.claim_id, "Only this claim");

  auto* retrieve = app.add_subcommand("retrieve", "Verify and decrypt a result");
  retrieve->add_option("--claim-id", opt.claim_id)->required();

  auto* ledger = app.add_subcommand("ledger", "Inspect the audit ledger");
  ledger->require_subcommand(1);
  auto* show = ledger->add_subcommand("show", "Print blocks and claim records");
  auto* verify = ledger->add_subcommand("verify", "Check the hash chain");

  auto* bench = app.add_subcommand("bench", "Time full lifecycles on a throwaway ledger");
  bench->add_option("--records", opt.records, "Number of lifecycles")->capture_default_str();
  bench->add_option("--workdir", opt.workdir, "Scratch directory (removed afterwards)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("medclaim");

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  std::string action = "medclaim";
  for (auto* sub : app.get_subcommands()) action = sub->get_name();
  if (ledger->parsed()) action = show->parsed() ? "ledger show" : "ledger verify";
  try {
    Session s(opt, in, out, err);
    if (keygen->parsed()) return s.keygen();
    if (train->parsed()) return s.train();
    if (submit->parsed()) return s.submit();
    if (process->parsed()) return s.process();
    if (retrieve->parsed()) return s.retrieve();
    if (show->parsed()) return s.ledger_show();
    if (verify->parsed()) return s.ledger_verify();
    if (bench->parsed()) return s.bench();
    return kUsage;
  } catch (const Error& e) {
    int code = exit_code_for(e.code());
    std::optional<std::uint64_t> bad_block;
    if (auto* c = dynamic_cast<const CorruptLedgerError*>(&e)) {
      bad_block = c->index();
      if (ledger->parsed()) code = kVerificationFailed;
    }
    if (opt.json) {
      Json j;
      j["action"] = "error";
      j["command"] = action;
      j["code"] = std::string(to_string(e.code()));
      j["message"] = e.what();
      j["first_bad_index"] = bad_block ? Json(*bad_block) : Json(nullptr);
      j["exit_code"] = code;
      out << j.dump() << "\n";
    } else {
      err << "error: " << e.what() << "\n";
      if (bad_block) err << "first bad block: " << *bad_block << "\n";
    }
    return code;
  } catch (const std::exception& e) {
    if (opt.json) {
      Json j;
      j["action"] = "error";
      j["command"] = action;
      j["code"] = "Io";
      j["message"] = e.what();
      j["first_bad_index"] = nullptr;
      j["exit_code"] = static_cast<int>(kCryptoOrLedger);
      out << j.dump() << "\n";
    } else {
      err << "error: " << e.what() << "\n";
    }
    return kCryptoOrLedger;
  }
}

}  // namespace medclaim::cli
