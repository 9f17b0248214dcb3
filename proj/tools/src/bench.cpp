#include "medclaim/cli/bench.hpp"

#include <chrono>
#include <fstream>
#include <thread>

#include "medclaim/model/pipeline.hpp"
#include "medclaim/workflow/workflow.hpp"

namespace medclaim::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct DirGuard {
  std::filesystem::path path;
  ~DirGuard() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace

std::string hardware_note() {
  std::string cpu = "unknown cpu";
  std::ifstream info("/proc/cpuinfo");
  for (std::string line; std::getline(info, line);) {
    if (line.rfind("model name", 0) == 0) {
      auto colon = line.find(':');
      if (colon != std::string::npos) cpu = line.substr(colon + 2);
      break;
    }
  }
  std::string note = cpu + ", " + std::to_string(std::thread::hardware_concurrency()) + " hardware threads";
  note += ", single-threaded run";
#ifdef NDEBUG
  note += ", optimized build";
#else
  note += ", debug build";
#endif
  return note;
}

MetricsReport run_bench(std::size_t n, const Config& cfg, const std::filesystem::path& workdir) {
  require(n >= 1, ErrorCode::InvalidArgument, "bench needs at least one record");
  const auto params = cfg.params();
  const std::uint64_t seed = cfg.seed.value_or(1);

  std::filesystem::create_directories(workdir);
  DirGuard guard{workdir};
  const auto exchange = workdir / "exchange";

  auto data = model::synthetic_insurance(1000, seed);
  model::TrainConfig tc;
  tc.gd = {cfg.learning_rate, cfg.epochs};
  tc.test_fraction = cfg.test_fraction;
  tc.label_percentile = cfg.label_percentile;
  tc.fit_bound = cfg.fit_bound;
  tc.fit_grid = cfg.fit_grid;
  tc.seed = seed;
  auto weights = model::train_pipeline(data, tc).weights;

  auto keys = he::keygen(params, seed);
  auto ev = std::make_shared<he::Evaluator>(he::HeContext::create(params));
  auto sym = envelope::sym_keygen(seed);
  Prng prng(seed);
  workflow::Client client{ev, keys, sym, weights.norm};
  workflow::Server server{ev, keys.public_context(), sym,
                          model::encrypt_model(weights, *ev, keys.public_context(), cfg.weight_mode, prng)};
  auto ledger = ledger::Ledger::init(workdir / "ledger.bin");

  auto records = model::synthetic_insurance(n, seed + 1).records;
  MetricsReport rep;
  rep.records = n;
  rep.params = params;
  rep.weight_mode = cfg.weight_mode;
  rep.hardware = hardware_note();
  rep.plaintext_bytes = kPlaintextRecordBytes;

  double enc = 0, proc = 0, dec = 0;
  std::size_t request_total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    records[i].claim_id = "bench-" + std::to_string(i);
    auto t0 = Clock::now();
    auto sub = workflow::client_submit(records[i], client, exchange, ledger, prng);
    enc += seconds_since(t0);
    request_total += std::filesystem::file_size(workflow::request_path(exchange, sub.claim_id));

    t0 = Clock::now();
    workflow::process_claim(sub.claim_id, server, exchange, ledger);
    proc += seconds_since(t0);

    t0 = Clock::now();
    auto out = workflow::client_retrieve(sub.claim_id, client, exchange, ledger);
    dec += seconds_since(t0);
    require(out.valid(), ErrorCode::Io, "bench lifecycle " + sub.claim_id + " did not verify");
  }
  const double nd = static_cast<double>(n);
  rep.enc_time_per_record_s = enc / nd;
  rep.claim_processing_s = proc / nd;
  rep.dec_time_s = dec / nd;
  rep.request_bytes = request_total / n;
  rep.storage_overhead_ratio = static_cast<double>(request_total) / (nd * static_cast<double>(kPlaintextRecordBytes));

  // Contract calls on their own ledger: data log, result log, verification.
  auto contract = ledger::Ledger::init(workdir / "contract.bin");
  double log_time = 0, verify_time = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = "contract-" + std::to_string(i);
    const std::string dh = to_hex(prng.bytes(32));
    const std::string rh = to_hex(prng.bytes(32));
    auto t0 = Clock::now();
    contract.log_computation(id, dh);
    contract.log_computation(id, dh, rh);
    log_time += seconds_since(t0);
    t0 = Clock::now();
    contract.verify_computation(id, dh, rh);
    verify_time += seconds_since(t0);
  }
  rep.contract_exec_s = (log_time + verify_time) / (3 * nd);
  rep.throughput_tps = 2 * nd / log_time;
  return rep;
}

}  // namespace medclaim::cli
