#pragma once

#include <gtest/gtest.h>
#include <unistd.h>

#include <filesystem>
#include <functional>

#include "medclaim/he/serialize.hpp"
#include "medclaim/model/pipeline.hpp"
#include "medclaim/workflow/workflow.hpp"

namespace medclaim::testing {

// Client and server built in memory from one seeded keygen and a model
// trained on synthetic data.
struct Deployment {
  model::ModelWeights weights;
  workflow::Client client;
  workflow::Server server;
};

inline Deployment make_deployment(const he::HeParams& params, std::uint64_t seed,
                                  model::WeightMode mode = model::WeightMode::CtCt) {
  Deployment d;
  auto data = model::synthetic_insurance(1000, seed);
  model::TrainConfig cfg;
  cfg.seed = seed;
  cfg.gd.epochs = 300;
  d.weights = model::train_pipeline(data, cfg).weights;

  auto keys = he::keygen(params, seed);
  auto ev = std::make_shared<he::Evaluator>(he::HeContext::create(params));
  auto sym = envelope::sym_keygen(seed);
  Prng prng(seed + 1);
  d.client = {ev, keys, sym, d.weights.norm};
  d.server = {ev, keys.public_context(), sym, model::encrypt_model(d.weights, *ev, keys.public_context(), mode, prng)};
  return d;
}

inline model::RawRecord sample_record(std::string claim_id = {}) {
  model::RawRecord r;
  r.age = 19;
  r.sex = 0;
  r.bmi = 28;
  r.children = 0;
  r.smoker = 0;
  r.region = 1;
  r.charges = 1254;
  r.claim_id = std::move(claim_id);
  return r;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() / ("medclaim_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::Io;
}

}  // namespace medclaim::testing
