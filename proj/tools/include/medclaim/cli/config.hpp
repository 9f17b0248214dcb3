#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "medclaim/he/params.hpp"
#include "medclaim/model/encrypted.hpp"
#include "medclaim/model/sigmoid_fit.hpp"

namespace medclaim::cli {

namespace fs = std::filesystem;

/// Bit sizes handed to he::make_params.
struct HeSpec {
  std::size_t ring_dimension = 8192;
  int base_bits = 60;
  std::vector<int> level_bits{40, 40, 40, 40};
  int special_bits = 60;
  int scale_bits = 40;
};

struct Paths {
  fs::path root = ".";
  fs::path private_context = "private_context.bin";
  fs::path public_context = "public_context.bin";
  fs::path sym_key = "aes.key";
  fs::path ledger = "ledger.bin";
  fs::path exchange = "exchange";
  fs::path model = "model.json";
  fs::path encrypted_model = "encrypted_model.bin";

  /// Every path except root, resolved against root.
  fs::path resolve(const fs::path& p) const { return (p.is_absolute() ? p : root / p).lexically_normal(); }
};

struct Config {
  HeSpec he;
  double fit_bound = model::kDefaultFitBound;
  std::size_t fit_grid = model::kDefaultFitGrid;
  double label_percentile = 75.0;
  double learning_rate = 0.1;
  int epochs = 1000;
  double test_fraction = 0.2;
  model::WeightMode weight_mode = model::WeightMode::CtCt;
  Paths paths;
  std::optional<std::uint64_t> seed;

  /// Builds and validates the parameter set (InvalidParams).
  he::HeParams params() const;
};

/// Parses a JSON config. Unknown keys and wrong types are InvalidArgument;
/// a relative "root" is taken relative to `base_dir`.
Config parse_config(const std::string& text, const fs::path& base_dir = ".");
Config load_config(const fs::path& path);

/// The defaults as JSON, usable as a starting point for a config file.
std::string default_config_json();

}  // namespace medclaim::cli
