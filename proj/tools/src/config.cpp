#include "medclaim/cli/config.hpp"

#include <json.hpp>

#include "medclaim/bytes.hpp"
#include "medclaim/error.hpp"

namespace medclaim::cli {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::InvalidArgument, "config: " + what); }

void only_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!obj.is_object()) bad(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) bad("unknown key " + where + "." + key);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    bad(where + "." + key + " has the wrong type");
  }
}

void read_path(const json& obj, const char* key, fs::path& out) {
  std::string s;
  read(obj, key, s, "paths");
  if (obj.contains(key)) {
    if (s.empty()) bad("paths." + std::string(key) + " is empty");
    out = s;
  }
}

}  // namespace

he::HeParams Config::params() const {
  require(he.ring_dimension >= 2048 && (he.ring_dimension & (he.ring_dimension - 1)) == 0, ErrorCode::InvalidParams,
          "ring_dimension must be a power of two >= 2048");
  auto in_range = [](int bits) { return bits >= 20 && bits <= 60; };
  require(in_range(he.base_bits) && in_range(he.special_bits), ErrorCode::InvalidParams,
          "prime sizes must be within 20..60 bits");
  for (int b : he.level_bits) require(in_range(b), ErrorCode::InvalidParams, "prime sizes must be within 20..60 bits");
  require(he.scale_bits > 0 && he.scale_bits < 60, ErrorCode::InvalidParams, "scale_bits must be within 1..59");
  auto p = medclaim::he::make_params(he.ring_dimension, he.base_bits, he.level_bits, he.special_bits, he.scale_bits);
  p.validate();
  return p;
}

Config parse_config(const std::string& text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("not valid JSON: ") + e.what());
  }
  only_keys(j, {"he", "sigmoid", "labels", "train", "weight_mode", "paths", "seed"}, "config");

  Config c;
  if (j.contains("he")) {
    const auto& h = j["he"];
    only_keys(h, {"ring_dimension", "base_bits", "level_bits", "special_bits", "scale_bits"}, "he");
    read(h, "ring_dimension", c.he.ring_dimension, "he");
    read(h, "base_bits", c.he.base_bits, "he");
    read(h, "level_bits", c.he.level_bits, "he");
    read(h, "special_bits", c.he.special_bits, "he");
    read(h, "scale_bits", c.he.scale_bits, "he");
  }
  if (j.contains("sigmoid")) {
    const auto& s = j["sigmoid"];
    only_keys(s, {"bound", "grid"}, "sigmoid");
    read(s, "bound", c.fit_bound, "sigmoid");
    read(s, "grid", c.fit_grid, "sigmoid");
  }
  if (j.contains("labels")) {
    only_keys(j["labels"], {"percentile"}, "labels");
    read(j["labels"], "percentile", c.label_percentile, "labels");
    if (!(c.label_percentile >= 0 && c.label_percentile <= 100)) bad("labels.percentile must be in [0, 100]");
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    only_keys(t, {"learning_rate", "epochs", "test_fraction"}, "train");
    read(t, "learning_rate", c.learning_rate, "train");
    read(t, "epochs", c.epochs, "train");
    read(t, "test_fraction", c.test_fraction, "train");
    if (!(c.learning_rate > 0) || c.epochs < 0) bad("train.learning_rate must be > 0 and train.epochs >= 0");
    if (!(c.test_fraction > 0 && c.test_fraction < 1)) bad("train.test_fraction must be in (0, 1)");
  }
  if (j.contains("weight_mode")) {
    std::string m;
    read(j, "weight_mode", m, "config");
    try {
      c.weight_mode = model::weight_mode_from_string(m);
    } catch (const Error&) {
      bad("weight_mode must be ct-ct or ct-pt");
    }
  }
  if (j.contains("paths")) {
    const auto& p = j["paths"];
    only_keys(p, {"root", "private_context", "public_context", "aes_key", "ledger", "exchange", "model",
                  "encrypted_model"},
              "paths");
    read_path(p, "root", c.paths.root);
    read_path(p, "private_context", c.paths.private_context);
    read_path(p, "public_context", c.paths.public_context);
    read_path(p, "aes_key", c.paths.sym_key);
    read_path(p, "ledger", c.paths.ledger);
    read_path(p, "exchange", c.paths.exchange);
    read_path(p, "model", c.paths.model);
    read_path(p, "encrypted_model", c.paths.encrypted_model);
  }
  if (c.paths.root.is_relative()) c.paths.root = base_dir / c.paths.root;
  if (j.contains("seed") && !j["seed"].is_null()) {
    std::uint64_t s = 0;
    read(j, "seed", s, "config");
    c.seed = s;
  }
  return c;
}

Config load_config(const fs::path& path) {
  std::string text;
  try {
    auto raw = read_file(path);
    text.assign(raw.begin(), raw.end());
  } catch (const Error&) {
    bad("cannot read " + path.string());
  }
  return parse_config(text, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

std::string default_config_json() {
  Config c;
  nlohmann::ordered_json j;
  j["he"] = {{"ring_dimension", c.he.ring_dimension},
             {"base_bits", c.he.base_bits},
             {"level_bits", c.he.level_bits},
             {"special_bits", c.he.special_bits},
             {"scale_bits", c.he.scale_bits}};
  j["sigmoid"] = {{"bound", c.fit_bound}, {"grid", c.fit_grid}};
  j["labels"] = {{"percentile", c.label_percentile}};
  j["train"] = {{"learning_rate", c.learning_rate}, {"epochs", c.epochs}, {"test_fraction", c.test_fraction}};
  j["weight_mode"] = std::string(to_string(c.weight_mode));
  j["paths"] = {{"root", "."},
                {"private_context", c.paths.private_context.string()},
                {"public_context", c.paths.public_context.string()},
                {"aes_key", c.paths.sym_key.string()},
                {"ledger", c.paths.ledger.string()},
                {"exchange", c.paths.exchange.string()},
                {"model", c.paths.model.string()},
                {"encrypted_model", c.paths.encrypted_model.string()}};
  j["seed"] = nullptr;
  return j.dump(2) + "\n";
}

}  // namespace medclaim::cli
