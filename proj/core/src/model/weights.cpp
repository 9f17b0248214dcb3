#include "medclaim/model/weights.hpp"

#include <json.hpp>

#include "medclaim/bytes.hpp"
#include "medclaim/error.hpp"

namespace medclaim::model {

using nlohmann::json;

namespace {

constexpr int kModelFormatVersion = 1;

FeatureVector vec7(const json& j, const char* what) {
  if (!j.is_array() || j.size() != kFeatureCount) fail(ErrorCode::Malformed, std::string(what) + " must have 7 entries");
  FeatureVector out{};
  for (std::size_t i = 0; i < kFeatureCount; ++i) out[i] = j[i].get<double>();
  return out;
}

}  // namespace

double score(const FeatureVector& x, const ModelWeights& w) {
  double z = w.intercept;
  for (std::size_t j = 0; j < kFeatureCount; ++j) z += w.beta[j] * x[j];
  return z;
}

double predict_plain(const FeatureVector& x, const ModelWeights& w) { return sigmoid(score(x, w)); }

double circuit_replica(const FeatureVector& x, const ModelWeights& w) { return w.sigmoid.poly(score(x, w)); }

std::string to_json(const ModelWeights& w) {
  json j;
  j["format"] = "medclaim-model";
  j["version"] = kModelFormatVersion;
  j["features"] = std::vector<std::string>(kFeatureNames.begin(), kFeatureNames.end());
  j["beta"] = w.beta;
  j["intercept"] = w.intercept;
  j["norm"] = {{"mean", w.norm.mean}, {"std", w.norm.std}};
  j["sigmoid"] = {{"c0", w.sigmoid.poly.c0},
                  {"c1", w.sigmoid.poly.c1},
                  {"c3", w.sigmoid.poly.c3},
                  {"bound", w.sigmoid.bound},
                  {"max_err", w.sigmoid.max_err}};
  j["threshold"] = w.threshold;
  if (w.label_rule) {
    j["label_rule"] = {{"kind", "charges_percentile"}, {"percentile", w.label_rule->percentile}, {"cap", w.label_rule->cap}};
  } else {
    j["label_rule"] = {{"kind", "explicit"}};
  }
  return j.dump(2) + "\n";
}

ModelWeights model_from_json(const std::string& text) {
  try {
    auto j = json::parse(text);
    if (j.at("format") != "medclaim-model") fail(ErrorCode::Malformed, "not a model file");
    if (j.at("version") != kModelFormatVersion) fail(ErrorCode::WrongVersion, "unsupported model version");
    ModelWeights w;
    w.beta = vec7(j.at("beta"), "beta");
    w.intercept = j.at("intercept").get<double>();
    w.norm.mean = vec7(j.at("norm").at("mean"), "norm.mean");
    w.norm.std = vec7(j.at("norm").at("std"), "norm.std");
    for (double s : w.norm.std) require(s > 0, ErrorCode::Malformed, "norm.std entries must be positive");
    const auto& s = j.at("sigmoid");
    w.sigmoid.poly = {s.at("c0").get<double>(), s.at("c1").get<double>(), s.at("c3").get<double>()};
    w.sigmoid.bound = s.at("bound").get<double>();
    w.sigmoid.max_err = s.at("max_err").get<double>();
    w.threshold = j.at("threshold").get<double>();
    require(w.threshold == kThreshold, ErrorCode::Malformed, "threshold is fixed at 0.5");
    const auto& rule = j.at("label_rule");
    if (rule.at("kind") == "charges_percentile") {
      w.label_rule = LabelRule{rule.at("percentile").get<double>(), rule.at("cap").get<double>()};
    }
    return w;
  } catch (const json::exception& e) {
    fail(ErrorCode::Malformed, std::string("model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const ModelWeights& w) { write_file_atomic(path, as_bytes(to_json(w))); }

ModelWeights load_model(const std::filesystem::path& path) {
  auto data = read_file(path);
  return model_from_json(std::string(data.begin(), data.end()));
}

}  // namespace medclaim::model
