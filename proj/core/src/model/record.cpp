#include "medclaim/model/record.hpp"

#include <cmath>

#include "medclaim/error.hpp"

namespace medclaim::model {

FeatureVector RawRecord::features() const {
  return {static_cast<double>(age), static_cast<double>(sex), bmi,   static_cast<double>(children),
          static_cast<double>(smoker), static_cast<double>(region), charges};
}

void validate(const RawRecord& r) {
  auto bad = [](const char* field, const std::string& why) {
    fail(ErrorCode::SchemaViolation, std::string(field) + " " + why);
  };
  if (r.age < 0) bad("age", "must be non-negative");
  if (r.sex != 0 && r.sex != 1) bad("sex", "must be 0 or 1");
  if (!std::isfinite(r.bmi) || r.bmi <= 0) bad("bmi", "must be a positive finite number");
  if (r.children < 0) bad("children", "must be non-negative");
  if (r.smoker != 0 && r.smoker != 1) bad("smoker", "must be 0 or 1");
  if (r.region < 0 || r.region > 3) bad("region", "must be in 0..3, got " + std::to_string(r.region));
  if (!std::isfinite(r.charges) || r.charges < 0) bad("charges", "must be a non-negative finite number");
}

NormStats fit_stats(const std::vector<RawRecord>& records) {
  require(records.size() >= 2, ErrorCode::EmptyDataset, "need at least two records to fit statistics");
  NormStats s;
  const double n = static_cast<double>(records.size());
  for (const auto& r : records) {
    validate(r);
    auto f = r.features();
    for (std::size_t j = 0; j < kFeatureCount; ++j) s.mean[j] += f[j];
  }
  for (auto& m : s.mean) m /= n;
  for (const auto& r : records) {
    auto f = r.features();
    for (std::size_t j = 0; j < kFeatureCount; ++j) s.std[j] += (f[j] - s.mean[j]) * (f[j] - s.mean[j]);
  }
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    s.std[j] = std::sqrt(s.std[j] / (n - 1));
    if (!(s.std[j] > 1e-12 * std::max(1.0, std::abs(s.mean[j])))) {
      fail(ErrorCode::DegenerateColumn, "column " + std::string(kFeatureNames[j]) + " is constant");
    }
  }
  return s;
}

FeatureVector preprocess(const RawRecord& r, const NormStats& stats) {
  validate(r);
  auto f = r.features();
  for (std::size_t j = 0; j < kFeatureCount; ++j) f[j] = (f[j] - stats.mean[j]) / stats.std[j];
  return f;
}

std::vector<FeatureVector> preprocess_all(const std::vector<RawRecord>& records, const NormStats& stats) {
  std::vector<FeatureVector> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(preprocess(r, stats));
  return out;
}

}  // namespace medclaim::model
