#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "medclaim/model/record.hpp"

namespace medclaim::model {

struct Dataset {
  std::vector<RawRecord> records;
  std::optional<std::vector<int>> labels;  // present when the file has a label column
};

/// Header `age,sex,bmi,children,smoker,region,charges[,label]`. Also accepts
/// the textual codes female/male, no/yes and the four region names.
Dataset load_csv(const std::filesystem::path& path);
void save_csv(const std::filesystem::path& path, const Dataset& data);

/// Synthetic population shaped like the public medical-cost data (no labels).
Dataset synthetic_insurance(std::size_t n, std::uint64_t seed);

/// Linear-interpolated percentile, p in [0, 100].
double percentile(std::vector<double> values, double p);

/// label = 1 (approve) when charges <= the given percentile of training charges.
struct LabelRule {
  double percentile = 75.0;
  double cap = 0.0;

  static LabelRule fit(const std::vector<RawRecord>& training, double percentile = 75.0);
  int apply(const RawRecord& r) const { return r.charges <= cap ? 1 : 0; }
  std::vector<int> apply_all(const std::vector<RawRecord>& records) const;
};

}  // namespace medclaim::model
