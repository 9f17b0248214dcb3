#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace medclaim::model {

inline constexpr std::size_t kFeatureCount = 7;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "age", "sex", "bmi", "children", "smoker", "region", "charges"};

using FeatureVector = std::array<double, kFeatureCount>;

/// One claim as entered by the hospital. Region codes: 0 southwest,
/// 1 southeast, 2 northwest, 3 northeast.
struct RawRecord {
  int age = 0;
  int sex = 0;
  double bmi = 0.0;
  int children = 0;
  int smoker = 0;
  int region = 0;
  double charges = 0.0;
  std::string claim_id;
  std::string policy_id;  // carried through untouched

  FeatureVector features() const;
};

/// Throws SchemaViolation naming the offending field.
void validate(const RawRecord& r);

struct NormStats {
  FeatureVector mean{};
  FeatureVector std{};
};

/// Sample (n-1) standard deviation. Needs at least two records and no
/// constant column (DegenerateColumn).
NormStats fit_stats(const std::vector<RawRecord>& records);
FeatureVector preprocess(const RawRecord& r, const NormStats& stats);
std::vector<FeatureVector> preprocess_all(const std::vector<RawRecord>& records, const NormStats& stats);

}  // namespace medclaim::model
