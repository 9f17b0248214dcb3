#include "medclaim/model/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "medclaim/error.hpp"
#include "medclaim/random.hpp"

namespace medclaim::model {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void schema(std::size_t line, const std::string& what) {
  fail(ErrorCode::SchemaViolation, "line " + std::to_string(line) + ": " + what);
}

double number(const std::string& s, std::size_t line, std::string_view field) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    schema(line, std::string(field) + " is not a number: '" + s + "'");
  }
  return v;
}

int integer(const std::string& s, std::size_t line, std::string_view field) {
  double v = number(s, line, field);
  if (v != std::floor(v) || std::abs(v) > 1e9) schema(line, std::string(field) + " must be an integer");
  return static_cast<int>(v);
}

int coded(const std::string& s, std::size_t line, std::string_view field,
          std::initializer_list<std::string_view> names) {
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  int code = 0;
  for (auto n : names) {
    if (lower == n) return code;
    ++code;
  }
  return integer(s, line, field);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) fail(ErrorCode::SchemaViolation, "dataset is empty");
  auto header = split(line);
  bool has_label = header.size() == kFeatureCount + 1;
  bool ok = header.size() == kFeatureCount || has_label;
  for (std::size_t j = 0; ok && j < kFeatureCount; ++j) ok = header[j] == kFeatureNames[j];
  if (ok && has_label) ok = header.back() == "label";
  if (!ok) fail(ErrorCode::SchemaViolation, "header must be age,sex,bmi,children,smoker,region,charges[,label]");

  Dataset data;
  if (has_label) data.labels.emplace();
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (cells.size() != header.size()) {
      schema(lineno, "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(cells.size()));
    }
    RawRecord r;
    r.age = integer(cells[0], lineno, "age");
    r.sex = coded(cells[1], lineno, "sex", {"female", "male"});
    r.bmi = number(cells[2], lineno, "bmi");
    r.children = integer(cells[3], lineno, "children");
    r.smoker = coded(cells[4], lineno, "smoker", {"no", "yes"});
    r.region = coded(cells[5], lineno, "region", {"southwest", "southeast", "northwest", "northeast"});
    r.charges = number(cells[6], lineno, "charges");
    try {
      validate(r);
    } catch (const Error& e) {
      schema(lineno, e.what());
    }
    if (has_label) {
      int y = integer(cells[7], lineno, "label");
      if (y != 0 && y != 1) schema(lineno, "label must be 0 or 1");
      data.labels->push_back(y);
    }
    data.records.push_back(std::move(r));
  }
  if (data.records.empty()) fail(ErrorCode::SchemaViolation, "dataset has a header but no records");
  return data;
}

void save_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << "age,sex,bmi,children,smoker,region,charges" << (data.labels ? ",label" : "") << "\n";
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    const auto& r = data.records[i];
    out << r.age << ',' << r.sex << ',' << fmt(r.bmi) << ',' << r.children << ',' << r.smoker << ',' << r.region
        << ',' << fmt(r.charges);
    if (data.labels) out << ',' << (*data.labels)[i];
    out << "\n";
  }
}

Dataset synthetic_insurance(std::size_t n, std::uint64_t seed) {
  Prng prng(seed);
  Dataset data;
  data.records.reserve(n);
  static constexpr double kChildCdf[] = {0.43, 0.67, 0.85, 0.97, 0.99, 1.0};
  for (std::size_t i = 0; i < n; ++i) {
    RawRecord r;
    r.age = 18 + static_cast<int>(prng.uniform(47));
    r.sex = static_cast<int>(prng.uniform(2));
    r.bmi = std::round(std::clamp(30.6 + 6.1 * prng.normal(), 16.0, 53.0) * 100.0) / 100.0;
    double u = prng.uniform_real();
    while (r.children < 5 && u > kChildCdf[r.children]) ++r.children;
    r.smoker = prng.uniform_real() < 0.2 ? 1 : 0;
    r.region = static_cast<int>(prng.uniform(4));
    double base = -11800 + 257 * r.age + 330 * r.bmi + 475 * r.children + 23800 * r.smoker;
    if (r.smoker && r.bmi > 30) base += 19000;
    r.charges = std::round(std::max(1121.87, base + 4200 * prng.normal()) * 100.0) / 100.0;
    data.records.push_back(r);
  }
  return data;
}

double percentile(std::vector<double> values, double p) {
  require(!values.empty(), ErrorCode::EmptyDataset, "percentile of an empty set");
  require(p >= 0 && p <= 100, ErrorCode::InvalidArgument, "percentile must be in [0, 100]");
  std::sort(values.begin(), values.end());
  double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

LabelRule LabelRule::fit(const std::vector<RawRecord>& training, double pct) {
  std::vector<double> charges;
  charges.reserve(training.size());
  for (const auto& r : training) charges.push_back(r.charges);
  return {pct, model::percentile(std::move(charges), pct)};
}

std::vector<int> LabelRule::apply_all(const std::vector<RawRecord>& records) const {
  std::vector<int> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(apply(r));
  return out;
}

}  // namespace medclaim::model
