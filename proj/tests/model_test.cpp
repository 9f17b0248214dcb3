#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <numeric>

#include "medclaim/he/keys.hpp"
#include "medclaim/model/dataset.hpp"
#include "medclaim/model/encrypted.hpp"
#include "medclaim/model/forest.hpp"
#include "medclaim/random.hpp"

using namespace medclaim;
using namespace medclaim::model;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::Io;
}

RawRecord sample_record() {
  RawRecord r;
  r.age = 19;
  r.sex = 0;
  r.bmi = 28;
  r.children = 0;
  r.smoker = 0;
  r.region = 1;
  r.charges = 1254;
  return r;
}

// Least squares on {1, x, x^3} by explicit 3x3 normal equations in long
// double, solved with Cramer's rule.
std::array<long double, 3> normal_equation_fit(double bound, std::size_t n) {
  long double m[3][3] = {};
  long double v[3] = {};
  for (std::size_t i = 0; i < n; ++i) {
    long double x = -bound + 2.0L * bound * i / (n - 1);
    long double phi[3] = {1, x, x * x * x};
    long double y = 1.0L / (1.0L + std::exp(-x));
    for (int a = 0; a < 3; ++a) {
      v[a] += phi[a] * y;
      for (int b = 0; b < 3; ++b) m[a][b] += phi[a] * phi[b];
    }
  }
  auto det = [](long double a[3][3]) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  };
  long double d = det(m);
  std::array<long double, 3> out{};
  for (int c = 0; c < 3; ++c) {
    long double t[3][3];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) t[a][b] = b == c ? v[a] : m[a][b];
    out[c] = det(t) / d;
  }
  return out;
}

}  // namespace

TEST(Stats, TwoPointSampleStd) {
  auto a = sample_record();
  auto b = sample_record();
  a.age = 20;
  b.age = 40;
  b.sex = 1;
  b.bmi = 30;
  b.children = 2;
  b.smoker = 1;
  b.region = 3;
  b.charges = 3000;
  auto s = fit_stats({a, b});
  EXPECT_DOUBLE_EQ(s.mean[0], 30.0);
  EXPECT_NEAR(s.std[0], 14.142135623730951, 1e-12);
  EXPECT_NEAR(s.std[1], std::sqrt(0.5), 1e-12);
}

TEST(Stats, ConstantColumnRejected) {
  auto data = synthetic_insurance(50, 1);
  for (auto& r : data.records) r.smoker = 0;
  EXPECT_EQ(code_of([&] { fit_stats(data.records); }), ErrorCode::DegenerateColumn);
  EXPECT_EQ(code_of([&] { fit_stats({sample_record()}); }), ErrorCode::EmptyDataset);
}

TEST(Stats, StandardizedTrainingSetIsUnitNormal) {
  auto data = synthetic_insurance(500, 3);
  auto s = fit_stats(data.records);
  auto z = preprocess_all(data.records, s);
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    double m = 0, v = 0;
    for (const auto& x : z) m += x[j];
    m /= z.size();
    for (const auto& x : z) v += (x[j] - m) * (x[j] - m);
    v /= z.size() - 1;
    EXPECT_NEAR(m, 0.0, 1e-9) << kFeatureNames[j];
    EXPECT_NEAR(std::sqrt(v), 1.0, 1e-9) << kFeatureNames[j];
  }
}

TEST(Preprocess, MeansMapToZeroAndSchemaChecked) {
  auto data = synthetic_insurance(200, 5);
  auto s = fit_stats(data.records);
  auto r = sample_record();
  auto x = preprocess(r, s);
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    EXPECT_TRUE(std::isfinite(x[j]));
    EXPECT_NEAR(x[j], (r.features()[j] - s.mean[j]) / s.std[j], 1e-15);
  }
  NormStats unit;
  unit.mean = {40, 0.5, 30, 1, 0.2, 1.5, 13000};
  unit.std.fill(2.0);
  RawRecord at_mean;
  at_mean.age = 40;
  at_mean.sex = 1;
  at_mean.bmi = 30;
  at_mean.children = 1;
  at_mean.region = 2;
  at_mean.charges = 13000;
  auto zero = preprocess(at_mean, unit);
  EXPECT_DOUBLE_EQ(zero[0], 0.0);
  EXPECT_DOUBLE_EQ(zero[6], 0.0);

  r.region = 7;
  EXPECT_EQ(code_of([&] { preprocess(r, s); }), ErrorCode::SchemaViolation);
  r = sample_record();
  r.sex = 2;
  EXPECT_EQ(code_of([&] { validate(r); }), ErrorCode::SchemaViolation);
  r = sample_record();
  r.bmi = std::nan("");
  EXPECT_EQ(code_of([&] { validate(r); }), ErrorCode::SchemaViolation);
}

TEST(Training, SeparableToySetConverges) {
  Prng prng(17);
  Matrix x;
  std::vector<int> y;
  while (x.size() < 200) {
    double a = prng.uniform_real() * 4 - 2;
    double b = prng.uniform_real() * 4 - 2;
    double margin = a + 0.5 * b;
    if (std::abs(margin) < 0.2) continue;
    x.push_back({a, b});
    y.push_back(margin > 0 ? 1 : 0);
  }
  auto m = train_logistic(x, y, {0.1, 500});
  EXPECT_GE(accuracy(x, y, m), 0.99);
}

TEST(Training, ZeroEpochsAndErrors) {
  Matrix x = {{1, 2}, {3, 4}};
  std::vector<int> y = {0, 1};
  auto m = train_logistic(x, y, {0.1, 0});
  EXPECT_EQ(m.beta, std::vector<double>({0, 0}));
  EXPECT_EQ(m.intercept, 0.0);
  EXPECT_EQ(code_of([&] { train_logistic({}, {}, {}); }), ErrorCode::EmptyDataset);
  std::vector<int> bad = {0, 2};
  EXPECT_EQ(code_of([&] { train_logistic(x, bad, {}); }), ErrorCode::NonBinaryLabels);
}

TEST(Training, Deterministic) {
  auto data = synthetic_insurance(300, 9);
  auto s = fit_stats(data.records);
  auto x = to_matrix(preprocess_all(data.records, s));
  auto y = LabelRule::fit(data.records).apply_all(data.records);
  auto a = train_logistic(x, y, {0.1, 50});
  auto b = train_logistic(x, y, {0.1, 50});
  EXPECT_EQ(a.beta, b.beta);
  EXPECT_EQ(a.intercept, b.intercept);
}

TEST(Training, GradientMatchesCentralDifferences) {
  auto data = synthetic_insurance(100, 21);
  auto s = fit_stats(data.records);
  auto x = to_matrix(preprocess_all(data.records, s));
  auto y = LabelRule::fit(data.records).apply_all(data.records);
  Prng prng(99);
  const double h = 1e-5;
  for (int point = 0; point < 20; ++point) {
    LinearModel m{std::vector<double>(kFeatureCount), prng.normal()};
    for (auto& b : m.beta) b = prng.normal();
    auto g = logistic_loss_grad(x, y, m);
    std::vector<double> analytic = g.grad_beta;
    analytic.push_back(g.grad_intercept);
    double diff2 = 0, norm2 = 0;
    for (std::size_t k = 0; k <= kFeatureCount; ++k) {
      auto plus = m;
      auto minus = m;
      double& p = k < kFeatureCount ? plus.beta[k] : plus.intercept;
      double& q = k < kFeatureCount ? minus.beta[k] : minus.intercept;
      p += h;
      q -= h;
      double fd = (logistic_loss_grad(x, y, plus).loss - logistic_loss_grad(x, y, minus).loss) / (2 * h);
      diff2 += (fd - analytic[k]) * (fd - analytic[k]);
      norm2 += analytic[k] * analytic[k];
    }
    EXPECT_LE(std::sqrt(diff2 / norm2), 1e-6) << "point " << point;
  }
}

TEST(Predict, PlainSigmoid) {
  ModelWeights w;
  FeatureVector x{1, 2, 3, 4, 5, 6, 7};
  EXPECT_EQ(predict_plain(x, w), 0.5);
  w.intercept = 5;
  EXPECT_NEAR(predict_plain(x, w), 1.0 / (1.0 + std::exp(-5.0)), 1e-12);
  Prng prng(4);
  for (int i = 0; i < 1000; ++i) {
    for (auto& b : w.beta) b = prng.normal();
    for (auto& v : x) v = prng.normal();
    double p = predict_plain(x, w);
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
  }
}

TEST(Decide, StrictThreshold) {
  EXPECT_EQ(decide(0.47).verdict, Verdict::Denied);
  EXPECT_EQ(decide(0.5).verdict, Verdict::Denied);
  EXPECT_EQ(decide(std::nextafter(0.5, 1.0)).verdict, Verdict::Approved);
  EXPECT_EQ(decide(0.9).verdict, Verdict::Approved);
  EXPECT_EQ(decide(0.0).verdict, Verdict::Denied);
  EXPECT_EQ(decide(1.0).verdict, Verdict::Approved);
  EXPECT_EQ(code_of([] { decide(1.01); }), ErrorCode::OutOfRange);
  EXPECT_EQ(code_of([] { decide(-0.1); }), ErrorCode::OutOfRange);
  EXPECT_EQ(code_of([] { decide(std::nan("")); }), ErrorCode::OutOfRange);
}

TEST(SigmoidFit, SmallIntervalApproachesTaylor) {
  auto fit = fit_sigmoid_poly(0.01, 2001);
  EXPECT_NEAR(fit.poly.c0, 0.5, 1e-3);
  EXPECT_NEAR(fit.poly.c1, 0.25, 1e-3);
}

TEST(SigmoidFit, EvenTermVanishesOnSymmetricInterval) {
  auto c = fit_sigmoid_powers(5.0, 2001, {0, 1, 2, 3});
  EXPECT_LE(std::abs(c[2]), 1e-9);
}

TEST(SigmoidFit, MatchesNormalEquationOracle) {
  auto fit = fit_sigmoid_poly(5.0, 2001);
  auto oracle = normal_equation_fit(5.0, 2001);
  EXPECT_NEAR(fit.poly.c0, static_cast<double>(oracle[0]), 1e-9);
  EXPECT_NEAR(fit.poly.c1, static_cast<double>(oracle[1]), 1e-9);
  EXPECT_NEAR(fit.poly.c3, static_cast<double>(oracle[2]), 1e-9);
  EXPECT_NEAR(fit.poly.c0, 0.5, 1e-3);
  double max_err = 0;
  for (int i = 0; i < 2001; ++i) {
    double x = -5.0 + 10.0 * i / 2000;
    max_err = std::max(max_err, std::abs(fit.poly(x) - 1.0 / (1.0 + std::exp(-x))));
  }
  EXPECT_NEAR(fit.max_err, max_err, 1e-12);
  EXPECT_LE(fit.max_err, 0.1);
}

TEST(SigmoidFit, InvalidInterval) {
  EXPECT_EQ(code_of([] { fit_sigmoid_poly(0.0); }), ErrorCode::InvalidInterval);
  EXPECT_EQ(code_of([] { fit_sigmoid_poly(-1.0); }), ErrorCode::InvalidInterval);
  EXPECT_EQ(code_of([] { fit_sigmoid_poly(5.0, 3); }), ErrorCode::InvalidInterval);
}

TEST(Dataset, CsvRoundtripAndSchema) {
  auto dir = fs::temp_directory_path() / "medclaim_model_csv";
  fs::create_directories(dir);
  auto data = synthetic_insurance(30, 8);
  data.labels = LabelRule::fit(data.records).apply_all(data.records);
  save_csv(dir / "a.csv", data);
  auto back = load_csv(dir / "a.csv");
  ASSERT_EQ(back.records.size(), 30u);
  ASSERT_TRUE(back.labels);
  EXPECT_EQ(*back.labels, *data.labels);
  EXPECT_EQ(back.records[7].charges, data.records[7].charges);
  EXPECT_EQ(back.records[7].bmi, data.records[7].bmi);

  write_file(dir / "empty.csv", {});
  EXPECT_EQ(code_of([&] { load_csv(dir / "empty.csv"); }), ErrorCode::SchemaViolation);
  write_file(dir / "hdr.csv", as_bytes("age,sex,bmi\n1,0,2\n"));
  EXPECT_EQ(code_of([&] { load_csv(dir / "hdr.csv"); }), ErrorCode::SchemaViolation);
  write_file(dir / "region.csv", as_bytes("age,sex,bmi,children,smoker,region,charges\n19,0,28,0,0,7,1254\n"));
  EXPECT_EQ(code_of([&] { load_csv(dir / "region.csv"); }), ErrorCode::SchemaViolation);
  write_file(dir / "text.csv",
             as_bytes("age,sex,bmi,children,smoker,region,charges\n19,female,27.9,0,yes,southwest,16884.924\n"));
  auto t = load_csv(dir / "text.csv");
  EXPECT_EQ(t.records[0].smoker, 1);
  EXPECT_EQ(t.records[0].region, 0);
  EXPECT_FALSE(t.labels);
  fs::remove_all(dir);
}

TEST(Dataset, LabelRulePercentile) {
  EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4, 5}, 75), 4.0);
  EXPECT_DOUBLE_EQ(percentile({10, 20}, 75), 17.5);
  auto data = synthetic_insurance(400, 2);
  auto rule = LabelRule::fit(data.records);
  auto y = rule.apply_all(data.records);
  double frac = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  EXPECT_NEAR(frac, 0.75, 0.01);
}

TEST(Forest, BaselineLearnsLabelRule) {
  auto data = synthetic_insurance(600, 12);
  auto s = fit_stats(data.records);
  auto x = to_matrix(preprocess_all(data.records, s));
  auto y = LabelRule::fit(data.records).apply_all(data.records);
  auto forest = RandomForest::train(x, y);
  EXPECT_GE(forest.accuracy(x, y), 0.95);
}

TEST(ModelFile, JsonRoundtrip) {
  ModelWeights w;
  w.beta = {0.1, -0.2, 0.3, -0.4, 0.5, -0.6, 0.7};
  w.intercept = 1.25;
  w.norm.mean = {1, 2, 3, 4, 5, 6, 7};
  w.norm.std = {1, 1, 1, 1, 1, 1, 2};
  w.sigmoid = fit_sigmoid_poly();
  w.label_rule = LabelRule{75, 16000};
  auto back = model_from_json(to_json(w));
  EXPECT_EQ(back.beta, w.beta);
  EXPECT_EQ(back.intercept, w.intercept);
  EXPECT_EQ(back.norm.std, w.norm.std);
  EXPECT_EQ(back.sigmoid.poly.c3, w.sigmoid.poly.c3);
  ASSERT_TRUE(back.label_rule);
  EXPECT_EQ(back.label_rule->cap, 16000);
  EXPECT_EQ(code_of([] { model_from_json("{}"); }), ErrorCode::Malformed);
}

class EncryptedModelTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    bundle_ = new he::KeyBundle(he::keygen(he::default_params(), 2024));
    ev_ = new he::Evaluator(he::HeContext::create(bundle_->params));
  }
  static void TearDownTestSuite() {
    delete ev_;
    delete bundle_;
  }

  static ModelWeights trained(std::size_t n, std::uint64_t seed, std::vector<RawRecord>* holdout) {
    auto data = synthetic_insurance(n, seed);
    auto rule = LabelRule::fit(data.records);
    auto s = fit_stats(data.records);
    auto x = to_matrix(preprocess_all(data.records, s));
    auto m = train_logistic(x, rule.apply_all(data.records), {0.1, 300});
    ModelWeights w;
    std::copy(m.beta.begin(), m.beta.end(), w.beta.begin());
    w.intercept = m.intercept;
    w.norm = s;
    w.sigmoid = fit_sigmoid_poly();
    w.label_rule = rule;
    if (holdout) *holdout = synthetic_insurance(200, seed + 1).records;
    return w;
  }

  static he::KeyBundle* bundle_;
  static he::Evaluator* ev_;
};

he::KeyBundle* EncryptedModelTest::bundle_ = nullptr;
he::Evaluator* EncryptedModelTest::ev_ = nullptr;

TEST_F(EncryptedModelTest, BetaRoundtrip) {
  auto w = trained(300, 1, nullptr);
  Prng prng(1);
  auto em = encrypt_model(w, *ev_, bundle_->public_context(), WeightMode::CtCt, prng);
  ASSERT_TRUE(em.beta_ct);
  EXPECT_FALSE(em.beta_pt);
  auto beta = ev_->encoder().decode(he::decrypt(ev_->context(), *em.beta_ct, bundle_->secret_key));
  for (std::size_t j = 0; j < kFeatureCount; ++j) EXPECT_NEAR(beta[j], w.beta[j], 1e-4);
  EXPECT_NEAR(beta[kFeatureCount], 0.0, 1e-4);

  auto pt = encrypt_model(w, *ev_, bundle_->public_context(), WeightMode::CtPt, prng);
  EXPECT_FALSE(pt.beta_ct);
  EXPECT_FALSE(pt.intercept_ct);
  ASSERT_TRUE(pt.beta_pt);
  auto decoded = ev_->encoder().decode(*pt.beta_pt);
  EXPECT_NEAR(decoded[3], w.beta[3], 1e-6);
}

TEST_F(EncryptedModelTest, SerializationRoundtrip) {
  auto w = trained(300, 1, nullptr);
  Prng prng(2);
  for (auto mode : {WeightMode::CtCt, WeightMode::CtPt}) {
    auto em = encrypt_model(w, *ev_, bundle_->public_context(), mode, prng);
    auto bytes = serialize(em);
    auto back = deserialize_encrypted_model(bytes, ev_->context());
    EXPECT_EQ(serialize(back), bytes);
    EXPECT_EQ(back.mode, mode);
  }
}

TEST_F(EncryptedModelTest, MismatchedContextRejected) {
  auto w = trained(300, 1, nullptr);
  Prng prng(3);
  auto other = he::keygen(he::make_params(4096, 60, {40, 40, 40}, 60, 40), 5);
  EXPECT_EQ(code_of([&] { encrypt_model(w, *ev_, other.public_context(), WeightMode::CtCt, prng); }),
            ErrorCode::KeyParamsMismatch);
}

TEST_F(EncryptedModelTest, ZeroWeightsGiveOneHalf) {
  ModelWeights w;
  w.sigmoid = fit_sigmoid_poly();
  Prng prng(4);
  auto em = encrypt_model(w, *ev_, bundle_->public_context(), WeightMode::CtCt, prng);
  auto x = encrypt_features({0.3, -1, 2, 0.1, 1.5, -0.7, 0.2}, *ev_, bundle_->public_key, prng);
  auto out = predict_encrypted(x, em, *ev_, bundle_->relin_key, bundle_->galois_keys);
  EXPECT_NEAR(decrypt_slot0(out, *ev_, bundle_->secret_key), 0.5, 1e-2);
}

TEST_F(EncryptedModelTest, LevelBudgetChecked) {
  ModelWeights w;
  w.sigmoid = fit_sigmoid_poly();
  Prng prng(5);
  auto em = encrypt_model(w, *ev_, bundle_->public_context(), WeightMode::CtCt, prng);
  auto x = encrypt_features({}, *ev_, bundle_->public_key, prng);
  auto low = ev_->drop_to_level(x, 2);
  EXPECT_EQ(code_of([&] { predict_encrypted(low, em, *ev_, bundle_->relin_key, bundle_->galois_keys); }),
            ErrorCode::NoLevelsRemaining);
}

TEST_F(EncryptedModelTest, MatchesPlaintextReplicaOn200Records) {
  std::vector<RawRecord> holdout;
  auto w = trained(1000, 40, &holdout);
  Prng prng(6);
  for (auto mode : {WeightMode::CtCt, WeightMode::CtPt}) {
    auto em = encrypt_model(w, *ev_, bundle_->public_context(), mode, prng);
    std::size_t n = mode == WeightMode::CtCt ? holdout.size() : 20;
    std::size_t eligible = 0, agree = 0;
    double worst = 0;
    for (std::size_t i = 0; i < n; ++i) {
      auto x = preprocess(holdout[i], w.norm);
      auto ct = encrypt_features(x, *ev_, bundle_->public_key, prng);
      double got = decrypt_slot0(predict_encrypted(ct, em, *ev_, bundle_->relin_key, bundle_->galois_keys), *ev_,
                                 bundle_->secret_key);
      worst = std::max(worst, std::abs(got - circuit_replica(x, w)));
      double p = predict_plain(x, w);
      if (std::abs(score(x, w)) <= w.sigmoid.bound - 1 && std::abs(p - 0.5) > 0.01) {
        ++eligible;
        agree += decide(std::clamp(got, 0.0, 1.0)).verdict == decide(p).verdict;
      }
    }
    EXPECT_LE(worst, 0.02) << to_string(mode);
    ASSERT_GT(eligible, 0u);
    EXPECT_GE(static_cast<double>(agree) / eligible, 0.95) << to_string(mode) << " eligible " << eligible;
  }
}
