#include "medclaim/model/pipeline.hpp"

#include <cmath>
#include <numeric>

#include "medclaim/error.hpp"
#include "medclaim/random.hpp"

namespace medclaim::model {

TrainReport train_pipeline(const Dataset& data, const TrainConfig& cfg) {
  require(data.records.size() >= 4, ErrorCode::EmptyDataset, "need at least four records to train");
  require(cfg.test_fraction >= 0 && cfg.test_fraction < 1, ErrorCode::InvalidArgument, "test fraction out of range");

  std::vector<std::size_t> order(data.records.size());
  std::iota(order.begin(), order.end(), 0);
  Prng prng(cfg.seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[prng.uniform(i + 1)]);
  auto n_test = static_cast<std::size_t>(std::floor(cfg.test_fraction * static_cast<double>(order.size())));
  std::vector<RawRecord> train, test;
  std::vector<int> y_train, y_test;
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto i = order[k];
    (k < n_test ? test : train).push_back(data.records[i]);
    if (data.labels) (k < n_test ? y_test : y_train).push_back((*data.labels)[i]);
  }

  TrainReport rep;
  auto& w = rep.weights;
  if (!data.labels) {
    w.label_rule = LabelRule::fit(train, cfg.label_percentile);
    y_train = w.label_rule->apply_all(train);
    y_test = w.label_rule->apply_all(test);
  }
  w.norm = fit_stats(train);
  auto x_train = to_matrix(preprocess_all(train, w.norm));
  auto lin = train_logistic(x_train, y_train, cfg.gd);
  std::copy(lin.beta.begin(), lin.beta.end(), w.beta.begin());
  w.intercept = lin.intercept;
  w.sigmoid = fit_sigmoid_poly(cfg.fit_bound, cfg.fit_grid);

  rep.train_size = train.size();
  rep.test_size = test.size();
  rep.train_accuracy = accuracy(x_train, y_train, lin);
  std::size_t outside = 0;
  for (const auto& x : x_train) outside += std::abs(linear_score(x, lin)) > cfg.fit_bound - 1;
  rep.outside_fit_fraction = static_cast<double>(outside) / static_cast<double>(x_train.size());

  auto forest = RandomForest::train(x_train, y_train, {.seed = cfg.seed});
  if (!test.empty()) {
    auto x_test = to_matrix(preprocess_all(test, w.norm));
    rep.test_accuracy = accuracy(x_test, y_test, lin);
    rep.forest_test_accuracy = forest.accuracy(x_test, y_test);
  }
  return rep;
}

}  // namespace medclaim::model
