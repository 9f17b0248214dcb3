#include "medclaim/model/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "medclaim/error.hpp"
#include "medclaim/random.hpp"

namespace medclaim::model {

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> y, const ForestOptions& opt, Prng& prng)
      : x_(x), y_(y), opt_(opt), prng_(prng) {}

  RandomForest::Tree build(std::vector<std::size_t> rows) {
    tree_.clear();
    grow(rows, 0);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<std::size_t>& rows, int depth) {
    int id = static_cast<int>(tree_.size());
    tree_.emplace_back();
    double pos = 0;
    for (auto r : rows) pos += y_[r];
    tree_[id].value = pos / static_cast<double>(rows.size());
    if (depth >= opt_.max_depth || rows.size() < 2 * opt_.min_leaf || pos == 0 ||
        pos == static_cast<double>(rows.size())) {
      return id;
    }

    const std::size_t d = x_.front().size();
    std::vector<std::size_t> feats(d);
    std::iota(feats.begin(), feats.end(), 0);
    const auto k = static_cast<std::size_t>(std::max(1.0, std::floor(std::sqrt(static_cast<double>(d)))));
    for (std::size_t i = 0; i < k; ++i) std::swap(feats[i], feats[i + prng_.uniform(d - i)]);

    double best_gini = 1e300;
    int best_feat = -1;
    double best_thr = 0;
    const double n = static_cast<double>(rows.size());
    for (std::size_t f = 0; f < k; ++f) {
      std::size_t feat = feats[f];
      std::sort(rows.begin(), rows.end(), [&](auto a, auto b) { return x_[a][feat] < x_[b][feat]; });
      double left_pos = 0;
      for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        left_pos += y_[rows[i]];
        double xv = x_[rows[i]][feat];
        double xn = x_[rows[i + 1]][feat];
        std::size_t nl = i + 1;
        if (xv == xn || nl < opt_.min_leaf || rows.size() - nl < opt_.min_leaf) continue;
        double l = static_cast<double>(nl);
        double r = n - l;
        double pl = left_pos / l;
        double pr = (pos - left_pos) / r;
        double gini = l * pl * (1 - pl) + r * pr * (1 - pr);
        if (gini < best_gini) {
          best_gini = gini;
          best_feat = static_cast<int>(feat);
          best_thr = 0.5 * (xv + xn);
        }
      }
    }
    if (best_feat < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto r : rows) (x_[r][best_feat] <= best_thr ? left : right).push_back(r);
    int l = grow(left, depth + 1);
    int r = grow(right, depth + 1);
    tree_[id].feature = best_feat;
    tree_[id].threshold = best_thr;
    tree_[id].left = l;
    tree_[id].right = r;
    return id;
  }

  const Matrix& x_;
  std::span<const int> y_;
  const ForestOptions& opt_;
  Prng& prng_;
  RandomForest::Tree tree_;
};

RandomForest RandomForest::train(const Matrix& x, std::span<const int> y, const ForestOptions& opt) {
  require(!x.empty(), ErrorCode::EmptyDataset, "training set is empty");
  require(x.size() == y.size(), ErrorCode::InvalidArgument, "feature and label counts differ");
  require(opt.trees > 0 && opt.max_depth > 0 && opt.min_leaf > 0, ErrorCode::InvalidArgument, "bad forest options");
  Prng prng(opt.seed);
  TreeBuilder builder(x, y, opt, prng);
  RandomForest forest;
  for (int t = 0; t < opt.trees; ++t) {
    std::vector<std::size_t> rows(x.size());
    for (auto& r : rows) r = prng.uniform(x.size());
    forest.trees_.push_back(builder.build(std::move(rows)));
  }
  return forest;
}

double RandomForest::predict_proba(std::span<const double> x) const {
  double sum = 0;
  for (const auto& tree : trees_) {
    int id = 0;
    while (tree[id].feature >= 0) id = x[tree[id].feature] <= tree[id].threshold ? tree[id].left : tree[id].right;
    sum += tree[id].value;
  }
  return sum / static_cast<double>(trees_.size());
}

double RandomForest::accuracy(const Matrix& x, std::span<const int> y) const {
  require(!x.empty() && x.size() == y.size(), ErrorCode::InvalidArgument, "accuracy needs matching, non-empty inputs");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < x.size(); ++i) hits += predict(x[i]) == y[i];
  return static_cast<double>(hits) / static_cast<double>(x.size());
}

}  // namespace medclaim::model
