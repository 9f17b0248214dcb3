#include "medclaim/he/context.hpp"

namespace medclaim::he {

std::shared_ptr<const HeContext> HeContext::create(const HeParams& params, std::size_t min_depth) {
  params.validate(min_depth);
  return std::shared_ptr<const HeContext>(new HeContext(params));
}

HeContext::HeContext(const HeParams& params) : params_(params), fingerprint_(params.fingerprint()) {
  for (u64 p : params_.chain) moduli_.emplace_back(p);
  moduli_.emplace_back(params_.special_prime);
  for (const auto& q : moduli_) ntt_.emplace_back(params_.ring_dimension, q);

  const std::size_t chain = params_.chain.size();
  rescale_inv_.resize(chain);
  for (std::size_t level = 1; level < chain; ++level) {
    for (std::size_t j = 0; j < level; ++j) {
      rescale_inv_[level].push_back(moduli_[j].inv(moduli_[j].reduce(params_.chain[level])));
    }
  }
  for (std::size_t j = 0; j < chain; ++j) {
    special_mod_.push_back(moduli_[j].reduce(params_.special_prime));
    special_inv_.push_back(moduli_[j].inv(special_mod_.back()));
  }
}

u64 HeContext::galois_element(std::size_t steps) const {
  const u64 two_n = 2 * static_cast<u64>(n());
  steps %= slot_count();
  u64 g = 1;
  for (std::size_t i = 0; i < steps; ++i) g = g * 5 % two_n;
  return g;
}

}  // namespace medclaim::he
