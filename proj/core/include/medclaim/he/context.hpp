#pragma once

#include <memory>
#include <vector>

#include "medclaim/he/ntt.hpp"
#include "medclaim/he/params.hpp"

namespace medclaim::he {

/// Validated parameters plus every table derived from them. Immutable and
/// shared by keys, ciphertexts and evaluators built over the same parameters.
class HeContext {
 public:
  static std::shared_ptr<const HeContext> create(const HeParams& params, std::size_t min_depth = kClaimCircuitDepth);

  const HeParams& params() const { return params_; }
  std::uint64_t fingerprint() const { return fingerprint_; }
  std::size_t n() const { return params_.ring_dimension; }
  std::size_t slot_count() const { return params_.slot_count(); }
  std::size_t max_level() const { return params_.max_level(); }

  // Modulus table: indices 0..max_level are the chain, then the special prime.
  std::size_t special_index() const { return params_.chain.size(); }
  const Modulus& modulus(std::size_t index) const { return moduli_[index]; }
  const NttTables& ntt(std::size_t index) const { return ntt_[index]; }

  /// q_level^{-1} mod q_j, for j < level.
  u64 rescale_inv(std::size_t level, std::size_t j) const { return rescale_inv_[level][j]; }
  /// P^{-1} mod q_j.
  u64 special_inv(std::size_t j) const { return special_inv_[j]; }
  /// P mod q_j.
  u64 special_mod(std::size_t j) const { return special_mod_[j]; }

  /// Galois element 5^steps mod 2N for a left rotation by `steps` slots.
  u64 galois_element(std::size_t steps) const;

 private:
  explicit HeContext(const HeParams& params);

  HeParams params_;
  std::uint64_t fingerprint_;
  std::vector<Modulus> moduli_;
  std::vector<NttTables> ntt_;
  std::vector<std::vector<u64>> rescale_inv_;
  std::vector<u64> special_inv_;
  std::vector<u64> special_mod_;
};

using ContextPtr = std::shared_ptr<const HeContext>;

}  // namespace medclaim::he
