#pragma once

#include <span>
#include <vector>

#include "medclaim/he/modarith.hpp"

namespace medclaim::he {

// Negacyclic NTT over Z_q[X]/(X^N + 1). The forward transform maps
// coefficients to evaluations at the odd powers of a primitive 2N-th root,
// in bit-reversed order, so pointwise products implement negacyclic
// convolution.
class NttTables {
 public:
  NttTables(std::size_t n, const Modulus& q);

  void forward(std::span<u64> a) const;
  void inverse(std::span<u64> a) const;

  std::size_t size() const { return n_; }
  const Modulus& modulus() const { return q_; }

 private:
  std::size_t n_;
  Modulus q_;
  std::vector<ShoupConst> psi_rev_;      // psi^bitrev(i)
  std::vector<ShoupConst> psi_inv_rev_;  // psi^-bitrev(i)
  ShoupConst n_inv_;
};

}  // namespace medclaim::he
