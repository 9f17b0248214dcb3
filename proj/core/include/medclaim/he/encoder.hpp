#pragma once

#include <complex>
#include <span>
#include <vector>

#include "medclaim/he/ciphertext.hpp"

namespace medclaim::he {

/// Canonical-embedding encoder: slot j holds the message polynomial
/// evaluated at zeta^(5^j), zeta = exp(i*pi/N), with conjugate slots
/// implied so the polynomial has real coefficients.
///
/// Decoding reads the base-prime residue only, so |value * scale| must stay
/// below q_0 / 2. With a 60-bit base prime and scale 2^40 that leaves
/// roughly 2^19 of headroom per slot.
class CkksEncoder {
 public:
  explicit CkksEncoder(ContextPtr ctx);

  std::size_t slot_count() const { return slots_; }

  Plaintext encode(std::span<const double> values, std::size_t level, double scale) const;
  /// Same constant in every slot.
  Plaintext encode_constant(double value, std::size_t level, double scale) const;
  std::vector<double> decode(const Plaintext& pt) const;

  // Exposed for testing against a direct evaluation of the embedding.
  void embed_inverse(std::vector<std::complex<double>>& values) const;
  void embed(std::vector<std::complex<double>>& values) const;

 private:
  ContextPtr ctx_;
  std::size_t slots_;
  std::vector<std::complex<double>> ksi_pows_;
  std::vector<std::size_t> rot_group_;
};

}  // namespace medclaim::he
