#pragma once

#include "medclaim/he/rns_poly.hpp"

namespace medclaim::he {

/// Encoded message: a ring element (NTT form, limbs 0..level) with its scale.
struct Plaintext {
  RnsPoly poly;
  std::size_t level = 0;
  double scale = 0.0;
  std::uint64_t params_id = 0;

  bool operator==(const Plaintext&) const = default;
};

/// RLWE ciphertext (c0, c1) decrypting to c0 + c1 * s mod Q_level.
/// Both components are kept in NTT form.
struct Ciphertext {
  RnsPoly c0;
  RnsPoly c1;
  std::size_t level = 0;
  double scale = 0.0;
  std::uint64_t params_id = 0;

  bool operator==(const Ciphertext&) const = default;
};

}  // namespace medclaim::he
