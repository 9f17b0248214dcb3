#pragma once

#include <cstdint>
#include <vector>

#include "medclaim/bytes.hpp"
#include "medclaim/he/modarith.hpp"

namespace medclaim::he {

/// Multiplicative depth of the claim-scoring circuit: one level for the
/// inner product, two for the cubic sigmoid polynomial.
inline constexpr std::size_t kClaimCircuitDepth = 3;

/// Encryption parameters for the leveled approximate scheme.
///
/// `chain[0]` is the base prime that survives every rescale; `chain[1..]`
/// are the rescaling primes, consumed from the back. `special_prime` is used
/// only inside key switching and never appears in a ciphertext modulus.
struct HeParams {
  std::size_t ring_dimension = 0;
  std::vector<u64> chain;
  u64 special_prime = 0;
  double scale = 0.0;

  std::size_t slot_count() const { return ring_dimension / 2; }
  std::size_t max_level() const { return chain.size() - 1; }

  /// Throws InvalidParams if any structural invariant fails or fewer than
  /// `min_depth` rescaling primes sit above the base prime.
  void validate(std::size_t min_depth = kClaimCircuitDepth) const;

  /// Stable 64-bit fingerprint used to detect keys and ciphertexts from
  /// different parameter sets.
  std::uint64_t fingerprint() const;

  bool operator==(const HeParams&) const = default;

  void serialize(ByteWriter& w) const;
  static HeParams deserialize(ByteReader& r);
};

/// Generates NTT-friendly primes for the given bit sizes:
/// one base prime, `level_bits.size()` rescaling primes, and a special prime.
HeParams make_params(std::size_t ring_dimension, int base_bits, const std::vector<int>& level_bits,
                     int special_bits, int scale_bits);

/// N = 8192, one 60-bit base prime, four 40-bit rescaling primes, a 60-bit
/// special prime, and scale 2^40.
HeParams default_params();

}  // namespace medclaim::he
