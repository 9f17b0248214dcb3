#pragma once

#include <map>
#include <optional>

#include "medclaim/he/ciphertext.hpp"

namespace medclaim::he {

/// Ternary secret s, stored in NTT form over every chain prime and the special prime.
struct SecretKey {
  RnsPoly s;
  std::uint64_t params_id = 0;
  bool operator==(const SecretKey&) const = default;
};

/// (b, a) = (-a*s + e, a) over the full chain.
struct PublicKey {
  RnsPoly b;
  RnsPoly a;
  std::uint64_t params_id = 0;
  bool operator==(const PublicKey&) const = default;
};

/// Hybrid key-switching material: one (b_i, a_i) pair per chain prime, each
/// over the chain plus the special prime P, with
/// b_i = -a_i*s + e_i + P * [i-th CRT idempotent] * s_from.
struct KeySwitchKey {
  std::vector<RnsPoly> b;
  std::vector<RnsPoly> a;
  bool operator==(const KeySwitchKey&) const = default;
};

/// Key switching from s^2 back to s.
struct RelinKey {
  KeySwitchKey key;
  bool operator==(const RelinKey&) const = default;
};

/// Key switching from sigma_g(s) to s, keyed by Galois element g.
struct GaloisKeys {
  std::map<std::uint64_t, KeySwitchKey> keys;
  bool operator==(const GaloisKeys&) const = default;
};

/// Everything the server needs: encryption and evaluation keys, no secret.
struct PublicContext {
  HeParams params;
  PublicKey public_key;
  RelinKey relin_key;
  GaloisKeys galois_keys;
  bool operator==(const PublicContext&) const = default;
};

struct KeyBundle {
  HeParams params;
  SecretKey secret_key;
  PublicKey public_key;
  RelinKey relin_key;
  GaloisKeys galois_keys;

  PublicContext public_context() const { return {params, public_key, relin_key, galois_keys}; }
  bool operator==(const KeyBundle&) const = default;
};

/// Generates a full bundle. Rotation keys cover every power-of-two step
/// below slot_count. With a seed, the bundle is byte-identical across runs.
KeyBundle keygen(const HeParams& params, std::optional<std::uint64_t> seed = std::nullopt,
                 std::size_t min_depth = kClaimCircuitDepth);

/// Secret-key coefficients in {-1, 0, 1}, recovered from the NTT form.
std::vector<int> secret_coefficients(const SecretKey& sk, const HeContext& ctx);

}  // namespace medclaim::he
