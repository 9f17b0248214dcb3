#pragma once

#include "medclaim/he/encoder.hpp"
#include "medclaim/he/keys.hpp"

namespace medclaim::he {

Ciphertext encrypt(const HeContext& ctx, const Plaintext& pt, const PublicKey& pk, Prng& prng);
Plaintext decrypt(const HeContext& ctx, const Ciphertext& ct, const SecretKey& sk);

/// Scales are compared up to double rounding; anything looser is a bug.
bool scales_match(double a, double b);

/// c0 + c1*z + c3*z^3.
struct OddCubic {
  double c0 = 0.0;
  double c1 = 0.0;
  double c3 = 0.0;

  double operator()(double z) const { return c0 + z * (c1 + c3 * z * z); }
};

/// Homomorphic operations. Every multiplication is followed by an
/// immediate rescale, so the level drops by one and the scale returns to
/// roughly the encoding scale. None of these take secret-key material.
class Evaluator {
 public:
  explicit Evaluator(ContextPtr ctx);

  const HeContext& context() const { return *ctx_; }
  const CkksEncoder& encoder() const { return encoder_; }

  Ciphertext add(const Ciphertext& a, const Ciphertext& b) const;
  Ciphertext sub(const Ciphertext& a, const Ciphertext& b) const;
  Ciphertext add_plain(const Ciphertext& ct, const Plaintext& pt) const;

  Ciphertext mul(const Ciphertext& a, const Ciphertext& b, const RelinKey& rk) const;
  Ciphertext mul_plain(const Ciphertext& ct, const Plaintext& pt) const;

  Ciphertext rescale(const Ciphertext& ct) const;
  /// Drops primes without dividing; value and scale are unchanged.
  Ciphertext drop_to_level(const Ciphertext& ct, std::size_t level) const;
  /// Brings `ct` to `target_scale` by multiplying with an encoded 1.0.
  /// Consumes one level.
  Ciphertext match_scale(const Ciphertext& ct, double target_scale) const;

  /// Cyclic left shift of the slots; negative steps shift right. Built from
  /// the power-of-two rotation keys.
  Ciphertext rotate(const Ciphertext& ct, long steps, const GaloisKeys& gk) const;

  /// Slot 0 of the result holds sum_i x_i * w_i for i < n_features. Uses one
  /// level and ceil(log2 n_features) rotations.
  Ciphertext inner_product(const Ciphertext& x, const Ciphertext& w, std::size_t n_features, const RelinKey& rk,
                           const GaloisKeys& gk) const;
  /// Same with plaintext weights.
  Ciphertext inner_product_plain(const Ciphertext& x, const Plaintext& w, std::size_t n_features,
                                 const GaloisKeys& gk) const;

  /// Slotwise c0 + c1*z + c3*z^3; consumes two levels.
  Ciphertext eval_poly_odd(const Ciphertext& z, const OddCubic& poly, const RelinKey& rk) const;

 private:
  void check(const Ciphertext& ct) const;
  Ciphertext rotate_once(const Ciphertext& ct, std::uint64_t galois_elt, const KeySwitchKey& key) const;
  Ciphertext sum_slots(Ciphertext acc, std::size_t n_features, const GaloisKeys& gk) const;
  /// Returns (k0, k1) with k0 + k1*s ~ d * s_from, at d's level.
  std::pair<RnsPoly, RnsPoly> key_switch(const RnsPoly& d, const KeySwitchKey& key) const;
  void rescale_poly(RnsPoly& poly, std::size_t level) const;

  ContextPtr ctx_;
  CkksEncoder encoder_;
};

}  // namespace medclaim::he
