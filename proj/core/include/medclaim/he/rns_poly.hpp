#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "medclaim/he/context.hpp"
#include "medclaim/random.hpp"

namespace medclaim::he {

/// Ring element of Z_Q[X]/(X^N + 1) held as one residue vector ("limb") per
/// prime. `moduli()` names each limb's prime by its index into the context's
/// modulus table, so a polynomial can live over any subset of the chain plus
/// the special prime.
class RnsPoly {
 public:
  RnsPoly() = default;
  RnsPoly(std::size_t n, std::vector<std::uint32_t> moduli, bool ntt_form);

  /// Chain primes 0..level, optionally followed by the special prime.
  static RnsPoly at_level(const HeContext& ctx, std::size_t level, bool with_special, bool ntt_form);

  std::size_t n() const { return n_; }
  std::size_t limb_count() const { return moduli_.size(); }
  const std::vector<std::uint32_t>& moduli() const { return moduli_; }
  bool is_ntt() const { return ntt_; }
  void set_ntt(bool v) { ntt_ = v; }

  std::span<std::uint64_t> limb(std::size_t k) { return {data_.data() + k * n_, n_}; }
  std::span<const std::uint64_t> limb(std::size_t k) const { return {data_.data() + k * n_, n_}; }
  const std::vector<std::uint64_t>& data() const { return data_; }

  /// Drops trailing limbs, keeping the first `count`.
  void truncate(std::size_t count);
  /// Copy restricted to the listed limb positions.
  RnsPoly select(std::span<const std::size_t> positions) const;

  bool operator==(const RnsPoly&) const = default;

  void to_ntt(const HeContext& ctx);
  void from_ntt(const HeContext& ctx);

  void add_inplace(const RnsPoly& o, const HeContext& ctx);
  void sub_inplace(const RnsPoly& o, const HeContext& ctx);
  void negate_inplace(const HeContext& ctx);
  /// Pointwise product; both operands must be in NTT form.
  void mul_inplace(const RnsPoly& o, const HeContext& ctx);
  /// this += a * b (pointwise, NTT form).
  void fma_inplace(const RnsPoly& a, const RnsPoly& b, const HeContext& ctx);

  /// Sets every limb from the same small signed coefficient vector.
  void set_signed(std::span<const std::int64_t> coeffs, const HeContext& ctx);
  void sample_uniform(Prng& prng, const HeContext& ctx);

  void serialize(ByteWriter& w) const;
  static RnsPoly deserialize(ByteReader& r, const HeContext& ctx);

 private:
  void check_compatible(const RnsPoly& o) const;

  std::size_t n_ = 0;
  std::vector<std::uint32_t> moduli_;
  bool ntt_ = false;
  std::vector<std::uint64_t> data_;
};

/// Coefficient samplers for secret keys and errors.
std::vector<std::int64_t> sample_ternary(std::size_t n, Prng& prng);
std::vector<std::int64_t> sample_error(std::size_t n, Prng& prng);

/// Centered-binomial parameter giving standard deviation sqrt(21/2) ~ 3.24.
inline constexpr int kErrorEta = 21;

/// Applies X -> X^galois_elt. Coefficient form permutes with sign flips;
/// NTT form is a pure permutation of the evaluation points.
RnsPoly apply_automorphism(const RnsPoly& poly, std::uint64_t galois_elt, const HeContext& ctx);

}  // namespace medclaim::he
