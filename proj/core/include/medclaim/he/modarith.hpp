#pragma once

#include <cstdint>
#include <vector>

namespace medclaim::he {

using u64 = std::uint64_t;
__extension__ using u128 = unsigned __int128;

// Word-size prime modulus (< 2^62) with a precomputed Barrett constant.
class Modulus {
 public:
  Modulus() = default;
  explicit Modulus(u64 value);

  u64 value() const { return value_; }

  u64 reduce(u64 a) const { return a >= value_ ? reduce128(a) : a; }

  u64 reduce128(u128 z) const {
    // floor(z * ratio / 2^128) underestimates the quotient by at most 2
    u64 z0 = static_cast<u64>(z);
    u64 z1 = static_cast<u64>(z >> 64);
    u128 lo = static_cast<u128>(z0) * ratio_lo_;
    u128 mid1 = static_cast<u128>(z0) * ratio_hi_;
    u128 mid2 = static_cast<u128>(z1) * ratio_lo_;
    u128 carry = (lo >> 64) + static_cast<u64>(mid1) + static_cast<u64>(mid2);
    u64 q_est = static_cast<u64>((mid1 >> 64) + (mid2 >> 64) + (carry >> 64)) + z1 * ratio_hi_;
    u64 r = z0 - q_est * value_;
    while (r >= value_) r -= value_;
    return r;
  }

  u64 add(u64 a, u64 b) const {
    u64 s = a + b;
    return s >= value_ ? s - value_ : s;
  }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + value_ - b; }
  u64 neg(u64 a) const { return a == 0 ? 0 : value_ - a; }
  u64 mul(u64 a, u64 b) const { return reduce128(static_cast<u128>(a) * b); }

  // Reduces a signed integer into [0, q).
  u64 from_signed(std::int64_t a) const {
    if (a >= 0) return reduce(static_cast<u64>(a));
    u64 r = reduce(static_cast<u64>(-(a + 1)) + 1);
    return neg(r);
  }
  // Centered representative in (-q/2, q/2].
  std::int64_t centered(u64 a) const {
    return a > value_ / 2 ? static_cast<std::int64_t>(a) - static_cast<std::int64_t>(value_)
                          : static_cast<std::int64_t>(a);
  }

  u64 pow(u64 base, u64 exp) const;
  u64 inv(u64 a) const;  // a must be nonzero; q prime

  bool operator==(const Modulus& o) const { return value_ == o.value_; }

 private:
  u64 value_ = 0;
  u64 ratio_hi_ = 0;  // floor(2^128 / q), high word
  u64 ratio_lo_ = 0;
};

// Shoup precomputation for repeated multiplication by a fixed operand.
struct ShoupConst {
  u64 value;
  u64 quotient;  // floor(value * 2^64 / q)

  static ShoupConst make(u64 w, u64 q) {
    return {w, static_cast<u64>((static_cast<u128>(w) << 64) / q)};
  }
};

inline u64 mul_shoup_lazy(u64 a, const ShoupConst& w, u64 q) {
  u64 hi = static_cast<u64>((static_cast<u128>(a) * w.quotient) >> 64);
  return a * w.value - hi * q;  // in [0, 2q)
}

inline u64 mul_shoup(u64 a, const ShoupConst& w, u64 q) {
  u64 r = mul_shoup_lazy(a, w, q);
  return r >= q ? r - q : r;
}

bool is_prime(u64 n);

// Largest `count` primes below 2^bits that are congruent to 1 mod `modulus`,
// excluding any value in `exclude`. Returned in descending order.
std::vector<u64> find_ntt_primes(int bits, u64 modulus, std::size_t count, const std::vector<u64>& exclude = {});

// A primitive `order`-th root of unity mod prime q. Deterministic.
u64 primitive_root_of_unity(u64 order, const Modulus& q);

}  // namespace medclaim::he
