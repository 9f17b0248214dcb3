#include "medclaim/he/modarith.hpp"

#include "medclaim/error.hpp"

namespace medclaim::he {

Modulus::Modulus(u64 value) : value_(value) {
  require(value >= 2 && value < (u64{1} << 62), ErrorCode::InvalidParams, "modulus out of range");
  u128 ratio = ~u128{0} / value;
  ratio_hi_ = static_cast<u64>(ratio >> 64);
  ratio_lo_ = static_cast<u64>(ratio);
}

u64 Modulus::pow(u64 base, u64 exp) const {
  u64 result = 1 % value_;
  base = reduce(base);
  while (exp > 0) {
    if (exp & 1) result = mul(result, base);
    base = mul(base, base);
    exp >>= 1;
  }
  return result;
}

u64 Modulus::inv(u64 a) const {
  a = reduce(a);
  require(a != 0, ErrorCode::InvalidParams, "zero has no inverse");
  return pow(a, value_ - 2);
}

namespace {

u64 mulmod_plain(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod_plain(u64 base, u64 exp, u64 m) {
  u64 r = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) r = mulmod_plain(r, base, m);
    base = mulmod_plain(base, base, m);
    exp >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // These bases are deterministic for all 64-bit n.
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = powmod_plain(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod_plain(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::vector<u64> find_ntt_primes(int bits, u64 modulus, std::size_t count, const std::vector<u64>& exclude) {
  require(bits >= 20 && bits <= 61, ErrorCode::InvalidParams, "prime bit size must be in [20, 61]");
  std::vector<u64> out;
  u64 upper = u64{1} << bits;
  // largest candidate below 2^bits congruent to 1 mod `modulus`
  u64 candidate = upper - modulus + 1;
  u64 lower = u64{1} << (bits - 1);
  while (out.size() < count && candidate > lower) {
    bool excluded = false;
    for (u64 e : exclude) excluded |= (e == candidate);
    if (!excluded && is_prime(candidate)) out.push_back(candidate);
    candidate -= modulus;
  }
  require(out.size() == count, ErrorCode::InvalidParams,
          "not enough NTT-friendly primes of " + std::to_string(bits) + " bits");
  return out;
}

u64 primitive_root_of_unity(u64 order, const Modulus& q) {
  u64 p = q.value();
  require((p - 1) % order == 0, ErrorCode::InvalidParams, "order does not divide q - 1");
  for (u64 x = 2; x < p; ++x) {
    u64 root = q.pow(x, (p - 1) / order);
    // order is a power of two, so root is primitive iff root^(order/2) = -1
    if (q.pow(root, order / 2) == p - 1) return root;
  }
  fail(ErrorCode::InvalidParams, "no primitive root found");
}

}  // namespace medclaim::he
