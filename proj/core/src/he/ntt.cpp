#include "medclaim/he/ntt.hpp"

#include <bit>

#include "medclaim/error.hpp"

namespace medclaim::he {

namespace {

std::size_t bit_reverse(std::size_t x, int bits) {
  std::size_t r = 0;
  for (int i = 0; i < bits; ++i) {
    r = (r << 1) | (x & 1);
    x >>= 1;
  }
  return r;
}

}  // namespace

NttTables::NttTables(std::size_t n, const Modulus& q) : n_(n), q_(q) {
  require(std::has_single_bit(n) && n >= 2, ErrorCode::InvalidParams, "NTT size must be a power of two");
  u64 p = q.value();
  require(p % (2 * n) == 1, ErrorCode::InvalidParams, "prime is not 1 mod 2N");
  int log_n = std::countr_zero(n);
  u64 psi = primitive_root_of_unity(2 * n, q);
  u64 psi_inv = q.inv(psi);

  psi_rev_.resize(n);
  psi_inv_rev_.resize(n);
  u64 pw = 1;
  u64 pw_inv = 1;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = bit_reverse(i, log_n);
    psi_rev_[r] = ShoupConst::make(pw, p);
    psi_inv_rev_[r] = ShoupConst::make(pw_inv, p);
    pw = q.mul(pw, psi);
    pw_inv = q.mul(pw_inv, psi_inv);
  }
  n_inv_ = ShoupConst::make(q.inv(n % p), p);
}

// Butterflies keep values lazily reduced (forward in [0, 4q), inverse in
// [0, 2q)); q < 2^62 keeps every intermediate inside a u64.
void NttTables::forward(std::span<u64> a) const {
  const u64 p = q_.value();
  const u64 two_p = 2 * p;
  std::size_t t = n_;
  for (std::size_t m = 1; m < n_; m <<= 1) {
    t >>= 1;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j1 = 2 * i * t;
      const ShoupConst w = psi_rev_[m + i];
      u64* x = a.data() + j1;
      u64* y = x + t;
      for (std::size_t j = 0; j < t; ++j) {
        u64 u = x[j];
        u -= (u >= two_p) ? two_p : 0;
        u64 v = mul_shoup_lazy(y[j], w, p);
        x[j] = u + v;
        y[j] = u - v + two_p;
      }
    }
  }
  for (auto& v : a) {
    v -= (v >= two_p) ? two_p : 0;
    v -= (v >= p) ? p : 0;
  }
}

void NttTables::inverse(std::span<u64> a) const {
  const u64 p = q_.value();
  const u64 two_p = 2 * p;
  std::size_t t = 1;
  for (std::size_t m = n_; m > 1; m >>= 1) {
    std::size_t j1 = 0;
    const std::size_t h = m >> 1;
    for (std::size_t i = 0; i < h; ++i) {
      const ShoupConst w = psi_inv_rev_[h + i];
      u64* x = a.data() + j1;
      u64* y = x + t;
      for (std::size_t j = 0; j < t; ++j) {
        u64 u = x[j];
        u64 v = y[j];
        u64 s = u + v;
        s -= (s >= two_p) ? two_p : 0;
        x[j] = s;
        y[j] = mul_shoup_lazy(u - v + two_p, w, p);
      }
      j1 += 2 * t;
    }
    t <<= 1;
  }
  for (auto& v : a) v = mul_shoup(v, n_inv_, p);
}

}  // namespace medclaim::he
