#include "medclaim/he/rns_poly.hpp"

#include <bit>

#include "medclaim/error.hpp"

namespace medclaim::he {

RnsPoly::RnsPoly(std::size_t n, std::vector<std::uint32_t> moduli, bool ntt_form)
    : n_(n), moduli_(std::move(moduli)), ntt_(ntt_form), data_(n_ * moduli_.size(), 0) {}

RnsPoly RnsPoly::at_level(const HeContext& ctx, std::size_t level, bool with_special, bool ntt_form) {
  std::vector<std::uint32_t> moduli;
  for (std::size_t j = 0; j <= level; ++j) moduli.push_back(static_cast<std::uint32_t>(j));
  if (with_special) moduli.push_back(static_cast<std::uint32_t>(ctx.special_index()));
  return RnsPoly(ctx.n(), std::move(moduli), ntt_form);
}

void RnsPoly::truncate(std::size_t count) {
  if (count >= moduli_.size()) return;
  moduli_.resize(count);
  data_.resize(count * n_);
}

RnsPoly RnsPoly::select(std::span<const std::size_t> positions) const {
  std::vector<std::uint32_t> moduli;
  for (auto k : positions) moduli.push_back(moduli_.at(k));
  RnsPoly out(n_, std::move(moduli), ntt_);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    auto src = limb(positions[i]);
    std::copy(src.begin(), src.end(), out.limb(i).begin());
  }
  return out;
}

void RnsPoly::to_ntt(const HeContext& ctx) {
  if (ntt_) return;
  for (std::size_t k = 0; k < limb_count(); ++k) ctx.ntt(moduli_[k]).forward(limb(k));
  ntt_ = true;
}

void RnsPoly::from_ntt(const HeContext& ctx) {
  if (!ntt_) return;
  for (std::size_t k = 0; k < limb_count(); ++k) ctx.ntt(moduli_[k]).inverse(limb(k));
  ntt_ = false;
}

void RnsPoly::check_compatible(const RnsPoly& o) const {
  if (n_ != o.n_ || moduli_ != o.moduli_ || ntt_ != o.ntt_) {
    fail(ErrorCode::LevelMismatch, "polynomial operands have different moduli or representation");
  }
}

void RnsPoly::add_inplace(const RnsPoly& o, const HeContext& ctx) {
  check_compatible(o);
  for (std::size_t k = 0; k < limb_count(); ++k) {
    const auto& q = ctx.modulus(moduli_[k]);
    auto a = limb(k);
    auto b = o.limb(k);
    for (std::size_t i = 0; i < n_; ++i) a[i] = q.add(a[i], b[i]);
  }
}

void RnsPoly::sub_inplace(const RnsPoly& o, const HeContext& ctx) {
  check_compatible(o);
  for (std::size_t k = 0; k < limb_count(); ++k) {
    const auto& q = ctx.modulus(moduli_[k]);
    auto a = limb(k);
    auto b = o.limb(k);
    for (std::size_t i = 0; i < n_; ++i) a[i] = q.sub(a[i], b[i]);
  }
}

void RnsPoly::negate_inplace(const HeContext& ctx) {
  for (std::size_t k = 0; k < limb_count(); ++k) {
    const auto& q = ctx.modulus(moduli_[k]);
    for (auto& x : limb(k)) x = q.neg(x);
  }
}

void RnsPoly::mul_inplace(const RnsPoly& o, const HeContext& ctx) {
  check_compatible(o);
  require(ntt_, ErrorCode::InvalidArgument, "pointwise product requires NTT form");
  for (std::size_t k = 0; k < limb_count(); ++k) {
    const auto& q = ctx.modulus(moduli_[k]);
    auto a = limb(k);
    auto b = o.limb(k);
    for (std::size_t i = 0; i < n_; ++i) a[i] = q.mul(a[i], b[i]);
  }
}

void RnsPoly::fma_inplace(const RnsPoly& a, const RnsPoly& b, const HeContext& ctx) {
  check_compatible(a);
  check_compatible(b);
  require(ntt_, ErrorCode::InvalidArgument, "pointwise product requires NTT form");
  for (std::size_t k = 0; k < limb_count(); ++k) {
    const auto& q = ctx.modulus(moduli_[k]);
    auto acc = limb(k);
    auto x = a.limb(k);
    auto y = b.limb(k);
    for (std::size_t i = 0; i < n_; ++i) acc[i] = q.add(acc[i], q.mul(x[i], y[i]));
  }
}

void RnsPoly::set_signed(std::span<const std::int64_t> coeffs, const HeContext& ctx) {
  require(coeffs.size() == n_, ErrorCode::InvalidArgument, "coefficient count mismatch");
  for (std::size_t k = 0; k < limb_count(); ++k) {
    const auto& q = ctx.modulus(moduli_[k]);
    auto a = limb(k);
    for (std::size_t i = 0; i < n_; ++i) a[i] = q.from_signed(coeffs[i]);
  }
  ntt_ = false;
}

void RnsPoly::sample_uniform(Prng& prng, const HeContext& ctx) {
  // Uniform residues are uniform in either representation.
  for (std::size_t k = 0; k < limb_count(); ++k) {
    const u64 q = ctx.modulus(moduli_[k]).value();
    for (auto& x : limb(k)) x = prng.uniform(q);
  }
}

void RnsPoly::serialize(ByteWriter& w) const {
  w.u8(ntt_ ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(n_));
  w.u32(static_cast<std::uint32_t>(moduli_.size()));
  for (std::size_t k = 0; k < limb_count(); ++k) {
    w.u32(moduli_[k]);
    w.u64_array(limb(k));
  }
}

RnsPoly RnsPoly::deserialize(ByteReader& r, const HeContext& ctx) {
  bool ntt = r.u8() != 0;
  std::size_t n = r.u32();
  std::size_t count = r.u32();
  if (n != ctx.n() || count > ctx.special_index() + 1) fail(ErrorCode::Malformed, "polynomial shape mismatch");
  std::vector<std::uint32_t> moduli(count);
  RnsPoly out(n, {}, ntt);
  out.data_.reserve(n * count);
  for (std::size_t k = 0; k < count; ++k) {
    moduli[k] = r.u32();
    if (moduli[k] > ctx.special_index()) fail(ErrorCode::Malformed, "limb modulus index out of range");
    auto values = r.u64_array(n);
    if (values.size() != n) fail(ErrorCode::Malformed, "limb length mismatch");
    const u64 q = ctx.modulus(moduli[k]).value();
    for (auto v : values) {
      if (v >= q) fail(ErrorCode::Malformed, "residue not reduced");
    }
    out.data_.insert(out.data_.end(), values.begin(), values.end());
  }
  out.moduli_ = std::move(moduli);
  return out;
}

std::vector<std::int64_t> sample_ternary(std::size_t n, Prng& prng) {
  std::vector<std::int64_t> out(n);
  for (auto& x : out) x = prng.ternary();
  return out;
}

std::vector<std::int64_t> sample_error(std::size_t n, Prng& prng) {
  std::vector<std::int64_t> out(n);
  for (auto& x : out) x = prng.centered_binomial(kErrorEta);
  return out;
}

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

RnsPoly apply_automorphism(const RnsPoly& in, std::uint64_t galois_elt, const HeContext& ctx) {
  const std::size_t n = in.n();
  const std::uint64_t mask = 2 * n - 1;
  RnsPoly out(n, in.moduli(), in.is_ntt());
  if (in.is_ntt()) {
    // NTT slot k holds the evaluation at psi^(2*bitrev(k)+1).
    const int log_n = std::countr_zero(n);
    std::vector<std::size_t> source(n);
    for (std::size_t k = 0; k < n; ++k) {
      std::uint64_t e = (2 * bit_reverse(k, log_n) + 1) * galois_elt & mask;
      source[k] = bit_reverse(static_cast<std::size_t>((e - 1) >> 1), log_n);
    }
    for (std::size_t l = 0; l < in.limb_count(); ++l) {
      auto src = in.limb(l);
      auto dst = out.limb(l);
      for (std::size_t k = 0; k < n; ++k) dst[k] = src[source[k]];
    }
    return out;
  }
  for (std::size_t l = 0; l < in.limb_count(); ++l) {
    const auto& q = ctx.modulus(in.moduli()[l]);
    auto src = in.limb(l);
    auto dst = out.limb(l);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t j = static_cast<std::uint64_t>(i) * galois_elt & mask;
      if (j < n) {
        dst[j] = src[i];
      } else {
        dst[j - n] = q.neg(src[i]);
      }
    }
  }
  return out;
}

}  // namespace medclaim::he
