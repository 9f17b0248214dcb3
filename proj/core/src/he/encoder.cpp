#include "medclaim/he/encoder.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "medclaim/error.hpp"

namespace medclaim::he {

namespace {

void bit_reverse_permute(std::vector<std::complex<double>>& v) {
  const std::size_t n = v.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(v[i], v[j]);
  }
}

// Residue of an integer-valued double, including magnitudes beyond int64.
u64 residue_of(double value, const Modulus& q) {
  if (std::fabs(value) < 0x1.0p62) return q.from_signed(static_cast<std::int64_t>(value));
  int exp = 0;
  double mant = std::frexp(value, &exp);
  auto m = static_cast<std::int64_t>(std::ldexp(mant, 53));
  return q.mul(q.from_signed(m), q.pow(2, static_cast<u64>(exp - 53)));
}

}  // namespace

CkksEncoder::CkksEncoder(ContextPtr ctx) : ctx_(std::move(ctx)), slots_(ctx_->slot_count()) {
  const std::size_t m = 2 * ctx_->n();
  ksi_pows_.resize(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
    ksi_pows_[j] = {std::cos(angle), std::sin(angle)};
  }
  rot_group_.resize(slots_);
  std::size_t g = 1;
  for (std::size_t j = 0; j < slots_; ++j) {
    rot_group_[j] = g;
    g = g * 5 % m;
  }
}

void CkksEncoder::embed(std::vector<std::complex<double>>& vals) const {
  const std::size_t size = vals.size();
  const std::size_t m = 2 * ctx_->n();
  bit_reverse_permute(vals);
  for (std::size_t len = 2; len <= size; len <<= 1) {
    const std::size_t lenh = len >> 1;
    const std::size_t lenq = len << 2;
    const std::size_t gap = m / lenq;
    for (std::size_t i = 0; i < size; i += len) {
      for (std::size_t j = 0; j < lenh; ++j) {
        std::size_t idx = (rot_group_[j] % lenq) * gap;
        auto u = vals[i + j];
        auto v = vals[i + j + lenh] * ksi_pows_[idx];
        vals[i + j] = u + v;
        vals[i + j + lenh] = u - v;
      }
    }
  }
}

void CkksEncoder::embed_inverse(std::vector<std::complex<double>>& vals) const {
  const std::size_t size = vals.size();
  const std::size_t m = 2 * ctx_->n();
  for (std::size_t len = size; len >= 2; len >>= 1) {
    const std::size_t lenh = len >> 1;
    const std::size_t lenq = len << 2;
    const std::size_t gap = m / lenq;
    for (std::size_t i = 0; i < size; i += len) {
      for (std::size_t j = 0; j < lenh; ++j) {
        std::size_t idx = (lenq - (rot_group_[j] % lenq)) * gap;
        auto u = vals[i + j] + vals[i + j + lenh];
        auto v = (vals[i + j] - vals[i + j + lenh]) * ksi_pows_[idx];
        vals[i + j] = u;
        vals[i + j + lenh] = v;
      }
    }
  }
  bit_reverse_permute(vals);
  for (auto& v : vals) v /= static_cast<double>(size);
}

Plaintext CkksEncoder::encode(std::span<const double> values, std::size_t level, double scale) const {
  require(values.size() <= slots_, ErrorCode::SlotOverflow,
          std::to_string(values.size()) + " values exceed " + std::to_string(slots_) + " slots");
  require(level <= ctx_->max_level(), ErrorCode::InvalidArgument, "level beyond modulus chain");
  require(std::isfinite(scale) && scale > 0, ErrorCode::InvalidArgument, "scale must be positive");
  std::vector<std::complex<double>> vals(slots_);
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(std::isfinite(values[i]), ErrorCode::NonFiniteInput, "slot " + std::to_string(i) + " is not finite");
    vals[i] = values[i];
  }
  embed_inverse(vals);

  const std::size_t n = ctx_->n();
  std::vector<double> coeffs(n);
  for (std::size_t i = 0; i < slots_; ++i) {
    coeffs[i] = std::round(vals[i].real() * scale);
    coeffs[i + slots_] = std::round(vals[i].imag() * scale);
  }

  Plaintext pt{RnsPoly::at_level(*ctx_, level, false, false), level, scale, ctx_->fingerprint()};
  for (std::size_t k = 0; k <= level; ++k) {
    const auto& q = ctx_->modulus(k);
    auto limb = pt.poly.limb(k);
    for (std::size_t i = 0; i < n; ++i) limb[i] = residue_of(coeffs[i], q);
  }
  pt.poly.to_ntt(*ctx_);
  return pt;
}

Plaintext CkksEncoder::encode_constant(double value, std::size_t level, double scale) const {
  std::vector<double> values(slots_, value);
  return encode(values, level, scale);
}

std::vector<double> CkksEncoder::decode(const Plaintext& pt) const {
  require(pt.params_id == ctx_->fingerprint(), ErrorCode::KeyParamsMismatch, "plaintext from other parameters");
  std::vector<u64> base(pt.poly.limb(0).begin(), pt.poly.limb(0).end());
  if (pt.poly.is_ntt()) ctx_->ntt(0).inverse(base);
  const auto& q0 = ctx_->modulus(0);
  std::vector<std::complex<double>> vals(slots_);
  for (std::size_t i = 0; i < slots_; ++i) {
    double re = static_cast<double>(q0.centered(base[i])) / pt.scale;
    double im = static_cast<double>(q0.centered(base[i + slots_])) / pt.scale;
    vals[i] = {re, im};
  }
  embed(vals);
  std::vector<double> out(slots_);
  for (std::size_t i = 0; i < slots_; ++i) out[i] = vals[i].real();
  return out;
}

}  // namespace medclaim::he
