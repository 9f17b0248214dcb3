#include "medclaim/he/evaluator.hpp"

#include <bit>
#include <cmath>
#include <numeric>

#include "medclaim/error.hpp"

namespace medclaim::he {

namespace {

std::vector<std::size_t> first_limbs(std::size_t count) {
  std::vector<std::size_t> v(count);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

bool scales_match(double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max(std::fabs(a), std::fabs(b)); }

Ciphertext encrypt(const HeContext& ctx, const Plaintext& pt, const PublicKey& pk, Prng& prng) {
  require(pk.params_id == ctx.fingerprint(), ErrorCode::KeyParamsMismatch, "public key from other parameters");
  require(pt.params_id == ctx.fingerprint(), ErrorCode::KeyParamsMismatch, "plaintext from other parameters");
  require(pt.level <= ctx.max_level() && pt.scale > 0, ErrorCode::InvalidArgument, "invalid plaintext level/scale");
  const std::size_t level = pt.level;
  const auto limbs = first_limbs(level + 1);

  auto u = RnsPoly::at_level(ctx, level, false, false);
  u.set_signed(sample_ternary(ctx.n(), prng), ctx);
  u.to_ntt(ctx);

  Ciphertext ct;
  ct.level = level;
  ct.scale = pt.scale;
  ct.params_id = ctx.fingerprint();

  ct.c0 = RnsPoly::at_level(ctx, level, false, false);
  ct.c0.set_signed(sample_error(ctx.n(), prng), ctx);
  ct.c0.to_ntt(ctx);
  ct.c0.fma_inplace(pk.b.select(limbs), u, ctx);
  ct.c0.add_inplace(pt.poly, ctx);

  ct.c1 = RnsPoly::at_level(ctx, level, false, false);
  ct.c1.set_signed(sample_error(ctx.n(), prng), ctx);
  ct.c1.to_ntt(ctx);
  ct.c1.fma_inplace(pk.a.select(limbs), u, ctx);
  return ct;
}

Plaintext decrypt(const HeContext& ctx, const Ciphertext& ct, const SecretKey& sk) {
  require(sk.params_id == ctx.fingerprint(), ErrorCode::KeyParamsMismatch, "secret key from other parameters");
  require(ct.params_id == ctx.fingerprint(), ErrorCode::KeyParamsMismatch, "ciphertext from other parameters");
  Plaintext pt;
  pt.poly = ct.c0;
  pt.poly.fma_inplace(ct.c1, sk.s.select(first_limbs(ct.level + 1)), ctx);
  pt.level = ct.level;
  pt.scale = ct.scale;
  pt.params_id = ct.params_id;
  return pt;
}

Evaluator::Evaluator(ContextPtr ctx) : ctx_(ctx), encoder_(std::move(ctx)) {}

void Evaluator::check(const Ciphertext& ct) const {
  require(ct.params_id == ctx_->fingerprint(), ErrorCode::KeyParamsMismatch, "ciphertext from other parameters");
}

Ciphertext Evaluator::add(const Ciphertext& a, const Ciphertext& b) const {
  check(a);
  check(b);
  require(a.level == b.level, ErrorCode::LevelMismatch,
          "levels " + std::to_string(a.level) + " and " + std::to_string(b.level));
  require(scales_match(a.scale, b.scale), ErrorCode::ScaleMismatch, "operand scales differ");
  Ciphertext out = a;
  out.c0.add_inplace(b.c0, *ctx_);
  out.c1.add_inplace(b.c1, *ctx_);
  return out;
}

Ciphertext Evaluator::sub(const Ciphertext& a, const Ciphertext& b) const {
  check(a);
  check(b);
  require(a.level == b.level, ErrorCode::LevelMismatch, "operand levels differ");
  require(scales_match(a.scale, b.scale), ErrorCode::ScaleMismatch, "operand scales differ");
  Ciphertext out = a;
  out.c0.sub_inplace(b.c0, *ctx_);
  out.c1.sub_inplace(b.c1, *ctx_);
  return out;
}

Ciphertext Evaluator::add_plain(const Ciphertext& ct, const Plaintext& pt) const {
  check(ct);
  require(pt.params_id == ctx_->fingerprint(), ErrorCode::KeyParamsMismatch, "plaintext from other parameters");
  require(pt.level >= ct.level, ErrorCode::LevelMismatch, "plaintext level below ciphertext level");
  require(scales_match(ct.scale, pt.scale), ErrorCode::ScaleMismatch, "plaintext scale differs");
  Ciphertext out = ct;
  auto m = pt.poly;
  m.truncate(ct.level + 1);
  out.c0.add_inplace(m, *ctx_);
  return out;
}

void Evaluator::rescale_poly(RnsPoly& poly, std::size_t level) const {
  const std::size_t n = ctx_->n();
  std::vector<u64> last(poly.limb(level).begin(), poly.limb(level).end());
  ctx_->ntt(level).inverse(last);
  const auto& q_last = ctx_->modulus(level);
  std::vector<u64> r(n);
  for (std::size_t j = 0; j < level; ++j) {
    const auto& q = ctx_->modulus(j);
    for (std::size_t k = 0; k < n; ++k) r[k] = q.from_signed(q_last.centered(last[k]));
    ctx_->ntt(j).forward(r);
    const u64 inv = ctx_->rescale_inv(level, j);
    auto c = poly.limb(j);
    for (std::size_t k = 0; k < n; ++k) c[k] = q.mul(q.sub(c[k], r[k]), inv);
  }
  poly.truncate(level);
}

Ciphertext Evaluator::rescale(const Ciphertext& ct) const {
  check(ct);
  require(ct.level > 0, ErrorCode::NoLevelsRemaining, "cannot rescale at level 0");
  Ciphertext out = ct;
  rescale_poly(out.c0, ct.level);
  rescale_poly(out.c1, ct.level);
  out.scale = ct.scale / static_cast<double>(ctx_->params().chain[ct.level]);
  out.level = ct.level - 1;
  return out;
}

Ciphertext Evaluator::drop_to_level(const Ciphertext& ct, std::size_t level) const {
  check(ct);
  require(level <= ct.level, ErrorCode::LevelMismatch, "cannot raise a ciphertext level");
  Ciphertext out = ct;
  out.c0.truncate(level + 1);
  out.c1.truncate(level + 1);
  out.level = level;
  return out;
}

std::pair<RnsPoly, RnsPoly> Evaluator::key_switch(const RnsPoly& d, const KeySwitchKey& key) const {
  const auto& ctx = *ctx_;
  const std::size_t n = ctx.n();
  const std::size_t level = d.limb_count() - 1;
  const std::size_t special = ctx.special_index();
  require(key.b.size() == ctx.max_level() + 1 && key.a.size() == key.b.size(), ErrorCode::Malformed,
          "key-switching key has wrong digit count");

  auto d_coeff = d;
  d_coeff.from_ntt(ctx);

  auto acc0 = RnsPoly::at_level(ctx, level, true, true);
  auto acc1 = RnsPoly::at_level(ctx, level, true, true);
  std::vector<u64> digit(n);
  for (std::size_t i = 0; i <= level; ++i) {
    auto src = d_coeff.limb(i);
    // target limb k of the accumulators lives under modulus index mod_idx
    for (std::size_t k = 0; k <= level + 1; ++k) {
      const std::size_t mod_idx = k <= level ? k : special;
      const std::size_t key_limb = k <= level ? k : ctx.max_level() + 1;
      const auto& q = ctx.modulus(mod_idx);
      if (mod_idx == i) {
        auto nt = d.limb(i);
        std::copy(nt.begin(), nt.end(), digit.begin());
      } else {
        for (std::size_t t = 0; t < n; ++t) digit[t] = q.reduce(src[t]);
        ctx.ntt(mod_idx).forward(digit);
      }
      auto kb = key.b[i].limb(key_limb);
      auto ka = key.a[i].limb(key_limb);
      auto a0 = acc0.limb(k);
      auto a1 = acc1.limb(k);
      for (std::size_t t = 0; t < n; ++t) {
        a0[t] = q.add(a0[t], q.mul(digit[t], kb[t]));
        a1[t] = q.add(a1[t], q.mul(digit[t], ka[t]));
      }
    }
  }

  // Divide by P with rounding.
  const auto& p = ctx.modulus(special);
  std::vector<u64> r(n);
  for (RnsPoly* acc : {&acc0, &acc1}) {
    std::vector<u64> last(acc->limb(level + 1).begin(), acc->limb(level + 1).end());
    ctx.ntt(special).inverse(last);
    for (std::size_t j = 0; j <= level; ++j) {
      const auto& q = ctx.modulus(j);
      for (std::size_t t = 0; t < n; ++t) r[t] = q.from_signed(p.centered(last[t]));
      ctx.ntt(j).forward(r);
      const u64 inv = ctx.special_inv(j);
      auto c = acc->limb(j);
      for (std::size_t t = 0; t < n; ++t) c[t] = q.mul(q.sub(c[t], r[t]), inv);
    }
    acc->truncate(level + 1);
  }
  return {std::move(acc0), std::move(acc1)};
}

Ciphertext Evaluator::mul(const Ciphertext& a, const Ciphertext& b, const RelinKey& rk) const {
  check(a);
  check(b);
  require(a.level == b.level, ErrorCode::LevelMismatch,
          "levels " + std::to_string(a.level) + " and " + std::to_string(b.level));
  require(a.level > 0, ErrorCode::NoLevelsRemaining, "multiplication needs a level to rescale into");
  require(scales_match(a.scale, b.scale), ErrorCode::ScaleMismatch, "operand scales differ");
  const auto& ctx = *ctx_;

  auto d0 = a.c0;
  d0.mul_inplace(b.c0, ctx);
  auto d1 = a.c0;
  d1.mul_inplace(b.c1, ctx);
  d1.fma_inplace(a.c1, b.c0, ctx);
  auto d2 = a.c1;
  d2.mul_inplace(b.c1, ctx);

  auto [k0, k1] = key_switch(d2, rk.key);
  d0.add_inplace(k0, ctx);
  d1.add_inplace(k1, ctx);

  Ciphertext out{std::move(d0), std::move(d1), a.level, a.scale * b.scale, a.params_id};
  return rescale(out);
}

Ciphertext Evaluator::mul_plain(const Ciphertext& ct, const Plaintext& pt) const {
  check(ct);
  require(pt.params_id == ctx_->fingerprint(), ErrorCode::KeyParamsMismatch, "plaintext from other parameters");
  require(ct.level > 0, ErrorCode::NoLevelsRemaining, "multiplication needs a level to rescale into");
  require(pt.level >= ct.level, ErrorCode::LevelMismatch, "plaintext level below ciphertext level");
  auto m = pt.poly;
  m.truncate(ct.level + 1);
  Ciphertext out = ct;
  out.c0.mul_inplace(m, *ctx_);
  out.c1.mul_inplace(m, *ctx_);
  out.scale = ct.scale * pt.scale;
  return rescale(out);
}

Ciphertext Evaluator::match_scale(const Ciphertext& ct, double target_scale) const {
  check(ct);
  require(ct.level > 0, ErrorCode::NoLevelsRemaining, "scale alignment consumes a level");
  const double q = static_cast<double>(ctx_->params().chain[ct.level]);
  auto one = encoder_.encode_constant(1.0, ct.level, target_scale * q / ct.scale);
  auto out = mul_plain(ct, one);
  out.scale = target_scale;
  return out;
}

Ciphertext Evaluator::rotate_once(const Ciphertext& ct, std::uint64_t galois_elt, const KeySwitchKey& key) const {
  const auto& ctx = *ctx_;
  auto r0 = apply_automorphism(ct.c0, galois_elt, ctx);
  auto r1 = apply_automorphism(ct.c1, galois_elt, ctx);
  auto [k0, k1] = key_switch(r1, key);
  r0.add_inplace(k0, ctx);
  return {std::move(r0), std::move(k1), ct.level, ct.scale, ct.params_id};
}

Ciphertext Evaluator::rotate(const Ciphertext& ct, long steps, const GaloisKeys& gk) const {
  check(ct);
  const long slots = static_cast<long>(ctx_->slot_count());
  auto k = static_cast<std::size_t>(((steps % slots) + slots) % slots);
  Ciphertext out = ct;
  for (std::size_t bit = 1; k != 0; bit <<= 1) {
    if (k & bit) {
      const auto g = ctx_->galois_element(bit);
      auto it = gk.keys.find(g);
      require(it != gk.keys.end(), ErrorCode::MissingRotationKey,
              "no rotation key for step " + std::to_string(bit));
      out = rotate_once(out, g, it->second);
      k &= ~bit;
    }
  }
  return out;
}

Ciphertext Evaluator::sum_slots(Ciphertext acc, std::size_t n_features, const GaloisKeys& gk) const {
  const std::size_t span = std::bit_ceil(n_features);
  for (std::size_t step = 1; step < span; step <<= 1) acc = add(acc, rotate(acc, static_cast<long>(step), gk));
  return acc;
}

Ciphertext Evaluator::inner_product(const Ciphertext& x, const Ciphertext& w, std::size_t n_features,
                                    const RelinKey& rk, const GaloisKeys& gk) const {
  require(n_features >= 1 && n_features <= ctx_->slot_count(), ErrorCode::InvalidArgument,
          "feature count out of range");
  return sum_slots(mul(x, w, rk), n_features, gk);
}

Ciphertext Evaluator::inner_product_plain(const Ciphertext& x, const Plaintext& w, std::size_t n_features,
                                          const GaloisKeys& gk) const {
  require(n_features >= 1 && n_features <= ctx_->slot_count(), ErrorCode::InvalidArgument,
          "feature count out of range");
  return sum_slots(mul_plain(x, w), n_features, gk);
}

Ciphertext Evaluator::eval_poly_odd(const Ciphertext& z, const OddCubic& poly, const RelinKey& rk) const {
  check(z);
  require(z.level >= 2, ErrorCode::NoLevelsRemaining,
          "cubic evaluation needs 2 levels, ciphertext has " + std::to_string(z.level));
  const std::size_t level = z.level;
  const double q_next = static_cast<double>(ctx_->params().chain[level - 1]);

  auto z2 = mul(z, z, rk);
  auto c3z = mul_plain(z, encoder_.encode_constant(poly.c3, level, z.scale));
  auto cubic = mul(z2, c3z, rk);

  // c1*z is computed one level lower so it lands on the cubic term's level and scale.
  const double lin_scale = cubic.scale * q_next / z.scale;
  auto linear = mul_plain(drop_to_level(z, level - 1), encoder_.encode_constant(poly.c1, level - 1, lin_scale));
  auto out = add(cubic, linear);
  return add_plain(out, encoder_.encode_constant(poly.c0, out.level, out.scale));
}

}  // namespace medclaim::he
