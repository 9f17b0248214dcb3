#include "medclaim/he/keys.hpp"

#include <numeric>

#include "medclaim/error.hpp"

namespace medclaim::he {

namespace {

RnsPoly error_poly(const HeContext& ctx, std::size_t level, bool with_special, Prng& prng) {
  auto e = RnsPoly::at_level(ctx, level, with_special, false);
  e.set_signed(sample_error(ctx.n(), prng), ctx);
  e.to_ntt(ctx);
  return e;
}

KeySwitchKey make_switch_key(const HeContext& ctx, const RnsPoly& s, const RnsPoly& s_from, Prng& prng) {
  const std::size_t top = ctx.max_level();
  KeySwitchKey key;
  for (std::size_t i = 0; i <= top; ++i) {
    auto a = RnsPoly::at_level(ctx, top, true, true);
    a.sample_uniform(prng, ctx);
    auto b = error_poly(ctx, top, true, prng);
    auto as = a;
    as.mul_inplace(s, ctx);
    b.sub_inplace(as, ctx);
    // The i-th CRT idempotent is 1 mod q_i and 0 elsewhere (including mod P).
    const auto& qi = ctx.modulus(i);
    const u64 p_mod = ctx.special_mod(i);
    auto bi = b.limb(i);
    auto si = s_from.limb(i);
    for (std::size_t k = 0; k < ctx.n(); ++k) bi[k] = qi.add(bi[k], qi.mul(p_mod, si[k]));
    key.b.push_back(std::move(b));
    key.a.push_back(std::move(a));
  }
  return key;
}

}  // namespace

KeyBundle keygen(const HeParams& params, std::optional<std::uint64_t> seed, std::size_t min_depth) {
  auto ctx = HeContext::create(params, min_depth);
  Prng prng(seed);
  const std::size_t top = ctx->max_level();
  const std::uint64_t id = ctx->fingerprint();

  KeyBundle bundle;
  bundle.params = params;

  auto s = RnsPoly::at_level(*ctx, top, true, false);
  s.set_signed(sample_ternary(ctx->n(), prng), *ctx);
  s.to_ntt(*ctx);
  bundle.secret_key = {s, id};

  std::vector<std::size_t> chain_limbs(top + 1);
  std::iota(chain_limbs.begin(), chain_limbs.end(), 0);
  auto s_chain = s.select(chain_limbs);
  auto a = RnsPoly::at_level(*ctx, top, false, true);
  a.sample_uniform(prng, *ctx);
  auto b = error_poly(*ctx, top, false, prng);
  auto as = a;
  as.mul_inplace(s_chain, *ctx);
  b.sub_inplace(as, *ctx);
  bundle.public_key = {std::move(b), std::move(a), id};

  auto s2 = s;
  s2.mul_inplace(s, *ctx);
  bundle.relin_key.key = make_switch_key(*ctx, s, s2, prng);

  auto s_coeff = s;
  s_coeff.from_ntt(*ctx);
  for (std::size_t step = 1; step < ctx->slot_count(); step <<= 1) {
    const u64 g = ctx->galois_element(step);
    auto rotated = apply_automorphism(s_coeff, g, *ctx);
    rotated.to_ntt(*ctx);
    bundle.galois_keys.keys.emplace(g, make_switch_key(*ctx, s, rotated, prng));
  }
  return bundle;
}

std::vector<int> secret_coefficients(const SecretKey& sk, const HeContext& ctx) {
  auto s = sk.s;
  s.from_ntt(ctx);
  const auto& q = ctx.modulus(s.moduli()[0]);
  std::vector<int> out;
  out.reserve(ctx.n());
  for (auto v : s.limb(0)) out.push_back(static_cast<int>(q.centered(v)));
  return out;
}

}  // namespace medclaim::he
