#include "medclaim/model/encrypted.hpp"

#include "medclaim/he/serialize.hpp"

namespace medclaim::model {

namespace {

constexpr std::string_view kMagic = "HEM1";
constexpr std::uint16_t kVersion = 1;

void check_params(std::uint64_t a, std::uint64_t b, const char* what) {
  require(a == b, ErrorCode::KeyParamsMismatch, std::string(what) + " built for different parameters");
}

}  // namespace

std::string_view to_string(WeightMode m) { return m == WeightMode::CtCt ? "ct-ct" : "ct-pt"; }

WeightMode weight_mode_from_string(std::string_view s) {
  if (s == "ct-ct") return WeightMode::CtCt;
  if (s == "ct-pt") return WeightMode::CtPt;
  fail(ErrorCode::InvalidArgument, "weight mode must be ct-ct or ct-pt");
}

EncryptedModel encrypt_model(const ModelWeights& w, const he::Evaluator& ev, const he::PublicContext& pc,
                             WeightMode mode, Prng& prng) {
  const auto& ctx = ev.context();
  check_params(pc.params.fingerprint(), ctx.fingerprint(), "public context");
  check_params(pc.public_key.params_id, ctx.fingerprint(), "public key");
  const std::size_t top = ctx.max_level();
  require(top >= he::kClaimCircuitDepth, ErrorCode::NoLevelsRemaining, "parameters too shallow for the claim circuit");
  const double delta = ctx.params().scale;
  // Scale after x (delta) times beta (delta) is rescaled by the top prime.
  const double ip_scale = delta * delta / static_cast<double>(ctx.params().chain[top]);

  EncryptedModel em;
  em.mode = mode;
  em.sigmoid = w.sigmoid;
  em.params_id = ctx.fingerprint();
  auto beta = ev.encoder().encode(w.beta, top, delta);
  auto icpt = ev.encoder().encode(std::vector<double>{w.intercept}, top - 1, ip_scale);
  if (mode == WeightMode::CtCt) {
    em.beta_ct = he::encrypt(ctx, beta, pc.public_key, prng);
    em.intercept_ct = he::encrypt(ctx, icpt, pc.public_key, prng);
  } else {
    em.beta_pt = std::move(beta);
    em.intercept_pt = std::move(icpt);
  }
  return em;
}

he::Ciphertext encrypt_features(const FeatureVector& x, const he::Evaluator& ev, const he::PublicKey& pk,
                                Prng& prng) {
  const auto& ctx = ev.context();
  auto pt = ev.encoder().encode(x, ctx.max_level(), ctx.params().scale);
  return he::encrypt(ctx, pt, pk, prng);
}

he::Ciphertext predict_encrypted(const he::Ciphertext& x, const EncryptedModel& em, const he::Evaluator& ev,
                                 const he::RelinKey& rk, const he::GaloisKeys& gk) {
  check_params(em.params_id, ev.context().fingerprint(), "encrypted model");
  check_params(x.params_id, em.params_id, "feature ciphertext");
  require(x.level >= he::kClaimCircuitDepth, ErrorCode::NoLevelsRemaining,
          "claim circuit needs 3 levels, ciphertext has " + std::to_string(x.level));
  he::Ciphertext z;
  if (em.mode == WeightMode::CtCt) {
    z = ev.inner_product(x, ev.drop_to_level(*em.beta_ct, x.level), kFeatureCount, rk, gk);
    z = ev.add(z, ev.drop_to_level(*em.intercept_ct, z.level));
  } else {
    require(em.beta_pt->level == x.level, ErrorCode::LevelMismatch, "features must be encrypted at the top level");
    z = ev.inner_product_plain(x, *em.beta_pt, kFeatureCount, gk);
    z = ev.add_plain(z, *em.intercept_pt);
  }
  return ev.eval_poly_odd(z, em.sigmoid.poly, rk);
}

double decrypt_slot0(const he::Ciphertext& ct, const he::Evaluator& ev, const he::SecretKey& sk) {
  return ev.encoder().decode(he::decrypt(ev.context(), ct, sk)).at(0);
}

Bytes serialize(const EncryptedModel& em) {
  ByteWriter w;
  w.magic(kMagic);
  w.u16(kVersion);
  w.u8(static_cast<std::uint8_t>(em.mode));
  w.u64(em.params_id);
  w.f64(em.sigmoid.poly.c0);
  w.f64(em.sigmoid.poly.c1);
  w.f64(em.sigmoid.poly.c3);
  w.f64(em.sigmoid.bound);
  w.f64(em.sigmoid.max_err);
  if (em.mode == WeightMode::CtCt) {
    w.blob(he::serialize(*em.beta_ct));
    w.blob(he::serialize(*em.intercept_ct));
  } else {
    w.blob(he::serialize(*em.beta_pt));
    w.blob(he::serialize(*em.intercept_pt));
  }
  return std::move(w).bytes();
}

EncryptedModel deserialize_encrypted_model(ByteView data, const he::HeContext& ctx) {
  ByteReader r(data);
  if (!r.expect_magic(kMagic)) fail(ErrorCode::BadMagic, "not an encrypted model file");
  if (r.u16() != kVersion) fail(ErrorCode::WrongVersion, "unsupported encrypted model version");
  EncryptedModel em;
  auto mode = r.u8();
  if (mode != 1 && mode != 2) fail(ErrorCode::Malformed, "unknown weight mode");
  em.mode = static_cast<WeightMode>(mode);
  em.params_id = r.u64();
  check_params(em.params_id, ctx.fingerprint(), "encrypted model");
  em.sigmoid.poly.c0 = r.f64();
  em.sigmoid.poly.c1 = r.f64();
  em.sigmoid.poly.c3 = r.f64();
  em.sigmoid.bound = r.f64();
  em.sigmoid.max_err = r.f64();
  auto beta = r.blob();
  auto icpt = r.blob();
  if (!r.done()) fail(ErrorCode::Malformed, "trailing bytes after encrypted model");
  if (em.mode == WeightMode::CtCt) {
    em.beta_ct = he::deserialize_ciphertext(beta, ctx);
    em.intercept_ct = he::deserialize_ciphertext(icpt, ctx);
  } else {
    em.beta_pt = he::deserialize_plaintext(beta, ctx);
    em.intercept_pt = he::deserialize_plaintext(icpt, ctx);
  }
  return em;
}

}  // namespace medclaim::model
