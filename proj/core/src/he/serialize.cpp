#include "medclaim/he/serialize.hpp"

#include "medclaim/error.hpp"

namespace medclaim::he {

namespace {

constexpr std::string_view kMagic = "HEC1";

void write_header(ByteWriter& w, ObjectKind kind) {
  w.magic(kMagic);
  w.u16(kFormatVersion);
  w.u8(static_cast<std::uint8_t>(kind));
}

ObjectKind read_header(ByteReader& r) {
  if (!r.expect_magic(kMagic)) fail(ErrorCode::BadMagic, "not an HEC1 artifact");
  auto version = r.u16();
  if (version != kFormatVersion) fail(ErrorCode::WrongVersion, "HEC1 version " + std::to_string(version));
  auto kind = r.u8();
  if (kind < 1 || kind > 5) fail(ErrorCode::Malformed, "unknown object kind");
  return static_cast<ObjectKind>(kind);
}

void expect_kind(ObjectKind got, ObjectKind want) {
  if (got != want) fail(ErrorCode::Malformed, "unexpected object kind");
}

void expect_end(const ByteReader& r) {
  if (!r.done()) fail(ErrorCode::Malformed, "trailing bytes after object");
}

void write_ksk(ByteWriter& w, const KeySwitchKey& key) {
  w.u32(static_cast<std::uint32_t>(key.b.size()));
  for (std::size_t i = 0; i < key.b.size(); ++i) {
    key.b[i].serialize(w);
    key.a[i].serialize(w);
  }
}

KeySwitchKey read_ksk(ByteReader& r, const HeContext& ctx) {
  KeySwitchKey key;
  auto digits = r.u32();
  if (digits != ctx.max_level() + 1) fail(ErrorCode::Malformed, "key-switching digit count mismatch");
  for (std::uint32_t i = 0; i < digits; ++i) {
    key.b.push_back(RnsPoly::deserialize(r, ctx));
    key.a.push_back(RnsPoly::deserialize(r, ctx));
  }
  return key;
}

void write_eval_keys(ByteWriter& w, const PublicKey& pk, const RelinKey& rk, const GaloisKeys& gk) {
  pk.b.serialize(w);
  pk.a.serialize(w);
  write_ksk(w, rk.key);
  w.u32(static_cast<std::uint32_t>(gk.keys.size()));
  for (const auto& [g, key] : gk.keys) {
    w.u64(g);
    write_ksk(w, key);
  }
}

void read_eval_keys(ByteReader& r, const HeContext& ctx, PublicKey& pk, RelinKey& rk, GaloisKeys& gk) {
  pk.b = RnsPoly::deserialize(r, ctx);
  pk.a = RnsPoly::deserialize(r, ctx);
  pk.params_id = ctx.fingerprint();
  rk.key = read_ksk(r, ctx);
  auto count = r.u32();
  if (count > 64) fail(ErrorCode::Malformed, "too many rotation keys");
  for (std::uint32_t i = 0; i < count; ++i) {
    auto g = r.u64();
    gk.keys.emplace(g, read_ksk(r, ctx));
  }
}

ContextPtr context_for(const HeParams& params) {
  // Files are validated structurally; circuit depth is checked where it matters.
  return HeContext::create(params, 0);
}

}  // namespace

ObjectKind peek_kind(ByteView data) {
  ByteReader r(data);
  return read_header(r);
}

Bytes serialize(const HeParams& params) {
  ByteWriter w;
  write_header(w, ObjectKind::Params);
  params.serialize(w);
  return std::move(w).bytes();
}

HeParams deserialize_params(ByteView data) {
  ByteReader r(data);
  expect_kind(read_header(r), ObjectKind::Params);
  auto params = HeParams::deserialize(r);
  expect_end(r);
  return params;
}

Bytes serialize(const Plaintext& pt) {
  ByteWriter w;
  write_header(w, ObjectKind::Plaintext);
  w.u64(pt.params_id);
  w.u32(static_cast<std::uint32_t>(pt.level));
  w.f64(pt.scale);
  pt.poly.serialize(w);
  return std::move(w).bytes();
}

Plaintext deserialize_plaintext(ByteView data, const HeContext& ctx) {
  ByteReader r(data);
  expect_kind(read_header(r), ObjectKind::Plaintext);
  Plaintext pt;
  pt.params_id = r.u64();
  if (pt.params_id != ctx.fingerprint()) fail(ErrorCode::KeyParamsMismatch, "plaintext from other parameters");
  pt.level = r.u32();
  pt.scale = r.f64();
  pt.poly = RnsPoly::deserialize(r, ctx);
  if (pt.level > ctx.max_level() || pt.poly.limb_count() != pt.level + 1 || !(pt.scale > 0)) {
    fail(ErrorCode::Malformed, "plaintext level/scale inconsistent");
  }
  expect_end(r);
  return pt;
}

Bytes serialize(const Ciphertext& ct) {
  ByteWriter w;
  write_header(w, ObjectKind::Ciphertext);
  w.u64(ct.params_id);
  w.u32(static_cast<std::uint32_t>(ct.level));
  w.f64(ct.scale);
  ct.c0.serialize(w);
  ct.c1.serialize(w);
  return std::move(w).bytes();
}

Ciphertext deserialize_ciphertext(ByteView data, const HeContext& ctx) {
  ByteReader r(data);
  expect_kind(read_header(r), ObjectKind::Ciphertext);
  Ciphertext ct;
  ct.params_id = r.u64();
  if (ct.params_id != ctx.fingerprint()) fail(ErrorCode::KeyParamsMismatch, "ciphertext from other parameters");
  ct.level = r.u32();
  ct.scale = r.f64();
  ct.c0 = RnsPoly::deserialize(r, ctx);
  ct.c1 = RnsPoly::deserialize(r, ctx);
  if (ct.level > ctx.max_level() || ct.c0.limb_count() != ct.level + 1 || ct.c1.limb_count() != ct.level + 1 ||
      !ct.c0.is_ntt() || !ct.c1.is_ntt() || !(ct.scale > 0)) {
    fail(ErrorCode::Malformed, "ciphertext level/scale inconsistent");
  }
  expect_end(r);
  return ct;
}

Bytes serialize(const PublicContext& pc) {
  ByteWriter w;
  write_header(w, ObjectKind::PublicContext);
  pc.params.serialize(w);
  write_eval_keys(w, pc.public_key, pc.relin_key, pc.galois_keys);
  return std::move(w).bytes();
}

Bytes serialize(const KeyBundle& bundle) {
  ByteWriter w;
  write_header(w, ObjectKind::PrivateContext);
  bundle.params.serialize(w);
  bundle.secret_key.s.serialize(w);
  write_eval_keys(w, bundle.public_key, bundle.relin_key, bundle.galois_keys);
  return std::move(w).bytes();
}

PublicContext deserialize_public_context(ByteView data) {
  ByteReader r(data);
  auto kind = read_header(r);
  if (kind != ObjectKind::PublicContext && kind != ObjectKind::PrivateContext) {
    fail(ErrorCode::Malformed, "not a context file");
  }
  PublicContext pc;
  pc.params = HeParams::deserialize(r);
  auto ctx = context_for(pc.params);
  if (kind == ObjectKind::PrivateContext) (void)RnsPoly::deserialize(r, *ctx);
  read_eval_keys(r, *ctx, pc.public_key, pc.relin_key, pc.galois_keys);
  expect_end(r);
  return pc;
}

KeyBundle deserialize_key_bundle(ByteView data) {
  ByteReader r(data);
  expect_kind(read_header(r), ObjectKind::PrivateContext);
  KeyBundle bundle;
  bundle.params = HeParams::deserialize(r);
  auto ctx = context_for(bundle.params);
  bundle.secret_key.s = RnsPoly::deserialize(r, *ctx);
  bundle.secret_key.params_id = ctx->fingerprint();
  read_eval_keys(r, *ctx, bundle.public_key, bundle.relin_key, bundle.galois_keys);
  expect_end(r);
  return bundle;
}

void save_private_context(const std::filesystem::path& path, const KeyBundle& bundle) {
  write_file_atomic(path, serialize(bundle));
}

void save_public_context(const std::filesystem::path& path, const PublicContext& pc) {
  write_file_atomic(path, serialize(pc));
}

KeyBundle load_private_context(const std::filesystem::path& path) { return deserialize_key_bundle(read_file(path)); }

PublicContext load_public_context(const std::filesystem::path& path) {
  return deserialize_public_context(read_file(path));
}

}  // namespace medclaim::he
