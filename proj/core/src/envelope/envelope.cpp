#include "medclaim/envelope/envelope.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <memory>

#include "medclaim/error.hpp"
#include "medclaim/random.hpp"

namespace medclaim::envelope {

namespace {

struct CtxDeleter {
  void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter>;

Bytes header_bytes(std::uint16_t version) {
  ByteWriter w;
  w.magic(kMagic);
  w.u16(version);
  return std::move(w).bytes();
}

CipherCtx new_ctx() {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) fail(ErrorCode::Io, "cipher context allocation failed");
  return ctx;
}

}  // namespace

SymmetricKey sym_keygen(std::optional<std::uint64_t> seed) {
  SymmetricKey key;
  if (seed) {
    Prng prng(*seed);
    prng.fill(key.bytes);
  } else if (RAND_bytes(key.bytes.data(), static_cast<int>(key.bytes.size())) != 1) {
    fail(ErrorCode::Io, "OS entropy unavailable");
  }
  return key;
}

void save_key(const std::filesystem::path& path, const SymmetricKey& key) { write_file_atomic(path, key.bytes); }

SymmetricKey load_key(const std::filesystem::path& path) {
  auto data = read_file(path);
  require(data.size() == kKeySize, ErrorCode::Malformed,
          "key file must hold exactly 32 bytes, found " + std::to_string(data.size()));
  SymmetricKey key;
  std::copy(data.begin(), data.end(), key.bytes.begin());
  return key;
}

Bytes EnvelopeFile::serialize() const {
  ByteWriter w;
  w.raw(header_bytes(version));
  w.raw(nonce);
  w.raw(body);
  w.raw(tag);
  return std::move(w).bytes();
}

EnvelopeFile EnvelopeFile::parse(ByteView data) {
  ByteReader r(data);
  if (!r.expect_magic(kMagic)) fail(ErrorCode::BadMagic, "not an ENV1 envelope");
  if (data.size() < kHeaderSize + kNonceSize + kTagSize) fail(ErrorCode::AuthFailure, "envelope truncated");
  EnvelopeFile env;
  env.version = r.u16();
  if (env.version != kVersion) fail(ErrorCode::WrongVersion, "envelope version " + std::to_string(env.version));
  auto nonce = r.raw(kNonceSize);
  std::copy(nonce.begin(), nonce.end(), env.nonce.begin());
  auto body = r.raw(r.remaining() - kTagSize);
  env.body.assign(body.begin(), body.end());
  auto tag = r.raw(kTagSize);
  std::copy(tag.begin(), tag.end(), env.tag.begin());
  return env;
}

EnvelopeFile seal(ByteView payload, const SymmetricKey& key) {
  EnvelopeFile env;
  if (RAND_bytes(env.nonce.data(), static_cast<int>(env.nonce.size())) != 1) {
    fail(ErrorCode::Io, "OS entropy unavailable");
  }
  auto aad = header_bytes(env.version);
  auto ctx = new_ctx();
  int len = 0;
  bool ok = EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(kNonceSize), nullptr) == 1 &&
            EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.bytes.data(), env.nonce.data()) == 1 &&
            EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) == 1;
  env.body.resize(payload.size());
  if (ok && !payload.empty()) {
    ok = EVP_EncryptUpdate(ctx.get(), env.body.data(), &len, payload.data(), static_cast<int>(payload.size())) == 1;
  }
  ok = ok && EVP_EncryptFinal_ex(ctx.get(), env.body.data() + env.body.size(), &len) == 1 &&
       EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, static_cast<int>(kTagSize), env.tag.data()) == 1;
  if (!ok) fail(ErrorCode::Io, "AES-GCM encryption failed");
  return env;
}

Bytes open(const EnvelopeFile& env, const SymmetricKey& key) {
  if (env.version != kVersion) fail(ErrorCode::WrongVersion, "envelope version " + std::to_string(env.version));
  auto aad = header_bytes(env.version);
  auto ctx = new_ctx();
  int len = 0;
  Bytes out(env.body.size());
  auto tag = env.tag;
  bool ok = EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, static_cast<int>(kNonceSize), nullptr) == 1 &&
            EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.bytes.data(), env.nonce.data()) == 1 &&
            EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) == 1;
  if (ok && !env.body.empty()) {
    ok = EVP_DecryptUpdate(ctx.get(), out.data(), &len, env.body.data(), static_cast<int>(env.body.size())) == 1;
  }
  ok = ok && EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, static_cast<int>(kTagSize), tag.data()) == 1 &&
       EVP_DecryptFinal_ex(ctx.get(), out.data() + out.size(), &len) == 1;
  if (!ok) {
    std::fill(out.begin(), out.end(), 0);
    fail(ErrorCode::AuthFailure, "envelope authentication failed");
  }
  return out;
}

Bytes open(ByteView envelope_bytes, const SymmetricKey& key) { return open(EnvelopeFile::parse(envelope_bytes), key); }

std::array<std::uint8_t, 32> sha256(ByteView data) {
  std::array<std::uint8_t, 32> digest{};
  SHA256(data.data(), data.size(), digest.data());
  return digest;
}

std::string content_hash(ByteView data) { return to_hex(sha256(data)); }

}  // namespace medclaim::envelope
