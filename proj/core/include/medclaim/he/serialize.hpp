#pragma once

#include <filesystem>

#include "medclaim/he/keys.hpp"

namespace medclaim::he {

// Binary format: "HEC1" magic, u16 version, u8 object kind, then the body.
// All integers little-endian; every RNS limb is a u32-length-prefixed u64 array.
inline constexpr std::uint16_t kFormatVersion = 1;

enum class ObjectKind : std::uint8_t {
  Params = 1,
  Plaintext = 2,
  Ciphertext = 3,
  PublicContext = 4,
  PrivateContext = 5,
};

Bytes serialize(const HeParams& params);
Bytes serialize(const Plaintext& pt);
Bytes serialize(const Ciphertext& ct);
Bytes serialize(const PublicContext& pc);
Bytes serialize(const KeyBundle& bundle);

HeParams deserialize_params(ByteView data);
Plaintext deserialize_plaintext(ByteView data, const HeContext& ctx);
Ciphertext deserialize_ciphertext(ByteView data, const HeContext& ctx);
/// Accepts either context file; a private context is read without its secret.
PublicContext deserialize_public_context(ByteView data);
KeyBundle deserialize_key_bundle(ByteView data);

/// Object kind of a serialized artifact, or Malformed/BadMagic.
ObjectKind peek_kind(ByteView data);

void save_private_context(const std::filesystem::path& path, const KeyBundle& bundle);
void save_public_context(const std::filesystem::path& path, const PublicContext& pc);
KeyBundle load_private_context(const std::filesystem::path& path);
PublicContext load_public_context(const std::filesystem::path& path);

}  // namespace medclaim::he
