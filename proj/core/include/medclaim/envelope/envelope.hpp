#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>

#include "medclaim/bytes.hpp"

namespace medclaim::envelope {

inline constexpr std::string_view kMagic = "ENV1";
inline constexpr std::uint16_t kVersion = 1;
inline constexpr std::size_t kKeySize = 32;
inline constexpr std::size_t kNonceSize = 12;
inline constexpr std::size_t kTagSize = 16;
inline constexpr std::size_t kHeaderSize = 4 + 2;

struct SymmetricKey {
  std::array<std::uint8_t, kKeySize> bytes{};
  bool operator==(const SymmetricKey&) const = default;
};

/// 32 random bytes; a seed makes the key reproducible (tests only).
SymmetricKey sym_keygen(std::optional<std::uint64_t> seed = std::nullopt);

/// Raw 32-byte key files (`aes.key`).
void save_key(const std::filesystem::path& path, const SymmetricKey& key);
SymmetricKey load_key(const std::filesystem::path& path);

/// Parsed envelope: "ENV1" | u16 version | nonce(12) | body | tag(16).
/// The magic and version are bound into the tag as associated data.
struct EnvelopeFile {
  std::uint16_t version = kVersion;
  std::array<std::uint8_t, kNonceSize> nonce{};
  Bytes body;
  std::array<std::uint8_t, kTagSize> tag{};

  Bytes serialize() const;
  /// Structural parse only; authentication happens in `open`.
  static EnvelopeFile parse(ByteView data);
};

/// AES-256-GCM with a fresh random nonce per call.
EnvelopeFile seal(ByteView payload, const SymmetricKey& key);
/// Returns the payload or throws AuthFailure / BadMagic / WrongVersion.
/// Never returns partial plaintext.
Bytes open(const EnvelopeFile& env, const SymmetricKey& key);
Bytes open(ByteView envelope_bytes, const SymmetricKey& key);

std::array<std::uint8_t, 32> sha256(ByteView data);
/// Lowercase hex SHA-256.
std::string content_hash(ByteView data);

}  // namespace medclaim::envelope
