#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>

#include "medclaim/bytes.hpp"

namespace medclaim {

/// Cryptographic pseudorandom stream (AES-256-CTR keystream).
///
/// Unseeded instances draw their key from the OS entropy source. A seeded
/// instance derives its key from the seed, so every draw is reproducible;
/// seeding exists for tests and golden artifacts only.
class Prng {
 public:
  explicit Prng(std::optional<std::uint64_t> seed = std::nullopt);
  ~Prng();
  Prng(Prng&&) noexcept;
  Prng& operator=(Prng&&) noexcept;
  Prng(const Prng&) = delete;
  Prng& operator=(const Prng&) = delete;

  void fill(std::span<std::uint8_t> out);
  Bytes bytes(std::size_t n);
  std::uint64_t next_u64();
  /// Uniform in [0, bound), rejection sampled.
  std::uint64_t uniform(std::uint64_t bound);
  /// Uniform in [0, 1).
  double uniform_real();
  /// Standard normal via Box-Muller.
  double normal();
  /// Uniform over {-1, 0, 1}.
  int ternary();
  /// Centered binomial with parameter eta: variance eta / 2.
  int centered_binomial(int eta);

  /// Independent child stream; deterministic when this stream is seeded.
  Prng fork();

 private:
  struct Impl;
  explicit Prng(const std::array<std::uint8_t, 32>& key);
  void refill();

  std::unique_ptr<Impl> impl_;
};

}  // namespace medclaim
