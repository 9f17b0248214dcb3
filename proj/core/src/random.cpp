#include "medclaim/random.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>

namespace medclaim {

struct Prng::Impl {
  EVP_CIPHER_CTX* ctx = nullptr;
  std::array<std::uint8_t, 4096> buffer{};
  std::size_t pos = sizeof(buffer);

  ~Impl() { EVP_CIPHER_CTX_free(ctx); }
};

namespace {

std::array<std::uint8_t, 32> seed_key(std::uint64_t seed) {
  ByteWriter w;
  w.magic("medclaim-prng-v1");
  w.u64(seed);
  std::array<std::uint8_t, 32> key{};
  SHA256(w.bytes().data(), w.bytes().size(), key.data());
  return key;
}

std::array<std::uint8_t, 32> entropy_key() {
  std::array<std::uint8_t, 32> key{};
  if (RAND_bytes(key.data(), static_cast<int>(key.size())) != 1) fail(ErrorCode::Io, "OS entropy unavailable");
  return key;
}

}  // namespace

Prng::Prng(std::optional<std::uint64_t> seed) : Prng(seed ? seed_key(*seed) : entropy_key()) {}

Prng::Prng(const std::array<std::uint8_t, 32>& key) : impl_(std::make_unique<Impl>()) {
  impl_->ctx = EVP_CIPHER_CTX_new();
  std::array<std::uint8_t, 16> iv{};
  if (!impl_->ctx || EVP_EncryptInit_ex(impl_->ctx, EVP_aes_256_ctr(), nullptr, key.data(), iv.data()) != 1) {
    fail(ErrorCode::Io, "cannot initialise keystream");
  }
}

Prng::~Prng() = default;
Prng::Prng(Prng&&) noexcept = default;
Prng& Prng::operator=(Prng&&) noexcept = default;

void Prng::refill() {
  static const std::array<std::uint8_t, 4096> zeros{};
  int len = 0;
  EVP_EncryptUpdate(impl_->ctx, impl_->buffer.data(), &len, zeros.data(), static_cast<int>(zeros.size()));
  impl_->pos = 0;
}

void Prng::fill(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    if (impl_->pos == impl_->buffer.size()) refill();
    std::size_t n = std::min(out.size() - done, impl_->buffer.size() - impl_->pos);
    std::memcpy(out.data() + done, impl_->buffer.data() + impl_->pos, n);
    impl_->pos += n;
    done += n;
  }
}

Bytes Prng::bytes(std::size_t n) {
  Bytes out(n);
  fill(out);
  return out;
}

std::uint64_t Prng::next_u64() {
  std::uint8_t raw[8];
  fill(raw);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(raw[i]) << (8 * i);
  return v;
}

std::uint64_t Prng::uniform(std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t mask = ~std::uint64_t{0} >> std::countl_zero(bound - 1);
  for (;;) {
    std::uint64_t v = next_u64() & mask;
    if (v < bound) return v;
  }
}

double Prng::uniform_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Prng::normal() {
  double u1 = uniform_real();
  double u2 = uniform_real();
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int Prng::ternary() { return static_cast<int>(uniform(3)) - 1; }

int Prng::centered_binomial(int eta) {
  int sum = 0;
  int remaining = eta;
  while (remaining > 0) {
    int take = std::min(remaining, 32);
    std::uint64_t bits = next_u64();
    std::uint64_t mask = take == 32 ? 0xffffffffULL : ((1ULL << take) - 1);
    sum += std::popcount(bits & mask) - std::popcount((bits >> 32) & mask);
    remaining -= take;
  }
  return sum;
}

Prng Prng::fork() {
  std::array<std::uint8_t, 32> key{};
  fill(key);
  return Prng(key);
}

}  // namespace medclaim
