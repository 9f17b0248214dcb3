#include "medclaim/he/params.hpp"

#include <bit>
#include <cmath>
#include <set>

#include "medclaim/error.hpp"

namespace medclaim::he {

void HeParams::validate(std::size_t min_depth) const {
  require(std::has_single_bit(ring_dimension) && ring_dimension >= 2048, ErrorCode::InvalidParams,
          "ring dimension must be a power of two >= 2048, got " + std::to_string(ring_dimension));
  require(!chain.empty(), ErrorCode::InvalidParams, "modulus chain is empty");
  require(chain.size() >= min_depth + 1, ErrorCode::InvalidParams,
          "modulus chain has " + std::to_string(chain.size() - 1) + " rescaling primes, circuit needs " +
              std::to_string(min_depth));
  const u64 two_n = 2 * static_cast<u64>(ring_dimension);
  std::set<u64> seen;
  auto check_prime = [&](u64 p) {
    require(p < (u64{1} << 62), ErrorCode::InvalidParams, "prime exceeds 62 bits");
    require(p % two_n == 1, ErrorCode::InvalidParams, std::to_string(p) + " is not 1 mod 2N");
    require(is_prime(p), ErrorCode::InvalidParams, std::to_string(p) + " is not prime");
    require(seen.insert(p).second, ErrorCode::InvalidParams, "duplicate prime " + std::to_string(p));
  };
  for (u64 p : chain) check_prime(p);
  check_prime(special_prime);
  require(std::isfinite(scale) && scale > 1.0, ErrorCode::InvalidParams, "scale must be > 1");
  const double scale_bits = std::log2(scale);
  for (std::size_t i = 1; i < chain.size(); ++i) {
    require(scale_bits <= std::bit_width(chain[i]), ErrorCode::InvalidParams,
            "scale exceeds rescaling prime bit length");
  }
  require(scale_bits < std::bit_width(chain[0]), ErrorCode::InvalidParams, "scale must be below the base prime");
}

std::uint64_t HeParams::fingerprint() const {
  // FNV-1a over the canonical serialization
  ByteWriter w;
  serialize(w);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto b : w.bytes()) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void HeParams::serialize(ByteWriter& w) const {
  w.u64(ring_dimension);
  w.u64_array(chain);
  w.u64(special_prime);
  w.f64(scale);
}

HeParams HeParams::deserialize(ByteReader& r) {
  HeParams p;
  p.ring_dimension = r.u64();
  p.chain = r.u64_array(64);
  p.special_prime = r.u64();
  p.scale = r.f64();
  return p;
}

HeParams make_params(std::size_t ring_dimension, int base_bits, const std::vector<int>& level_bits,
                     int special_bits, int scale_bits) {
  require(std::has_single_bit(ring_dimension), ErrorCode::InvalidParams, "ring dimension must be a power of two");
  const u64 two_n = 2 * static_cast<u64>(ring_dimension);
  HeParams p;
  p.ring_dimension = ring_dimension;
  std::vector<u64> used;
  auto take = [&](int bits) {
    u64 prime = find_ntt_primes(bits, two_n, 1, used).front();
    used.push_back(prime);
    return prime;
  };
  p.chain.push_back(take(base_bits));
  for (int bits : level_bits) p.chain.push_back(take(bits));
  p.special_prime = take(special_bits);
  p.scale = std::ldexp(1.0, scale_bits);
  return p;
}

HeParams default_params() { return make_params(8192, 60, {40, 40, 40, 40}, 60, 40); }

}  // namespace medclaim::he
