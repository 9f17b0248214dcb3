#include <gtest/gtest.h>

#include <bit>
#include <filesystem>
#include <functional>

#include "medclaim/envelope/envelope.hpp"
#include "medclaim/random.hpp"

using namespace medclaim;
using namespace medclaim::envelope;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::Io;
}

}  // namespace

TEST(Envelope, KeygenLengthAndFreshness) {
  auto a = sym_keygen();
  auto b = sym_keygen();
  EXPECT_EQ(a.bytes.size(), 32u);
  EXPECT_NE(a, b);
  EXPECT_EQ(sym_keygen(7), sym_keygen(7));
  EXPECT_NE(sym_keygen(7), sym_keygen(8));
}

TEST(Envelope, KeyFileRoundtripAndLengthCheck) {
  auto dir = std::filesystem::temp_directory_path() / "medclaim_env_key";
  std::filesystem::create_directories(dir);
  auto key = sym_keygen(3);
  save_key(dir / "aes.key", key);
  EXPECT_EQ(std::filesystem::file_size(dir / "aes.key"), 32u);
  EXPECT_EQ(load_key(dir / "aes.key"), key);
  Bytes short_key(31, 1);
  write_file(dir / "short.key", short_key);
  EXPECT_EQ(code_of([&] { load_key(dir / "short.key"); }), ErrorCode::Malformed);
  std::filesystem::remove_all(dir);
}

TEST(Envelope, RoundtripLargeAndEmpty) {
  auto key = sym_keygen(1);
  Prng prng(11);
  auto payload = prng.bytes(1 << 20);
  auto sealed = seal(payload, key).serialize();
  EXPECT_EQ(sealed.size(), payload.size() + kHeaderSize + kNonceSize + kTagSize);
  EXPECT_EQ(open(ByteView(sealed), key), payload);

  auto empty = seal({}, key);
  EXPECT_TRUE(empty.body.empty());
  EXPECT_TRUE(open(ByteView(empty.serialize()), key).empty());
}

TEST(Envelope, FreshNoncePerSeal) {
  auto key = sym_keygen(1);
  Bytes payload(64, 0xab);
  auto a = seal(payload, key);
  auto b = seal(payload, key);
  EXPECT_NE(a.nonce, b.nonce);
  EXPECT_NE(a.body, b.body);
}

TEST(Envelope, TagFlipAndWrongKeyFail) {
  auto key = sym_keygen(1);
  Bytes payload = {1, 2, 3, 4};
  auto env = seal(payload, key);
  auto bad = env;
  bad.tag[0] ^= 1;
  EXPECT_EQ(code_of([&] { open(bad, key); }), ErrorCode::AuthFailure);
  EXPECT_EQ(code_of([&] { open(env, sym_keygen(2)); }), ErrorCode::AuthFailure);
}

TEST(Envelope, HeaderErrors) {
  auto key = sym_keygen(1);
  auto bytes = seal(Bytes{9, 9}, key).serialize();
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_EQ(code_of([&] { open(ByteView(bad_magic), key); }), ErrorCode::BadMagic);
  auto bad_version = bytes;
  bad_version[4] = 2;
  EXPECT_EQ(code_of([&] { open(ByteView(bad_version), key); }), ErrorCode::WrongVersion);
}

TEST(Envelope, EverySingleByteFlipFails) {
  auto key = sym_keygen(5);
  Prng prng(5);
  for (std::size_t len : {0, 1, 17, 200}) {
    auto payload = prng.bytes(len);
    auto bytes = seal(payload, key).serialize();
    for (std::size_t i = 0; i < bytes.size(); ++i) {
      for (std::uint8_t delta : {0x01, 0x80, 0xff}) {
        auto mutated = bytes;
        mutated[i] ^= delta;
        auto code = code_of([&] { open(ByteView(mutated), key); });
        if (i < 4) {
          EXPECT_EQ(code, ErrorCode::BadMagic);
        } else if (i < kHeaderSize) {
          EXPECT_EQ(code, ErrorCode::WrongVersion);
        } else {
          EXPECT_EQ(code, ErrorCode::AuthFailure) << "offset " << i;
        }
      }
    }
  }
}

TEST(Envelope, TruncationNeverYieldsPlaintext) {
  auto key = sym_keygen(9);
  Bytes payload(48, 0x5a);
  auto bytes = seal(payload, key).serialize();
  for (std::size_t n = 0; n < bytes.size(); ++n) {
    ByteView prefix(bytes.data(), n);
    auto code = code_of([&] { open(prefix, key); });
    EXPECT_TRUE(code == ErrorCode::AuthFailure || code == ErrorCode::BadMagic) << "prefix " << n;
  }
  Bytes extended = bytes;
  extended.push_back(0);
  EXPECT_EQ(code_of([&] { open(ByteView(extended), key); }), ErrorCode::AuthFailure);
}

// Produced by an independent AES-GCM implementation with key 00..1f and nonce 64..6f.
TEST(Envelope, GoldenVersion1FileReopens) {
  std::filesystem::path data = MEDCLAIM_TEST_DATA_DIR;
  SymmetricKey key;
  for (std::size_t i = 0; i < key.bytes.size(); ++i) key.bytes[i] = static_cast<std::uint8_t>(i);
  auto env = read_file(data / "golden_v1.env");
  auto expected = read_file(data / "golden_v1.payload");
  auto parsed = EnvelopeFile::parse(env);
  EXPECT_EQ(parsed.version, 1);
  EXPECT_EQ(parsed.nonce[0], 100);
  EXPECT_EQ(open(ByteView(env), key), expected);
  EXPECT_EQ(parsed.serialize(), env);
}

TEST(ContentHash, ReferenceVectors) {
  EXPECT_EQ(content_hash({}), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(content_hash(as_bytes("abc")), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(content_hash(as_bytes("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")),
            "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST(ContentHash, DeterministicAndLowercase) {
  auto h = content_hash(as_bytes("claim"));
  EXPECT_EQ(h, content_hash(as_bytes("claim")));
  EXPECT_TRUE(is_hex64(h));
}

TEST(ContentHash, Avalanche) {
  Prng prng(2024);
  double total = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    auto payload = prng.bytes(64);
    auto a = sha256(payload);
    auto bit = prng.uniform(64 * 8);
    payload[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    auto b = sha256(payload);
    int diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i) diff += std::popcount(static_cast<unsigned>(a[i] ^ b[i]));
    total += diff;
  }
  EXPECT_GE(total / trials, 100.0);
}
