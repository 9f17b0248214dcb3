#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "medclaim/error.hpp"

namespace medclaim {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// Little-endian writer for the binary artifact formats.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) { put_le(v); }
  void u32(std::uint32_t v) { put_le(v); }
  void u64(std::uint64_t v) { put_le(v); }
  void i64(std::int64_t v) { put_le(static_cast<std::uint64_t>(v)); }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    put_le(bits);
  }
  void raw(ByteView data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
  void magic(std::string_view m) { raw(as_bytes(m)); }
  // u32 length prefix followed by the bytes
  void blob(ByteView data) {
    u32(static_cast<std::uint32_t>(data.size()));
    raw(data);
  }
  void str(std::string_view s) { blob(as_bytes(s)); }
  void u64_array(std::span<const std::uint64_t> values) {
    u32(static_cast<std::uint32_t>(values.size()));
    for (auto v : values) u64(v);
  }

  const Bytes& bytes() const& { return buf_; }
  Bytes bytes() && { return std::move(buf_); }

 private:
  template <typename T>
  void put_le(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  Bytes buf_;
};

// Bounds-checked reader; any overrun raises Malformed.
class ByteReader {
 public:
  explicit ByteReader(ByteView data) : data_(data) {}

  std::uint8_t u8() { return get_le<std::uint8_t>(); }
  std::uint16_t u16() { return get_le<std::uint16_t>(); }
  std::uint32_t u32() { return get_le<std::uint32_t>(); }
  std::uint64_t u64() { return get_le<std::uint64_t>(); }
  std::int64_t i64() { return static_cast<std::int64_t>(get_le<std::uint64_t>()); }
  double f64() {
    auto bits = get_le<std::uint64_t>();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  ByteView raw(std::size_t n) {
    need(n);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  Bytes blob() {
    auto n = u32();
    auto v = raw(n);
    return {v.begin(), v.end()};
  }
  std::string str() {
    auto n = u32();
    auto v = raw(n);
    return {reinterpret_cast<const char*>(v.data()), v.size()};
  }
  std::vector<std::uint64_t> u64_array(std::size_t max_count) {
    auto n = u32();
    if (n > max_count) fail(ErrorCode::Malformed, "array length " + std::to_string(n) + " exceeds limit");
    need(static_cast<std::size_t>(n) * 8);
    std::vector<std::uint64_t> out(n);
    for (auto& v : out) v = u64();
    return out;
  }
  bool expect_magic(std::string_view m) {
    if (remaining() < m.size()) return false;
    auto v = raw(m.size());
    return std::memcmp(v.data(), m.data(), m.size()) == 0;
  }

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (n > remaining()) fail(ErrorCode::Malformed, "unexpected end of input");
  }
  template <typename T>
  T get_le() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(data_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }

  ByteView data_;
  std::size_t pos_ = 0;
};

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, ByteView data);
// Writes to a sibling temp file then renames, so readers never see a partial artifact.
void write_file_atomic(const std::filesystem::path& path, ByteView data);

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);
bool is_hex64(std::string_view s);

}  // namespace medclaim
