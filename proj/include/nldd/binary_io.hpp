#pragma once

// Little-endian binary encoding with a trailing CRC32, shared by the dataset
// and model file formats.

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "nldd/error.hpp"

namespace nldd::binary {

inline std::uint32_t crc32(const std::uint8_t* data, std::size_t n) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = ::crc32(crc, data, chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

class Writer {
 public:
  void bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }

  template <class T>
    requires std::is_integral_v<T>
  void integer(T v) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      buf_.push_back(static_cast<std::uint8_t>(u & 0xffu));
      if constexpr (sizeof(T) > 1) u = static_cast<U>(u >> 8);
    }
  }
  void u8(std::uint8_t v) { integer(v); }
  void u32(std::uint32_t v) { integer(v); }
  void u64(std::uint64_t v) { integer(v); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void string(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s);
  }
  void f64s(const std::vector<double>& v) {
    for (double x : v) f64(x);
  }

  /// Appends the CRC32 of everything written so far and writes the file.
  void finish(const std::filesystem::path& path) {
    const std::uint32_t crc = crc32(buf_.data(), buf_.size());
    u32(crc);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(buf_.data()), static_cast<std::streamsize>(buf_.size()));
    if (!out) throw IoError("write failed: " + path.string());
  }

  const std::vector<std::uint8_t>& buffer() const noexcept { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  /// Loads the whole file and checks the magic bytes.
  Reader(const std::filesystem::path& path, std::string_view magic) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    buf_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    if (buf_.size() < magic.size() ||
        std::memcmp(buf_.data(), magic.data(), magic.size()) != 0) {
      if (buf_.size() < magic.size()) throw TruncationError("file too short: " + path.string());
      throw FormatError("bad magic bytes (expected \"" + std::string(magic) + "\"): " + path.string());
    }
    path_ = path.string();
    if (buf_.size() < magic.size() + 4) throw TruncationError("file truncated: " + path_);
    pos_ = magic.size();
    end_ = buf_.size() - 4;
  }

  /// Checks that the body was fully consumed and that the trailing CRC32
  /// matches. Parse the body first: a short file then surfaces as a
  /// truncation error, a corrupted one as a checksum error.
  void finish() const {
    expect_end();
    std::uint32_t stored = 0;
    for (int i = 3; i >= 0; --i) stored = (stored << 8) | buf_[end_ + static_cast<std::size_t>(i)];
    if (crc32(buf_.data(), end_) != stored) throw ChecksumError("CRC32 mismatch: " + path_);
  }

  template <class T>
    requires std::is_integral_v<T>
  T integer() {
    need(sizeof(T));
    using U = std::make_unsigned_t<T>;
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u = static_cast<U>(u | (static_cast<U>(buf_[pos_ + i]) << (8 * i)));
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  std::uint8_t u8() { return integer<std::uint8_t>(); }
  std::uint32_t u32() { return integer<std::uint32_t>(); }
  std::uint64_t u64() { return integer<std::uint64_t>(); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string string() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::vector<double> f64s(std::size_t n) {
    need(n * 8);
    std::vector<double> v(n);
    for (auto& x : v) x = f64();
    return v;
  }

  /// Bytes still unread before the checksum.
  std::size_t remaining() const noexcept { return end_ - pos_; }
  void expect_end() const {
    if (pos_ != end_) throw FormatError("trailing bytes before checksum: " + path_);
  }
  const std::string& path() const noexcept { return path_; }

 private:
  void need(std::size_t n) const {
    if (n > end_ - pos_) throw TruncationError("file truncated: " + path_);
  }

  std::vector<std::uint8_t> buf_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
  std::string path_;
};

}  // namespace nldd::binary
