#include "itrc/io/codec.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace itrc::io {

namespace {

template <typename U>
U to_little(U v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    U out = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      out = static_cast<U>((out << 8) | (v & 0xff));
      v >>= 8;
    }
    return out;
  }
}

template <typename F, typename U>
std::vector<std::uint8_t> pack(std::span<const double> values) {
  std::vector<std::uint8_t> out(values.size() * sizeof(U));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const U bits = to_little(std::bit_cast<U>(static_cast<F>(values[i])));
    std::memcpy(out.data() + i * sizeof(U), &bits, sizeof(U));
  }
  return out;
}

template <typename F, typename U>
std::vector<double> unpack(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % sizeof(U) != 0)
    throw std::invalid_argument("unpack: byte count " + std::to_string(bytes.size()) +
                                " is not a multiple of " + std::to_string(sizeof(U)));
  std::vector<double> out(bytes.size() / sizeof(U));
  for (std::size_t i = 0; i < out.size(); ++i) {
    U bits;
    std::memcpy(&bits, bytes.data() + i * sizeof(U), sizeof(U));
    out[i] = static_cast<double>(std::bit_cast<F>(to_little(bits)));
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw std::invalid_argument("base64: length is not a multiple of 4");
  std::vector<std::uint8_t> out(3 * (text.size() / 4));
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw std::invalid_argument("base64: malformed input");
  // EVP_DecodeBlock keeps the bytes standing in for '=' padding.
  std::size_t pad = 0;
  if (!text.empty() && text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

std::vector<std::uint8_t> pack_f32le(std::span<const double> values) {
  return pack<float, std::uint32_t>(values);
}
std::vector<double> unpack_f32le(std::span<const std::uint8_t> bytes) {
  return unpack<float, std::uint32_t>(bytes);
}
std::vector<std::uint8_t> pack_f64le(std::span<const double> values) {
  return pack<double, std::uint64_t>(values);
}
std::vector<double> unpack_f64le(std::span<const std::uint8_t> bytes) {
  return unpack<double, std::uint64_t>(bytes);
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

void write_text(const std::string& path, std::string_view text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace itrc::io
