#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace itrc::io {

std::string sha256_hex(std::span<const std::uint8_t> bytes);

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws std::invalid_argument on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

// Little-endian IEEE-754 packing, independent of host byte order.
std::vector<std::uint8_t> pack_f32le(std::span<const double> values);
std::vector<double> unpack_f32le(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> pack_f64le(std::span<const double> values);
std::vector<double> unpack_f64le(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);
void write_text(const std::string& path, std::string_view text);

}  // namespace itrc::io
