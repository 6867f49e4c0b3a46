#pragma once

// Internal helpers for deterministic text artifacts. Numbers are printed with
// %.17g so every double round-trips exactly; serializers emit keys in a fixed
// order so equal inputs give byte-equal files.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace noisybench::detail {

// Shortest-of-%.17g formatting: exact round-trip, no locale dependence.
std::string format_double(double v);

void append_json_escaped(std::string& out, std::string_view s);
std::string json_quote(std::string_view s);

std::string base64_encode(const void* data, std::size_t size);
std::vector<std::uint8_t> base64_decode(std::string_view text);

// Little-endian byte blob <-> doubles, for weight payloads.
std::string doubles_to_base64(const std::vector<double>& values);
std::vector<double> base64_to_doubles(std::string_view text);

}  // namespace noisybench::detail
