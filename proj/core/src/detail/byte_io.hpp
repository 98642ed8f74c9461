// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_DETAIL_BYTE_IO_HPP
#define GRIDSCAN_DETAIL_BYTE_IO_HPP

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <type_traits>

namespace gridscan::detail {

template <class T>
T byteswap_value(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    std::reverse(bytes, bytes + sizeof(T));
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

/// Appends `value` to `out` in little-endian byte order.
template <class T>
void put_le(std::string& out, T value) {
    if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) value = byteswap_value(value);
    const auto* p = reinterpret_cast<const char*>(&value);
    out.append(p, sizeof(T));
}

/// Reads a little-endian `T` at `p` (no bounds check).
template <class T>
T get_le(const char* p) {
    T value;
    std::memcpy(&value, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) value = byteswap_value(value);
    return value;
}

/// Shortest round-trip decimal form.
template <class T>
void put_number(std::string& out, T value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    out.append(buf, ptr);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Parses a whole token as a number; leading '+' accepted. Returns false on garbage.
template <class T>
bool parse_number(std::string_view token, T& value) {
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    if (token.empty()) return false;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    return ec == std::errc{} && ptr == token.data() + token.size();
}

}  // namespace gridscan::detail

#endif  // GRIDSCAN_DETAIL_BYTE_IO_HPP
