#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "semsearch/common/errors.hpp"

namespace semsearch::io {

static_assert(std::endian::native == std::endian::little,
              "binary persistence assumes a little-endian host");

// Flat little-endian serialization used by every persisted model/index.

template <typename T>
    requires std::is_arithmetic_v<T>
void write(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

inline void write(std::ostream& out, std::string_view s) {
    write<std::uint64_t>(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
    requires std::is_arithmetic_v<T>
void write(std::ostream& out, const std::vector<T>& v) {
    write<std::uint64_t>(out, v.size());
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

inline void write(std::ostream& out, const std::vector<std::string>& v) {
    write<std::uint64_t>(out, v.size());
    for (const auto& s : v) write(out, std::string_view{s});
}

template <typename T>
    requires std::is_arithmetic_v<T>
T read(std::istream& in) {
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) throw format_error("unexpected end of binary stream");
    return value;
}

inline std::uint64_t read_size(std::istream& in, std::uint64_t limit = (1ull << 40)) {
    const auto n = read<std::uint64_t>(in);
    if (n > limit) throw format_error("implausible length field in binary stream");
    return n;
}

inline std::string read_string(std::istream& in) {
    std::string s(read_size(in), '\0');
    if (!s.empty() && !in.read(s.data(), static_cast<std::streamsize>(s.size())))
        throw format_error("unexpected end of binary stream");
    return s;
}

template <typename T>
    requires std::is_arithmetic_v<T>
std::vector<T> read_vector(std::istream& in) {
    std::vector<T> v(read_size(in));
    if (!v.empty() && !in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T))))
        throw format_error("unexpected end of binary stream");
    return v;
}

inline std::vector<std::string> read_strings(std::istream& in) {
    std::vector<std::string> v(read_size(in));
    for (auto& s : v) s = read_string(in);
    return v;
}

/// Writes a magic tag and version; read_header() validates both.
inline void write_header(std::ostream& out, std::string_view magic, std::uint32_t version) {
    out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
    write<std::uint32_t>(out, version);
}

inline std::uint32_t read_header(std::istream& in, std::string_view magic, std::uint32_t max_version) {
    std::string tag(magic.size(), '\0');
    if (!in.read(tag.data(), static_cast<std::streamsize>(tag.size())) || tag != magic)
        throw format_error("bad magic: expected " + std::string(magic));
    const auto version = read<std::uint32_t>(in);
    if (version == 0 || version > max_version)
        throw format_error("unsupported " + std::string(magic) + " version " + std::to_string(version));
    return version;
}

}  // namespace semsearch::io
