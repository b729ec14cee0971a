#pragma once

// Little-endian scalar I/O shared by the dataset and model formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace rdf::io {

template <class U>
inline void put_le(std::ostream& out, U v) {
    unsigned char b[sizeof(U)];
    for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), sizeof(U));
}

template <class U>
inline U get_le(std::istream& in) {
    unsigned char b[sizeof(U)];
    if (!in.read(reinterpret_cast<char*>(b), sizeof(U))) throw std::runtime_error("unexpected end of file");
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(b[i]) << (8 * i);
    return v;
}

inline void put_u32(std::ostream& out, std::uint32_t v) { put_le(out, v); }
inline void put_u64(std::ostream& out, std::uint64_t v) { put_le(out, v); }
inline void put_f32(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
inline std::uint32_t get_u32(std::istream& in) { return get_le<std::uint32_t>(in); }
inline std::uint64_t get_u64(std::istream& in) { return get_le<std::uint64_t>(in); }
inline double get_f32(std::istream& in) { return std::bit_cast<float>(get_le<std::uint32_t>(in)); }

inline void put_magic(std::ostream& out, const char (&magic)[5]) { out.write(magic, 4); }
inline void expect_magic(std::istream& in, const char (&magic)[5], const std::string& what) {
    char b[4];
    if (!in.read(b, 4) || std::memcmp(b, magic, 4) != 0) throw std::runtime_error(what + ": bad magic");
}

}  // namespace rdf::io
