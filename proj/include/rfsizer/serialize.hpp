#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "rfsizer/errors.hpp"

namespace rfsizer::io {

// Raw little-endian primitives for the model container. Reads throw
// CorruptionError on short streams so truncated files fail loudly.

inline void write_bytes(std::ostream& out, const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

inline void read_bytes(std::istream& in, void* p, std::size_t n) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw CorruptionError("unexpected end of file");
}

template <typename T>
void write_pod(std::ostream& out, T v) {
    write_bytes(out, &v, sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v;
    read_bytes(in, &v, sizeof(T));
    return v;
}

inline void write_string(std::ostream& out, const std::string& s) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    write_bytes(out, s.data(), s.size());
}

inline std::string read_string(std::istream& in) {
    auto n = read_pod<std::uint32_t>(in);
    if (n > (1u << 20)) throw CorruptionError("implausible string length");
    std::string s(n, '\0');
    read_bytes(in, s.data(), n);
    return s;
}

inline void write_vec(std::ostream& out, const std::vector<double>& v) {
    write_pod<std::uint64_t>(out, v.size());
    write_bytes(out, v.data(), v.size() * sizeof(double));
}

inline std::vector<double> read_vec(std::istream& in) {
    auto n = read_pod<std::uint64_t>(in);
    if (n > (1ull << 28)) throw CorruptionError("implausible vector length");
    std::vector<double> v(n);
    read_bytes(in, v.data(), n * sizeof(double));
    return v;
}

inline void write_ivec(std::ostream& out, const std::vector<std::int32_t>& v) {
    write_pod<std::uint64_t>(out, v.size());
    write_bytes(out, v.data(), v.size() * sizeof(std::int32_t));
}

inline std::vector<std::int32_t> read_ivec(std::istream& in) {
    auto n = read_pod<std::uint64_t>(in);
    if (n > (1ull << 28)) throw CorruptionError("implausible vector length");
    std::vector<std::int32_t> v(n);
    read_bytes(in, v.data(), n * sizeof(std::int32_t));
    return v;
}

}  // namespace rfsizer::io
