#pragma once

#include <zlib.h>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "txnn/errors.hpp"
#include "txnn/matrix.hpp"

namespace txnn {

// Readers/writers for the big-endian IDX container used by the MNIST family.
// Images: magic 0x00000803, dims (n, 28, 28), u8 pixels scaled to [0,1].
// Labels: magic 0x00000801, n u8 class indices.
// Gzip-compressed files are detected by their 1f 8b prefix and inflated
// transparently.

namespace detail {

inline std::vector<unsigned char> read_file_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                     std::istreambuf_iterator<char>());
    return bytes;
}

inline std::vector<unsigned char> gunzip(const std::vector<unsigned char>& in,
                                         const std::string& path) {
    z_stream zs{};
    if (inflateInit2(&zs, 15 + 16) != Z_OK)  // +16: gzip wrapper
        throw FormatError("zlib init failed for " + path);
    std::vector<unsigned char> out;
    out.resize(in.size() * 4 + 1024);
    zs.next_in = const_cast<unsigned char*>(in.data());
    zs.avail_in = static_cast<uInt>(in.size());
    std::size_t written = 0;
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        if (written == out.size()) out.resize(out.size() * 2);
        zs.next_out = out.data() + written;
        zs.avail_out = static_cast<uInt>(out.size() - written);
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw FormatError("corrupt gzip stream in " + path);
        }
        written = out.size() - zs.avail_out;
    }
    inflateEnd(&zs);
    out.resize(written);
    return out;
}

inline std::vector<unsigned char> read_maybe_gzipped(const std::string& path) {
    std::vector<unsigned char> bytes = read_file_bytes(path);
    if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b)
        return gunzip(bytes, path);
    return bytes;
}

inline std::uint32_t read_be32(const std::vector<unsigned char>& b, std::size_t off,
                               const std::string& path) {
    if (off + 4 > b.size()) throw FormatError("truncated header in " + path);
    return (std::uint32_t(b[off]) << 24) | (std::uint32_t(b[off + 1]) << 16) |
           (std::uint32_t(b[off + 2]) << 8) | std::uint32_t(b[off + 3]);
}

inline void write_be32(std::ofstream& f, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    f.write(reinterpret_cast<const char*>(b), 4);
}

inline std::string hex_magic(std::uint32_t m) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08x", m);
    return buf;
}

}  // namespace detail

constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

// Loads an IDX image file into an n x 784 matrix with pixels in [0,1].
inline Matrix load_idx_images(const std::string& path) {
    std::vector<unsigned char> b = detail::read_maybe_gzipped(path);
    std::uint32_t magic = detail::read_be32(b, 0, path);
    if (magic != kIdxImagesMagic)
        throw FormatError("bad image magic " + detail::hex_magic(magic) + " in " + path +
                          " (expected " + detail::hex_magic(kIdxImagesMagic) + ")");
    std::uint32_t n = detail::read_be32(b, 4, path);
    std::uint32_t rows = detail::read_be32(b, 8, path);
    std::uint32_t cols = detail::read_be32(b, 12, path);
    if (rows != 28 || cols != 28)
        throw ShapeError("unexpected image dims " + std::to_string(rows) + "x" +
                         std::to_string(cols) + " in " + path + " (expected 28x28)");
    const std::size_t expected = 16 + static_cast<std::size_t>(n) * 784;
    if (b.size() < expected)
        throw FormatError("truncated image file " + path + ": " + std::to_string(b.size()) +
                          " bytes, expected " + std::to_string(expected));
    Matrix images(n, 784);
    for (std::size_t i = 0; i < static_cast<std::size_t>(n) * 784; ++i)
        images.data()[i] = static_cast<double>(b[16 + i]) / 255.0;
    return images;
}

inline std::vector<std::uint8_t> load_idx_labels(const std::string& path) {
    std::vector<unsigned char> b = detail::read_maybe_gzipped(path);
    std::uint32_t magic = detail::read_be32(b, 0, path);
    if (magic != kIdxLabelsMagic)
        throw FormatError("bad label magic " + detail::hex_magic(magic) + " in " + path +
                          " (expected " + detail::hex_magic(kIdxLabelsMagic) + ")");
    std::uint32_t n = detail::read_be32(b, 4, path);
    const std::size_t expected = 8 + static_cast<std::size_t>(n);
    if (b.size() < expected)
        throw FormatError("truncated label file " + path + ": " + std::to_string(b.size()) +
                          " bytes, expected " + std::to_string(expected));
    return std::vector<std::uint8_t>(b.begin() + 8, b.begin() + static_cast<std::ptrdiff_t>(expected));
}

// Writes pixels back as round(v * 255); exact inverse of load for data that
// originated as u8.
inline void save_idx_images(const std::string& path, const Matrix& images) {
    if (images.cols() != 784)
        throw ShapeError("save_idx_images: expected n x 784, got " + images.shape_str());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("cannot write " + path);
    detail::write_be32(f, kIdxImagesMagic);
    detail::write_be32(f, static_cast<std::uint32_t>(images.rows()));
    detail::write_be32(f, 28);
    detail::write_be32(f, 28);
    std::vector<unsigned char> bytes(images.size());
    for (std::size_t i = 0; i < images.size(); ++i)
        bytes[i] = static_cast<unsigned char>(std::lround(images.data()[i] * 255.0));
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

inline void save_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("cannot write " + path);
    detail::write_be32(f, kIdxLabelsMagic);
    detail::write_be32(f, static_cast<std::uint32_t>(labels.size()));
    f.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
}

}  // namespace txnn
