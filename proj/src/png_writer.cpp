// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#include "fcd/png_writer.hpp"

#include <cstring>
#include <fstream>

#include <zlib.h>

#include "fcd/error.hpp"

namespace fcd {

namespace {

void put_u32_be(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void put_chunk(std::vector<uint8_t>& out, const char tag[4], const uint8_t* data, size_t n) {
    put_u32_be(out, static_cast<uint32_t>(n));
    const size_t start = out.size();
    out.insert(out.end(), tag, tag + 4);
    out.insert(out.end(), data, data + n);
    const uint32_t crc = crc32(0, out.data() + start, static_cast<uInt>(out.size() - start));
    put_u32_be(out, crc);
}

} // namespace

void write_png_rgb(const std::string& path, const uint8_t* rgb, int width, int height) {
    if (width <= 0 || height <= 0) throw validation_error("png", "non-positive dimensions");

    // Scanlines with filter byte 0.
    const size_t stride = static_cast<size_t>(width) * 3;
    std::vector<uint8_t> raw((stride + 1) * height);
    for (int y = 0; y < height; ++y) {
        raw[y * (stride + 1)] = 0;
        std::memcpy(raw.data() + y * (stride + 1) + 1, rgb + y * stride, stride);
    }

    uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
    std::vector<uint8_t> zbuf(zlen);
    if (compress2(zbuf.data(), &zlen, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw io_error(path, "zlib compression failed");
    zbuf.resize(zlen);

    std::vector<uint8_t> out;
    static const uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    out.insert(out.end(), sig, sig + 8);

    uint8_t ihdr[13];
    ihdr[0] = static_cast<uint8_t>(width >> 24);
    ihdr[1] = static_cast<uint8_t>(width >> 16);
    ihdr[2] = static_cast<uint8_t>(width >> 8);
    ihdr[3] = static_cast<uint8_t>(width);
    ihdr[4] = static_cast<uint8_t>(height >> 24);
    ihdr[5] = static_cast<uint8_t>(height >> 16);
    ihdr[6] = static_cast<uint8_t>(height >> 8);
    ihdr[7] = static_cast<uint8_t>(height);
    ihdr[8] = 8;  // bit depth
    ihdr[9] = 2;  // color type RGB
    ihdr[10] = 0; // compression
    ihdr[11] = 0; // filter
    ihdr[12] = 0; // interlace
    put_chunk(out, "IHDR", ihdr, sizeof(ihdr));
    put_chunk(out, "IDAT", zbuf.data(), zbuf.size());
    put_chunk(out, "IEND", nullptr, 0);

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error(path, "cannot open for writing");
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw io_error(path, "write failed");
}

void viridis(double t, uint8_t rgb[3]) {
    static const uint8_t anchors[][3] = {
        {68, 1, 84},   {71, 45, 123},  {59, 82, 139},  {44, 114, 142}, {33, 145, 140},
        {39, 173, 129}, {92, 200, 99},  {170, 220, 50}, {253, 231, 37},
    };
    constexpr int n = static_cast<int>(sizeof(anchors) / sizeof(anchors[0]));
    if (t < 0) t = 0;
    if (t > 1) t = 1;
    const double pos = t * (n - 1);
    const int i = std::min(static_cast<int>(pos), n - 2);
    const double f = pos - i;
    for (int c = 0; c < 3; ++c)
        rgb[c] = static_cast<uint8_t>(anchors[i][c] + f * (anchors[i + 1][c] - anchors[i][c]) + 0.5);
}

void render_change_map_png(const std::string& path, const ChangeMap& map, int n_time) {
    std::vector<uint8_t> rgb(static_cast<size_t>(map.width) * map.height * 3);
    const double denom = n_time > 1 ? n_time - 1 : 1;
    for (int64_t i = 0; i < static_cast<int64_t>(map.width) * map.height; ++i) {
        uint8_t* px = rgb.data() + i * 3;
        const int32_t c = map.change_index[i];
        if (c >= 0) {
            viridis(c / denom, px);
        } else if (map.low_coverage[i]) {
            px[0] = px[1] = px[2] = 200;
        } else {
            px[0] = px[1] = px[2] = 255;
        }
    }
    write_png_rgb(path, rgb.data(), map.width, map.height);
}

} // namespace fcd
