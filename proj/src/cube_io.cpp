// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#include "fcd/cube_io.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "fcd/png_writer.hpp"

// Payloads are memcpy'd; the declared on-disk format is little-endian.
static_assert(std::endian::native == std::endian::little,
              "cube/mask/change payloads are little-endian");

namespace fcd {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<char> read_binary_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error(path, "cannot open for reading");
    f.seekg(0, std::ios::end);
    const auto n = f.tellg();
    f.seekg(0, std::ios::beg);
    std::vector<char> buf(static_cast<size_t>(n));
    if (n > 0) f.read(buf.data(), n);
    if (!f) throw io_error(path, "short read");
    return buf;
}

void write_binary_file(const std::string& path, const void* data, size_t bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error(path, "cannot open for writing");
    f.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
    if (!f) throw io_error(path, "write failed");
}

namespace {

json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error(path, "cannot open for reading");
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw validation_error(path, std::string("invalid JSON: ") + e.what());
    }
    return j;
}

void save_json(const std::string& path, const json& j) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw io_error(path, "cannot open for writing");
    f << j.dump(2) << "\n";
    if (!f) throw io_error(path, "write failed");
}

template <typename T>
T require(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw validation_error(key, "missing from " + where);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw validation_error(key, "wrong type in " + where);
    }
}

std::string sibling(const std::string& manifest_path, const std::string& name) {
    return (fs::path(manifest_path).parent_path() / name).string();
}

} // namespace

DataCube read_cube(const std::string& manifest_path) {
    const json j = load_json(manifest_path);
    CubeManifest m;
    m.version = require<int>(j, "version", manifest_path);
    m.dtype = require<std::string>(j, "dtype", manifest_path);
    m.layout = require<std::string>(j, "layout", manifest_path);
    m.width = require<int>(j, "width", manifest_path);
    m.height = require<int>(j, "height", manifest_path);
    m.n_time = require<int>(j, "n_time", manifest_path);
    m.variables = require<std::vector<std::string>>(j, "variables", manifest_path);
    m.dates = require<std::vector<std::string>>(j, "dates", manifest_path);
    m.data = require<std::string>(j, "data", manifest_path);

    if (m.version != 1) throw validation_error("version", "unsupported cube manifest version");
    if (m.dtype != "f32le") throw validation_error("dtype", "expected f32le, got " + m.dtype);
    if (m.layout != "t,v,y,x") throw validation_error("layout", "expected t,v,y,x, got " + m.layout);
    if (static_cast<int>(m.dates.size()) != m.n_time)
        throw validation_error("n_time", "manifest n_time " + std::to_string(m.n_time) +
                                             " != dates length " + std::to_string(m.dates.size()));

    DataCube cube;
    cube.width = m.width;
    cube.height = m.height;
    cube.variables = m.variables;
    cube.dates = parse_dates(m.dates);

    const std::string payload = sibling(manifest_path, m.data);
    const std::vector<char> raw = read_binary_file(payload);
    const int64_t expect = static_cast<int64_t>(m.n_time) * m.variables.size() * m.width *
                           m.height * static_cast<int64_t>(sizeof(float));
    if (static_cast<int64_t>(raw.size()) != expect)
        throw validation_error("data", "payload " + payload + " holds " +
                                           std::to_string(raw.size()) + " bytes, manifest dims need " +
                                           std::to_string(expect));
    cube.values.resize(raw.size() / sizeof(float));
    std::memcpy(cube.values.data(), raw.data(), raw.size());
    cube.validate();
    return cube;
}

CubeManifest write_cube(const DataCube& cube, const std::string& dir) {
    cube.validate();
    fs::create_directories(dir);
    CubeManifest m;
    m.width = cube.width;
    m.height = cube.height;
    m.n_time = cube.n_time();
    m.variables = cube.variables;
    for (const auto& d : cube.dates) m.dates.push_back(format_date(d));
    m.data = "cube.bin";

    write_binary_file((fs::path(dir) / m.data).string(), cube.values.data(),
                      cube.values.size() * sizeof(float));
    const json j = {{"version", m.version}, {"dtype", m.dtype},     {"layout", m.layout},
                    {"width", m.width},     {"height", m.height},   {"n_time", m.n_time},
                    {"variables", m.variables}, {"dates", m.dates}, {"data", m.data}};
    save_json((fs::path(dir) / "cube.json").string(), j);
    return m;
}

ForestMask read_mask(const std::string& json_path) {
    const json j = load_json(json_path);
    ForestMask mask;
    mask.width = require<int>(j, "width", json_path);
    mask.height = require<int>(j, "height", json_path);
    const std::string data = require<std::string>(j, "data", json_path);
    const std::vector<char> raw = read_binary_file(sibling(json_path, data));
    const int64_t expect = static_cast<int64_t>(mask.width) * mask.height;
    if (static_cast<int64_t>(raw.size()) != expect)
        throw validation_error("data", "mask payload holds " + std::to_string(raw.size()) +
                                           " bytes, expected " + std::to_string(expect));
    mask.flags.assign(raw.begin(), raw.end());
    mask.validate();
    return mask;
}

void write_mask(const ForestMask& mask, const std::string& json_path) {
    mask.validate();
    const fs::path p(json_path);
    fs::create_directories(p.parent_path().empty() ? "." : p.parent_path().string());
    const std::string bin_name = p.stem().string() + ".bin";
    write_binary_file(sibling(json_path, bin_name), mask.flags.data(), mask.flags.size());
    save_json(json_path, json{{"version", 1},
                              {"width", mask.width},
                              {"height", mask.height},
                              {"data", bin_name}});
}

void write_change_map(const ChangeMap& map, const std::vector<Date>& dates,
                      const std::string& dir) {
    const int n_time = static_cast<int>(dates.size());
    map.validate(n_time);
    fs::create_directories(dir);

    write_binary_file((fs::path(dir) / "changes.bin").string(), map.change_index.data(),
                      map.change_index.size() * sizeof(int32_t));
    write_binary_file((fs::path(dir) / "changes_lowcov.bin").string(), map.low_coverage.data(),
                      map.low_coverage.size());

    // CSV: one row per changed or low-coverage pixel.
    std::ofstream csv((fs::path(dir) / "changes.csv").string(), std::ios::trunc);
    if (!csv) throw io_error(dir + "/changes.csv", "cannot open for writing");
    csv << "x,y,change_index,change_date,final_evidence,low_coverage\n";
    int64_t n_changed = 0, n_lowcov = 0;
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            const int64_t i = static_cast<int64_t>(y) * map.width + x;
            const int32_t c = map.change_index[i];
            const bool lc = map.low_coverage[i] != 0;
            if (c < 0 && !lc) continue;
            n_changed += c >= 0;
            n_lowcov += lc;
            char ev[32];
            if (std::isnan(map.final_evidence[i]))
                std::snprintf(ev, sizeof(ev), "nan");
            else
                std::snprintf(ev, sizeof(ev), "%.9g", map.final_evidence[i]);
            csv << x << "," << y << "," << c << ","
                << (c >= 0 ? format_date(dates[c]) : "") << "," << ev << "," << (lc ? 1 : 0)
                << "\n";
        }
    }
    if (!csv) throw io_error(dir + "/changes.csv", "write failed");
    csv.close();

    render_change_map_png((fs::path(dir) / "changes.png").string(), map, n_time);

    std::vector<std::string> date_strings;
    for (const auto& d : dates) date_strings.push_back(format_date(d));
    save_json((fs::path(dir) / "changes.json").string(),
              json{{"version", 1},
                   {"width", map.width},
                   {"height", map.height},
                   {"dates", date_strings},
                   {"data", "changes.bin"},
                   {"lowcov", "changes_lowcov.bin"},
                   {"csv", "changes.csv"},
                   {"png", "changes.png"},
                   {"n_changed", n_changed},
                   {"n_low_coverage", n_lowcov}});
}

ChangeMap read_change_map(const std::string& json_path, std::vector<Date>* dates_out) {
    const json j = load_json(json_path);
    ChangeMap map;
    map.width = require<int>(j, "width", json_path);
    map.height = require<int>(j, "height", json_path);
    const auto date_strings = require<std::vector<std::string>>(j, "dates", json_path);
    const std::vector<Date> dates = parse_dates(date_strings);
    const int64_t n = static_cast<int64_t>(map.width) * map.height;

    const std::vector<char> raw = read_binary_file(sibling(json_path, require<std::string>(j, "data", json_path)));
    if (static_cast<int64_t>(raw.size()) != n * static_cast<int64_t>(sizeof(int32_t)))
        throw validation_error("data", "change raster holds " + std::to_string(raw.size()) +
                                           " bytes, expected " + std::to_string(n * 4));
    map.change_index.resize(n);
    std::memcpy(map.change_index.data(), raw.data(), raw.size());

    map.low_coverage.assign(n, 0);
    if (j.contains("lowcov")) {
        const std::vector<char> lc = read_binary_file(sibling(json_path, j.at("lowcov").get<std::string>()));
        if (static_cast<int64_t>(lc.size()) != n)
            throw validation_error("lowcov", "low-coverage raster size mismatch");
        map.low_coverage.assign(lc.begin(), lc.end());
    }
    // final_evidence is not round-tripped through the raster formats; the CSV
    // carries it for changed pixels.
    map.final_evidence.assign(n, std::numeric_limits<float>::quiet_NaN());
    map.validate(static_cast<int>(dates.size()));
    if (dates_out) *dates_out = dates;
    return map;
}

ReferenceChangeMap read_reference_map(const std::string& json_path) {
    const json j = load_json(json_path);
    ReferenceChangeMap ref;
    ref.width = require<int>(j, "width", json_path);
    ref.height = require<int>(j, "height", json_path);
    ref.provenance = require<std::string>(j, "provenance", json_path);
    ref.dates = parse_dates(require<std::vector<std::string>>(j, "dates", json_path));
    const std::vector<char> raw = read_binary_file(sibling(json_path, require<std::string>(j, "data", json_path)));
    const int64_t n = static_cast<int64_t>(ref.width) * ref.height;
    if (static_cast<int64_t>(raw.size()) != n * static_cast<int64_t>(sizeof(int32_t)))
        throw validation_error("data", "reference raster holds " + std::to_string(raw.size()) +
                                           " bytes, expected " + std::to_string(n * 4));
    ref.change_index.resize(n);
    std::memcpy(ref.change_index.data(), raw.data(), raw.size());
    ref.validate();
    return ref;
}

void write_reference_map(const ReferenceChangeMap& ref, const std::string& json_path) {
    ref.validate();
    const fs::path p(json_path);
    fs::create_directories(p.parent_path().empty() ? "." : p.parent_path().string());
    const std::string bin_name = p.stem().string() + ".bin";
    write_binary_file(sibling(json_path, bin_name), ref.change_index.data(),
                      ref.change_index.size() * sizeof(int32_t));
    std::vector<std::string> date_strings;
    for (const auto& d : ref.dates) date_strings.push_back(format_date(d));
    save_json(json_path, nlohmann::json{{"version", 1},
                                        {"width", ref.width},
                                        {"height", ref.height},
                                        {"provenance", ref.provenance},
                                        {"dates", date_strings},
                                        {"data", bin_name}});
}

} // namespace fcd
