// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fcd/dates.hpp"
#include "fcd/error.hpp"

namespace fcd {

/// (time, variable, row, col) float32 measurements with a calendar date per
/// timestep. NaN marks missing acquisitions; a pixel is either fully observed
/// or fully NaN at a given timestep (mixed per-variable NaN is rejected).
struct DataCube {
    int width = 0;
    int height = 0;
    std::vector<std::string> variables;
    std::vector<Date> dates; // strictly increasing, one per timestep
    std::vector<float> values; // [t][v][y][x], t slowest

    int n_time() const { return static_cast<int>(dates.size()); }
    int n_vars() const { return static_cast<int>(variables.size()); }
    int64_t plane_size() const { return static_cast<int64_t>(width) * height; }
    int64_t size() const { return plane_size() * n_time() * n_vars(); }

    int64_t index(int t, int v, int y, int x) const {
        return ((static_cast<int64_t>(t) * n_vars() + v) * height + y) * width + x;
    }
    float at(int t, int v, int y, int x) const { return values[index(t, v, y, x)]; }
    float& at(int t, int v, int y, int x) { return values[index(t, v, y, x)]; }
    const float* slice(int t, int v) const { return values.data() + index(t, v, 0, 0); }
    float* slice(int t, int v) { return values.data() + index(t, v, 0, 0); }

    /// Missingness is per (t, pixel); variable 0 stands for all of them.
    bool pixel_missing(int t, int y, int x) const { return std::isnan(at(t, 0, y, x)); }

    /// Throws validation_error naming the offending field.
    void validate() const;
};

/// Boolean raster naming the reference-class ensemble.
struct ForestMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> flags; // row-major, 0/1

    bool at(int y, int x) const { return flags[static_cast<int64_t>(y) * width + x] != 0; }
    void set(int y, int x, bool v) { flags[static_cast<int64_t>(y) * width + x] = v ? 1 : 0; }
    int64_t count() const;
    void validate() const;
};

inline constexpr int32_t kNoChange = -1;

/// Per-pixel first declared change (timestep index, -1 = none) plus the
/// evidence value at declaration. Low-coverage pixels (mostly-NaN series)
/// are never declared and are excluded from accuracy tallies.
struct ChangeMap {
    int width = 0;
    int height = 0;
    std::vector<int32_t> change_index;  // row-major, kNoChange sentinel
    std::vector<float> final_evidence;  // NaN where undeclared
    std::vector<uint8_t> low_coverage;  // row-major, 0/1

    int32_t index_at(int y, int x) const {
        return change_index[static_cast<int64_t>(y) * width + x];
    }
    bool changed(int y, int x) const { return index_at(y, x) >= 0; }
    void validate(int n_time) const;
};

/// Per-pixel reference change date for accuracy assessment. Stored like a
/// change map: an index raster into this map's own date table.
struct ReferenceChangeMap {
    int width = 0;
    int height = 0;
    std::vector<int32_t> change_index; // into `dates`, kNoChange = no change
    std::vector<Date> dates;
    std::string provenance; // visual | annual-product | synthetic-truth

    int32_t index_at(int y, int x) const {
        return change_index[static_cast<int64_t>(y) * width + x];
    }
    bool changed(int y, int x) const { return index_at(y, x) >= 0; }
    void validate() const;
};

/// Sidecar describing a cube payload; serialized as cube.json.
struct CubeManifest {
    int version = 1;
    std::string dtype = "f32le";
    std::string layout = "t,v,y,x";
    int width = 0;
    int height = 0;
    int n_time = 0;
    std::vector<std::string> variables;
    std::vector<std::string> dates;
    std::string data; // payload filename, relative to the manifest
};

} // namespace fcd
