// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#include "fcd/datacube.hpp"

#include <numeric>

namespace fcd {

void DataCube::validate() const {
    if (width <= 0 || height <= 0)
        throw validation_error("width/height", "must be positive, got " + std::to_string(width) +
                                                   "x" + std::to_string(height));
    if (variables.empty()) throw validation_error("variables", "variable list is empty");
    if (dates.empty()) throw validation_error("dates", "date list is empty");
    for (size_t i = 1; i < dates.size(); ++i) {
        if (days_between(dates[i], dates[i - 1]) <= 0)
            throw validation_error("dates", "not strictly increasing at index " +
                                                std::to_string(i) + " (" + format_date(dates[i]) +
                                                " after " + format_date(dates[i - 1]) + ")");
    }
    if (static_cast<int64_t>(values.size()) != size())
        throw validation_error("values", "expected " + std::to_string(size()) +
                                             " entries, got " + std::to_string(values.size()));
    // A pixel is fully observed or fully NaN at each timestep.
    const int nv = n_vars();
    if (nv > 1) {
        for (int t = 0; t < n_time(); ++t) {
            for (int y = 0; y < height; ++y) {
                for (int x = 0; x < width; ++x) {
                    const bool nan0 = std::isnan(at(t, 0, y, x));
                    for (int v = 1; v < nv; ++v) {
                        if (std::isnan(at(t, v, y, x)) != nan0)
                            throw validation_error(
                                "values", "mixed per-variable NaN at (t=" + std::to_string(t) +
                                              ", y=" + std::to_string(y) +
                                              ", x=" + std::to_string(x) + ")");
                    }
                }
            }
        }
    }
}

int64_t ForestMask::count() const {
    return std::accumulate(flags.begin(), flags.end(), int64_t{0},
                           [](int64_t a, uint8_t b) { return a + (b != 0); });
}

void ForestMask::validate() const {
    if (width <= 0 || height <= 0)
        throw validation_error("width/height", "must be positive");
    if (static_cast<int64_t>(flags.size()) != static_cast<int64_t>(width) * height)
        throw validation_error("flags", "size does not match width*height");
    for (size_t i = 0; i < flags.size(); ++i)
        if (flags[i] > 1)
            throw validation_error("flags", "byte value " + std::to_string(flags[i]) +
                                                " at offset " + std::to_string(i) +
                                                " is not 0 or 1");
}

void ChangeMap::validate(int n_time) const {
    const int64_t n = static_cast<int64_t>(width) * height;
    if (static_cast<int64_t>(change_index.size()) != n)
        throw validation_error("change_index", "size does not match width*height");
    if (static_cast<int64_t>(final_evidence.size()) != n)
        throw validation_error("final_evidence", "size does not match width*height");
    if (static_cast<int64_t>(low_coverage.size()) != n)
        throw validation_error("low_coverage", "size does not match width*height");
    for (int64_t i = 0; i < n; ++i) {
        const int32_t c = change_index[i];
        if (c < kNoChange || c >= n_time)
            throw validation_error("change_index",
                                   "value " + std::to_string(c) + " at offset " +
                                       std::to_string(i) + " outside {-1} U [0, " +
                                       std::to_string(n_time) + ")");
    }
}

void ReferenceChangeMap::validate() const {
    const int64_t n = static_cast<int64_t>(width) * height;
    if (static_cast<int64_t>(change_index.size()) != n)
        throw validation_error("change_index", "size does not match width*height");
    const int nd = static_cast<int>(dates.size());
    for (int64_t i = 0; i < n; ++i) {
        const int32_t c = change_index[i];
        if (c < kNoChange || c >= nd)
            throw validation_error("change_index", "value " + std::to_string(c) + " at offset " +
                                                       std::to_string(i) +
                                                       " has no date table entry");
    }
}

} // namespace fcd
