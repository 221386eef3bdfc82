// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fcd/accuracy.hpp"
#include "fcd/datacube.hpp"

namespace fcd {

/// Seeded subsample of n members from a mask, for building fixed-size
/// reference ensembles.
ForestMask sample_mask(const ForestMask& mask, int64_t n, uint64_t seed);

/// Label-noise injection: returns a mask of the same size N with
/// ceil(c*N) members replaced by pool pixels. One seeded permutation per
/// side, prefix-truncated, so the corrupted sets nest across c for a fixed
/// seed and adjacent sweep points differ only by the corruption level.
ForestMask corrupt_mask(const ForestMask& mask, const ForestMask& pool, double c,
                        uint64_t seed);

struct SweepParams {
    std::vector<double> fractions; // ascending, in [0, 1)
    uint64_t seed = 42;
    ModelParams model;
    DetectorParams detector;

    void validate() const;
};

struct SweepRow {
    double c = 0;
    AccuracyReport report;
};

/// For each corruption fraction: corrupt the ensemble, refit, re-detect,
/// assess against the truth map. Writes sweep.csv and one change-map PNG
/// per fraction into out_dir (skipped when out_dir is empty).
std::vector<SweepRow> noise_sweep(const DataCube& cube, const ReferenceChangeMap& truth,
                                  const ForestMask& ensemble, const ForestMask& pool,
                                  const SweepParams& params, const std::string& out_dir,
                                  int threads = 0);

/// Parses "0:0.22:0.02" (begin:end:step, end inclusive within 1e-9) or a
/// comma list "0,0.05,0.1".
std::vector<double> parse_fractions(const std::string& text);

} // namespace fcd
