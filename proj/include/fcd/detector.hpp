// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fcd/datacube.hpp"
#include "fcd/forest_model.hpp"

namespace fcd {

/// Evidence accumulation variants. Equation 3-style accumulation can be read
/// two ways; both are implemented:
///  - coherent (default): evidence grows while the pixel looks LESS like
///    forest (ratio threshold/p) and resets to 1 when p >= threshold, so
///    crossing L means sustained non-forest behavior.
///  - paper_literal: the printed recurrence verbatim (ratio p/threshold,
///    reset when the previous step was below threshold, seeded with
///    p_0/threshold_0), kept for auditability.
enum class DetectorMode { coherent, paper_literal };

DetectorMode detector_mode_from_name(const std::string& name);
std::string detector_mode_name(DetectorMode mode);

struct DetectorParams {
    double L = 10.0; // evidence threshold, > 1
    DetectorMode mode = DetectorMode::coherent;
    /// Pixels with more than this fraction of NaN timesteps are never
    /// declared and are flagged low-coverage.
    double low_coverage_fraction = 0.5;

    void validate() const;
};

/// Full per-pixel diagnostic: similarity, threshold, below-flag and evidence
/// per timestep, plus the declared change index (first t with lambda >= L).
struct EvidenceTrace {
    struct Step {
        double p = std::numeric_limits<double>::quiet_NaN();
        double threshold = std::numeric_limits<double>::quiet_NaN();
        bool below = false;
        bool skipped = false; // NaN pixel or unusable timestep; lambda carried
        double lambda = std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<Step> steps;
    std::optional<int> declared;
    double final_evidence = std::numeric_limits<double>::quiet_NaN();
};

/// One coherent-mode evidence update. lambda_prev is 1 at series start.
double lambda_step(double lambda_prev, double p, double threshold);

/// Strided view of one pixel's series inside a cube (or a packed test array).
struct PixelSeries {
    const float* data = nullptr;
    int n_time = 0;
    int n_vars = 0;
    int64_t t_stride = 0;
    int64_t v_stride = 0;

    float at(int t, int v) const { return data[t * t_stride + v * v_stride]; }
};

PixelSeries pixel_series(const DataCube& cube, int y, int x);

EvidenceTrace detect_pixel(const ForestModel& model, const PixelSeries& series,
                           const DetectorParams& params);

/// Per-pixel detection over the whole cube; bit-identical to running
/// detect_pixel on every pixel, independent of the worker count. Pixels
/// failing the coverage rule are reported as no-change with the
/// low-coverage flag set.
ChangeMap detect_cube(const ForestModel& model, const DataCube& cube,
                      const DetectorParams& params, int threads = 0);

/// Writes one trace CSV per requested pixel: t, date, p, threshold, lambda,
/// below, skipped.
void write_trace_csv(const std::string& path, const EvidenceTrace& trace,
                     const std::vector<Date>& dates);

} // namespace fcd
