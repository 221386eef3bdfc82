// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "fcd/datacube.hpp"
#include "fcd/detector.hpp"
#include "fcd/forest_model.hpp"

namespace fcd {

struct ConfusionMatrix {
    int64_t tp = 0;
    int64_t fp = 0;
    int64_t tn = 0;
    int64_t fn = 0;
    int64_t excluded = 0; // low-coverage pixels, tallied separately
};

/// Spatial metrics plus the temporal lag summary. The two balanced-accuracy
/// variants are reported side by side: ba_standard = (sensitivity +
/// specificity)/2, ba_paper = (precision + NPV)/2 as printed in the source
/// the formula was taken from; they diverge on asymmetric matrices.
struct AccuracyReport {
    ConfusionMatrix cm;
    double pa = 0, ua = 0, oa = 0, ba_paper = 0, ba_standard = 0;
    double mean_lag_days = std::numeric_limits<double>::quiet_NaN();
    double lag_rmse_days = std::numeric_limits<double>::quiet_NaN();
    int64_t lag_pixels = 0;
    /// (reference year, detected year) -> count; only for annual references.
    std::map<std::pair<int, int>, int64_t> year_crosstab;
};

enum class BaVariant { standard, paper };

BaVariant ba_variant_from_name(const std::string& name);

/// Change/no-change binarization; dates ignored. Low-coverage map pixels
/// are excluded from the four counts.
ConfusionMatrix confusion(const ChangeMap& map, const ReferenceChangeMap& ref);

/// PA/UA/OA/BA from the counts. Zero denominators yield NaN with a warning,
/// never an error.
AccuracyReport metrics(const ConfusionMatrix& cm);

/// Lag statistics over pixels changed in both maps: detected date minus
/// reference date in days (negative = early detection). NaN pair when no
/// pixel is co-detected. Only meaningful against date-resolved references;
/// annual-product references get a year cross-tab instead.
void mean_lag(const ChangeMap& map, const std::vector<Date>& map_dates,
              const ReferenceChangeMap& ref, double* mean_days, double* rmse_days,
              int64_t* n_pixels);

/// confusion + metrics + lag (or year cross-tab for annual references).
AccuracyReport assess(const ChangeMap& map, const std::vector<Date>& map_dates,
                      const ReferenceChangeMap& ref);

void write_report(const AccuracyReport& report, const std::string& json_path,
                  const std::string& csv_path);

struct TuneGridPoint {
    double q = 0;
    double L = 0;
    AccuracyReport report;
};

struct TuneResult {
    double q = 0;
    double L = 0;
    BaVariant variant = BaVariant::standard;
    AccuracyReport report;
    std::vector<TuneGridPoint> grid;
};

inline const std::vector<double> kDefaultTuneQ{0.01, 0.02, 0.05, 0.10, 0.20};
inline const std::vector<double> kDefaultTuneL{2, 5, 10, 100, 1000, 10000};

/// Exhaustive (q, L) sweep maximizing the chosen BA variant against the
/// reference; ties prefer smaller q, then smaller L. Histogram counts are
/// fitted once and rethresholded per q. Aborts on a reference with no
/// changed pixels.
TuneResult tune_thresholds(const DataCube& cube, const ForestMask& mask,
                           const ReferenceChangeMap& ref, std::vector<double> qs,
                           std::vector<double> Ls, BaVariant variant,
                           const ModelParams& model_params, const DetectorParams& detector_params,
                           int threads = 0);

void write_tune_result(const TuneResult& result, const std::string& json_path);

} // namespace fcd
