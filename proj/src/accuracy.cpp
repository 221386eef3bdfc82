// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#include "fcd/accuracy.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "fcd/log.hpp"

namespace fcd {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double ratio(int64_t num, int64_t den, const char* name) {
    if (den == 0) {
        log_warn("assess", std::string(name) + " has a zero denominator, reporting NaN");
        return kNaN;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}
} // namespace

BaVariant ba_variant_from_name(const std::string& name) {
    if (name == "standard") return BaVariant::standard;
    if (name == "paper") return BaVariant::paper;
    throw validation_error("ba", "unknown balanced-accuracy variant '" + name + "'");
}

ConfusionMatrix confusion(const ChangeMap& map, const ReferenceChangeMap& ref) {
    if (map.width != ref.width || map.height != ref.height)
        throw validation_error("ref", "reference dimensions " + std::to_string(ref.width) + "x" +
                                          std::to_string(ref.height) + " do not match map " +
                                          std::to_string(map.width) + "x" +
                                          std::to_string(map.height));
    ConfusionMatrix cm;
    const int64_t n = static_cast<int64_t>(map.width) * map.height;
    for (int64_t i = 0; i < n; ++i) {
        if (map.low_coverage[i]) {
            ++cm.excluded;
            continue;
        }
        const bool detected = map.change_index[i] >= 0;
        const bool actual = ref.change_index[i] >= 0;
        if (detected && actual)
            ++cm.tp;
        else if (detected && !actual)
            ++cm.fp;
        else if (!detected && actual)
            ++cm.fn;
        else
            ++cm.tn;
    }
    return cm;
}

AccuracyReport metrics(const ConfusionMatrix& cm) {
    AccuracyReport r;
    r.cm = cm;
    r.pa = ratio(cm.tp, cm.tp + cm.fn, "PA");
    r.ua = ratio(cm.tp, cm.tp + cm.fp, "UA");
    r.oa = ratio(cm.tp + cm.tn, cm.tp + cm.fp + cm.tn + cm.fn, "OA");
    const double npv = ratio(cm.tn, cm.tn + cm.fn, "NPV");
    const double specificity = ratio(cm.tn, cm.tn + cm.fp, "specificity");
    r.ba_paper = 0.5 * (r.ua + npv);
    r.ba_standard = 0.5 * (r.pa + specificity);
    return r;
}

void mean_lag(const ChangeMap& map, const std::vector<Date>& map_dates,
              const ReferenceChangeMap& ref, double* mean_days, double* rmse_days,
              int64_t* n_pixels) {
    if (map.width != ref.width || map.height != ref.height)
        throw validation_error("ref", "reference dimensions do not match map");
    double sum = 0, sum_sq = 0;
    int64_t n = 0;
    const int64_t total = static_cast<int64_t>(map.width) * map.height;
    for (int64_t i = 0; i < total; ++i) {
        const int32_t d = map.change_index[i];
        const int32_t rr = ref.change_index[i];
        if (d < 0 || rr < 0 || map.low_coverage[i]) continue;
        const double lag =
            static_cast<double>(days_between(map_dates[d], ref.dates[rr]));
        sum += lag;
        sum_sq += lag * lag;
        ++n;
    }
    *n_pixels = n;
    if (n == 0) {
        *mean_days = kNaN;
        *rmse_days = kNaN;
        return;
    }
    *mean_days = sum / n;
    *rmse_days = std::sqrt(sum_sq / n);
}

AccuracyReport assess(const ChangeMap& map, const std::vector<Date>& map_dates,
                      const ReferenceChangeMap& ref) {
    AccuracyReport r = metrics(confusion(map, ref));
    if (ref.provenance == "annual-product") {
        // Year comparison only; a day-level lag against year-resolution data
        // would be noise presented as signal.
        for (int y = 0; y < map.height; ++y) {
            for (int x = 0; x < map.width; ++x) {
                const int64_t i = static_cast<int64_t>(y) * map.width + x;
                const int32_t d = map.change_index[i];
                const int32_t rr = ref.change_index[i];
                if (d < 0 || rr < 0 || map.low_coverage[i]) continue;
                ++r.year_crosstab[{ref.dates[rr].year, map_dates[d].year}];
            }
        }
    } else {
        mean_lag(map, map_dates, ref, &r.mean_lag_days, &r.lag_rmse_days, &r.lag_pixels);
    }
    return r;
}

namespace {

nlohmann::json report_to_json(const AccuracyReport& r) {
    nlohmann::json j = {
        {"confusion",
         {{"tp", r.cm.tp}, {"fp", r.cm.fp}, {"tn", r.cm.tn}, {"fn", r.cm.fn},
          {"excluded_low_coverage", r.cm.excluded}}},
        {"metrics",
         {{"pa", r.pa}, {"ua", r.ua}, {"oa", r.oa}, {"ba_paper", r.ba_paper},
          {"ba_standard", r.ba_standard}}},
        {"lag", {{"mean_days", r.mean_lag_days}, {"rmse_days", r.lag_rmse_days},
                 {"pixels", r.lag_pixels}}}};
    if (!r.year_crosstab.empty()) {
        auto rows = nlohmann::json::array();
        for (const auto& [key, count] : r.year_crosstab)
            rows.push_back({{"reference_year", key.first}, {"detected_year", key.second},
                            {"pixels", count}});
        j["year_crosstab"] = std::move(rows);
    }
    return j;
}

} // namespace

void write_report(const AccuracyReport& r, const std::string& json_path,
                  const std::string& csv_path) {
    {
        std::ofstream f(json_path, std::ios::trunc);
        if (!f) throw io_error(json_path, "cannot open for writing");
        f << report_to_json(r).dump(2) << "\n";
        if (!f) throw io_error(json_path, "write failed");
    }
    if (!csv_path.empty()) {
        std::ofstream f(csv_path, std::ios::trunc);
        if (!f) throw io_error(csv_path, "cannot open for writing");
        f << "tp,fp,tn,fn,excluded,pa,ua,oa,ba_standard,ba_paper,mean_lag_days,lag_rmse_days,"
             "lag_pixels\n";
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g", r.pa, r.ua, r.oa,
                      r.ba_standard, r.ba_paper, r.mean_lag_days, r.lag_rmse_days);
        f << r.cm.tp << "," << r.cm.fp << "," << r.cm.tn << "," << r.cm.fn << ","
          << r.cm.excluded << "," << buf << "," << r.lag_pixels << "\n";
        if (!f) throw io_error(csv_path, "write failed");
    }
}

TuneResult tune_thresholds(const DataCube& cube, const ForestMask& mask,
                           const ReferenceChangeMap& ref, std::vector<double> qs,
                           std::vector<double> Ls, BaVariant variant,
                           const ModelParams& model_params, const DetectorParams& detector_params,
                           int threads) {
    if (qs.empty() || Ls.empty()) throw validation_error("grid", "q/L grid must be non-empty");
    bool any_change = false;
    for (int32_t c : ref.change_index) any_change |= c >= 0;
    if (!any_change)
        throw validation_error("ref",
                               "reference contains no changed pixels; balanced accuracy is "
                               "undefined, nothing to tune against");

    std::sort(qs.begin(), qs.end());
    std::sort(Ls.begin(), Ls.end());

    ForestModel model = build_histograms(cube, mask, model_params.n_bins, model_params.epsilon,
                                         threads);
    TuneResult result;
    result.variant = variant;
    double best = -std::numeric_limits<double>::infinity();

    for (double q : qs) {
        quantile_thresholds(model, cube, mask, q, threads);
        for (double L : Ls) {
            DetectorParams dp = detector_params;
            dp.L = L;
            const ChangeMap map = detect_cube(model, cube, dp, threads);
            TuneGridPoint point{q, L, assess(map, cube.dates, ref)};
            const double score =
                variant == BaVariant::standard ? point.report.ba_standard : point.report.ba_paper;
            if (!std::isnan(score) && score > best) {
                best = score;
                result.q = q;
                result.L = L;
                result.report = point.report;
            }
            result.grid.push_back(std::move(point));
        }
    }
    if (best == -std::numeric_limits<double>::infinity())
        throw validation_error("grid", "no grid point produced a defined balanced accuracy");
    return result;
}

void write_tune_result(const TuneResult& r, const std::string& json_path) {
    nlohmann::json j = {{"q", r.q},
                        {"L", r.L},
                        {"ba_variant", r.variant == BaVariant::standard ? "standard" : "paper"},
                        {"report", report_to_json(r.report)}};
    auto grid = nlohmann::json::array();
    for (const auto& p : r.grid)
        grid.push_back({{"q", p.q},
                        {"L", p.L},
                        {"pa", p.report.pa},
                        {"ua", p.report.ua},
                        {"oa", p.report.oa},
                        {"ba_standard", p.report.ba_standard},
                        {"ba_paper", p.report.ba_paper},
                        {"mean_lag_days", p.report.mean_lag_days}});
    j["grid"] = std::move(grid);
    std::ofstream f(json_path, std::ios::trunc);
    if (!f) throw io_error(json_path, "cannot open for writing");
    f << j.dump(2) << "\n";
    if (!f) throw io_error(json_path, "write failed");
}

} // namespace fcd
