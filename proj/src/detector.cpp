// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#include "fcd/detector.hpp"

#include <cmath>
#include <fstream>

#include "fcd/kernels/kernels.hpp"
#include "fcd/parallel.hpp"

namespace fcd {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

DetectorMode detector_mode_from_name(const std::string& name) {
    if (name == "coherent") return DetectorMode::coherent;
    if (name == "paper-literal" || name == "paper_literal") return DetectorMode::paper_literal;
    throw validation_error("mode", "unknown detector mode '" + name + "'");
}

std::string detector_mode_name(DetectorMode mode) {
    return mode == DetectorMode::coherent ? "coherent" : "paper-literal";
}

void DetectorParams::validate() const {
    if (!(L > 1.0)) throw validation_error("L", "evidence threshold must be > 1");
    if (!(low_coverage_fraction >= 0.0 && low_coverage_fraction <= 1.0))
        throw validation_error("low_coverage_fraction", "must lie in [0, 1]");
}

double lambda_step(double lambda_prev, double p, double threshold) {
    if (p >= threshold) return 1.0;
    const double base = lambda_prev > 1.0 ? lambda_prev : 1.0;
    return base * (threshold / p);
}

PixelSeries pixel_series(const DataCube& cube, int y, int x) {
    PixelSeries s;
    s.data = cube.values.data() + static_cast<int64_t>(y) * cube.width + x;
    s.n_time = cube.n_time();
    s.n_vars = cube.n_vars();
    s.v_stride = cube.plane_size();
    s.t_stride = s.v_stride * cube.n_vars();
    return s;
}

EvidenceTrace detect_pixel(const ForestModel& model, const PixelSeries& series,
                           const DetectorParams& params) {
    params.validate();
    if (series.n_time != model.n_time)
        throw validation_error("series", "length " + std::to_string(series.n_time) +
                                             " does not match model timesteps " +
                                             std::to_string(model.n_time));
    if (series.n_vars != model.n_vars)
        throw validation_error("series", "variable count does not match the model");

    EvidenceTrace trace;
    trace.steps.resize(series.n_time);

    double lambda = 1.0; // coherent-mode state; paper-literal keeps its own
    bool seen = false;   // paper-literal: any processed step yet
    bool prev_below = false;
    double lit_lambda = kNaN;

    for (int t = 0; t < series.n_time; ++t) {
        auto& step = trace.steps[t];
        step.threshold = model.thresholds[t];
        const double p =
            joint_similarity(model, series.data + t * series.t_stride, series.v_stride, t);
        step.p = p;

        const bool skip = !model.usable[t] || std::isnan(p);
        if (skip) {
            step.skipped = true;
            step.lambda = params.mode == DetectorMode::coherent ? lambda : lit_lambda;
            continue;
        }

        const double thr = model.thresholds[t];
        step.below = p < thr;
        if (params.mode == DetectorMode::coherent) {
            lambda = lambda_step(lambda, p, thr);
            step.lambda = lambda;
        } else {
            // Printed recurrence: reset when the previous processed step was
            // below threshold, seed with p/thr, otherwise multiply by p/thr.
            if (!seen)
                lit_lambda = p / thr;
            else if (prev_below)
                lit_lambda = 1.0;
            else
                lit_lambda = lit_lambda * (p / thr);
            seen = true;
            prev_below = step.below;
            step.lambda = lit_lambda;
        }

        if (!trace.declared && step.lambda >= params.L) {
            trace.declared = t;
            trace.final_evidence = step.lambda;
        }
    }
    return trace;
}

namespace {

ChangeMap detect_cube_coherent(const ForestModel& model, const DataCube& cube,
                               const DetectorParams& params, int threads) {
    const auto& K = kernels::active_kernels();
    const int W = cube.width, H = cube.height, T = cube.n_time(), nv = cube.n_vars();
    const int64_t plane = cube.plane_size();

    ChangeMap map;
    map.width = W;
    map.height = H;
    map.change_index.assign(static_cast<size_t>(W) * H, kNoChange);
    map.final_evidence.assign(static_cast<size_t>(W) * H,
                              std::numeric_limits<float>::quiet_NaN());
    map.low_coverage.assign(static_cast<size_t>(W) * H, 0);

    parallel_for(H, threads, [&](int64_t y0, int64_t y1) {
        std::vector<double> lam(W), ev(W), pj(W), pv(W);
        std::vector<int32_t> tidx(W);
        std::vector<int32_t> nan_count(W);

        for (int y = static_cast<int>(y0); y < y1; ++y) {
            std::fill(lam.begin(), lam.end(), 1.0);
            std::fill(ev.begin(), ev.end(), kNaN);
            std::fill(tidx.begin(), tidx.end(), kNoChange);
            std::fill(nan_count.begin(), nan_count.end(), 0);

            for (int t = 0; t < T; ++t) {
                const float* row0 = cube.slice(t, 0) + static_cast<int64_t>(y) * W;
                for (int x = 0; x < W; ++x) nan_count[x] += std::isnan(row0[x]);
                if (!model.usable[t]) continue;

                for (int v = 0; v < nv; ++v) {
                    const auto& edges = model.spec.edges[v];
                    const int B = model.spec.n_bins;
                    const double e0 = edges[0];
                    const double inv_bw = 1.0 / ((edges[B] - edges[0]) / B);
                    const float* xrow =
                        cube.values.data() + (static_cast<int64_t>(t) * nv + v) * plane +
                        static_cast<int64_t>(y) * W;
                    double* dst = v == 0 ? pj.data() : pv.data();
                    K.similarity_row(dst, xrow, model.prob_row(t, v), edges.data(), e0, inv_bw,
                                     B, W);
                    if (v > 0) K.mul_f64(pj.data(), pv.data(), W);
                }
                K.lambda_row(lam.data(), tidx.data(), ev.data(), pj.data(),
                             model.thresholds[t], params.L, t, W);
            }

            const double max_nan = params.low_coverage_fraction * T;
            for (int x = 0; x < W; ++x) {
                const int64_t i = static_cast<int64_t>(y) * W + x;
                if (static_cast<double>(nan_count[x]) > max_nan) {
                    map.low_coverage[i] = 1;
                    continue; // never declared, regardless of evidence
                }
                if (tidx[x] >= 0) {
                    map.change_index[i] = tidx[x];
                    map.final_evidence[i] = static_cast<float>(ev[x]);
                }
            }
        }
    });
    return map;
}

ChangeMap detect_cube_literal(const ForestModel& model, const DataCube& cube,
                              const DetectorParams& params, int threads) {
    const int W = cube.width, H = cube.height, T = cube.n_time();
    ChangeMap map;
    map.width = W;
    map.height = H;
    map.change_index.assign(static_cast<size_t>(W) * H, kNoChange);
    map.final_evidence.assign(static_cast<size_t>(W) * H,
                              std::numeric_limits<float>::quiet_NaN());
    map.low_coverage.assign(static_cast<size_t>(W) * H, 0);

    parallel_for(H, threads, [&](int64_t y0, int64_t y1) {
        for (int y = static_cast<int>(y0); y < y1; ++y) {
            for (int x = 0; x < W; ++x) {
                const int64_t i = static_cast<int64_t>(y) * W + x;
                int nan_count = 0;
                for (int t = 0; t < T; ++t) nan_count += cube.pixel_missing(t, y, x);
                if (static_cast<double>(nan_count) > params.low_coverage_fraction * T) {
                    map.low_coverage[i] = 1;
                    continue;
                }
                const EvidenceTrace trace = detect_pixel(model, pixel_series(cube, y, x), params);
                if (trace.declared) {
                    map.change_index[i] = *trace.declared;
                    map.final_evidence[i] = static_cast<float>(trace.final_evidence);
                }
            }
        }
    });
    return map;
}

} // namespace

ChangeMap detect_cube(const ForestModel& model, const DataCube& cube,
                      const DetectorParams& params, int threads) {
    params.validate();
    if (cube.n_time() != model.n_time || cube.n_vars() != model.n_vars)
        throw validation_error("cube", "cube shape does not match the fitted model");
    return params.mode == DetectorMode::coherent
               ? detect_cube_coherent(model, cube, params, threads)
               : detect_cube_literal(model, cube, params, threads);
}

void write_trace_csv(const std::string& path, const EvidenceTrace& trace,
                     const std::vector<Date>& dates) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw io_error(path, "cannot open for writing");
    f << "t,date,p,threshold,lambda,below,skipped\n";
    for (size_t t = 0; t < trace.steps.size(); ++t) {
        const auto& s = trace.steps[t];
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g", s.p, s.threshold, s.lambda);
        f << t << "," << (t < dates.size() ? format_date(dates[t]) : "") << "," << buf << ","
          << (s.below ? 1 : 0) << "," << (s.skipped ? 1 : 0) << "\n";
    }
    if (!f) throw io_error(path, "write failed");
}

} // namespace fcd
