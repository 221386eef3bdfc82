// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0
//
// Brute-force reference implementations used as test oracles. These stay
// deliberately naive (linear scans, full sorts, quadruple loops, std::exp)
// and independent of the kernel/production code paths they check.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fcd/datacube.hpp"
#include "fcd/forest_model.hpp"
#include "fcd/nlm.hpp"

namespace oracle {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Linear scan over the edge array: k with edges[k] <= x < edges[k+1], top
/// edge into the last bin, out-of-range clamped to the nearest edge bin.
inline int bin_scan(double x, const std::vector<double>& edges) {
    const int B = static_cast<int>(edges.size()) - 1;
    if (x < edges[0]) return 0;
    if (x >= edges[B]) return B - 1;
    for (int b = 0; b < B; ++b)
        if (x >= edges[b] && x < edges[b + 1]) return b;
    return B - 1; // unreachable for finite x
}

struct NaiveModel {
    std::vector<std::vector<double>> edges; // taken from the model under test
    int n_bins = 0, n_time = 0, n_vars = 0;
    double epsilon = 0;
    std::vector<int64_t> counts; // [t][v][b]
    std::vector<int64_t> totals; // [t]

    int64_t count_at(int t, int v, int b) const {
        return counts[(static_cast<int64_t>(t) * n_vars + v) * n_bins + b];
    }
};

inline NaiveModel naive_fit(const fcd::DataCube& cube, const fcd::ForestMask& mask,
                            const std::vector<std::vector<double>>& edges, double epsilon) {
    NaiveModel m;
    m.edges = edges;
    m.n_bins = static_cast<int>(edges[0].size()) - 1;
    m.n_time = cube.n_time();
    m.n_vars = cube.n_vars();
    m.epsilon = epsilon;
    m.counts.assign(static_cast<int64_t>(m.n_time) * m.n_vars * m.n_bins, 0);
    m.totals.assign(m.n_time, 0);
    for (int t = 0; t < m.n_time; ++t) {
        for (int y = 0; y < cube.height; ++y) {
            for (int x = 0; x < cube.width; ++x) {
                if (!mask.at(y, x) || cube.pixel_missing(t, y, x)) continue;
                ++m.totals[t];
                for (int v = 0; v < m.n_vars; ++v) {
                    const int b = bin_scan(cube.at(t, v, y, x), edges[v]);
                    ++m.counts[(static_cast<int64_t>(t) * m.n_vars + v) * m.n_bins + b];
                }
            }
        }
    }
    return m;
}

inline double naive_similarity(const NaiveModel& m, double x, int t, int v) {
    if (std::isnan(x) || m.totals[t] == 0) return kNaN;
    const int b = bin_scan(x, m.edges[v]);
    const double p = static_cast<double>(m.count_at(t, v, b)) / static_cast<double>(m.totals[t]);
    return std::max(p, m.epsilon);
}

inline double naive_joint(const NaiveModel& m, const fcd::DataCube& cube, int t, int y, int x) {
    double p = 1.0;
    for (int v = 0; v < m.n_vars; ++v) {
        const double pv = naive_similarity(m, cube.at(t, v, y, x), t, v);
        if (std::isnan(pv)) return kNaN;
        p = p * pv;
    }
    return p;
}

/// Full-sort nearest-rank (lower) quantiles of the masked joint similarities.
inline std::vector<double> naive_thresholds(const NaiveModel& m, const fcd::DataCube& cube,
                                            const fcd::ForestMask& mask, double q) {
    std::vector<double> thr(m.n_time, kNaN);
    for (int t = 0; t < m.n_time; ++t) {
        if (m.totals[t] == 0) continue;
        std::vector<double> sims;
        for (int y = 0; y < cube.height; ++y)
            for (int x = 0; x < cube.width; ++x) {
                if (!mask.at(y, x) || cube.pixel_missing(t, y, x)) continue;
                sims.push_back(naive_joint(m, cube, t, y, x));
            }
        std::sort(sims.begin(), sims.end());
        const int64_t M = static_cast<int64_t>(sims.size());
        int64_t rank = static_cast<int64_t>(std::ceil(q * static_cast<double>(M))) - 1;
        if (rank < 0) rank = 0;
        if (rank > M - 1) rank = M - 1;
        thr[t] = sims[rank];
    }
    return thr;
}

struct NaiveTrace {
    std::vector<double> lambda;
    std::vector<bool> skipped;
    int declared = -1;
    double final_evidence = kNaN;
};

/// Coherent-mode evidence recurrence, written out longhand.
inline NaiveTrace naive_detect_pixel(const NaiveModel& m, const std::vector<double>& thresholds,
                                     const fcd::DataCube& cube, int y, int x, double L) {
    NaiveTrace out;
    double lam = 1.0;
    for (int t = 0; t < m.n_time; ++t) {
        const double p = naive_joint(m, cube, t, y, x);
        if (std::isnan(p) || std::isnan(thresholds[t])) {
            out.lambda.push_back(lam);
            out.skipped.push_back(true);
            continue;
        }
        if (p >= thresholds[t]) {
            lam = 1.0;
        } else {
            const double base = std::max(lam, 1.0);
            lam = base * (thresholds[t] / p);
        }
        out.lambda.push_back(lam);
        out.skipped.push_back(false);
        if (out.declared < 0 && lam >= L) {
            out.declared = t;
            out.final_evidence = lam;
        }
    }
    return out;
}

struct NaiveConfusion {
    int64_t tp = 0, fp = 0, tn = 0, fn = 0, excluded = 0;
};

inline NaiveConfusion naive_confusion(const fcd::ChangeMap& map,
                                      const fcd::ReferenceChangeMap& ref) {
    NaiveConfusion c;
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            const int64_t i = static_cast<int64_t>(y) * map.width + x;
            if (map.low_coverage[i]) {
                ++c.excluded;
                continue;
            }
            const bool d = map.change_index[i] >= 0;
            const bool a = ref.change_index[i] >= 0;
            if (d && a) ++c.tp;
            if (d && !a) ++c.fp;
            if (!d && a) ++c.fn;
            if (!d && !a) ++c.tn;
        }
    }
    return c;
}

/// Direct per-pixel NLM with std::exp; sigma and h must be resolved by the
/// caller (one value per variable).
inline fcd::DataCube naive_nlm(const fcd::DataCube& cube, const fcd::NlmParams& params,
                               const std::vector<double>& sigma_per_var,
                               const std::vector<double>& h_per_var) {
    const int W = cube.width, H = cube.height, T = cube.n_time(), nv = cube.n_vars();
    const int pr = params.patch_radius, sr = params.search_radius_xy, st = params.search_radius_t;
    const double sp = pr > 0 ? pr : 1.0;
    fcd::DataCube out = cube;

    auto gauss = [&](int u, int vv) { return std::exp(-(u * u + vv * vv) / (2.0 * sp * sp)); };

    for (int v = 0; v < nv; ++v) {
        const double sub = 2.0 * sigma_per_var[v] * sigma_per_var[v];
        const double inv_h2 = 1.0 / (h_per_var[v] * h_per_var[v]);
        for (int t = 0; t < T; ++t) {
            for (int y = 0; y < H; ++y) {
                for (int x = 0; x < W; ++x) {
                    if (std::isnan(cube.at(t, v, y, x))) {
                        out.at(t, v, y, x) = std::numeric_limits<float>::quiet_NaN();
                        continue;
                    }
                    double num = 0, den = 0;
                    for (int dt = -st; dt <= st; ++dt) {
                        const int tt = t + dt;
                        if (tt < 0 || tt >= T) continue;
                        for (int dy = -sr; dy <= sr; ++dy) {
                            const int yy = y + dy;
                            if (yy < 0 || yy >= H) continue;
                            for (int dx = -sr; dx <= sr; ++dx) {
                                const int xx = x + dx;
                                if (xx < 0 || xx >= W) continue;
                                const float nb = cube.at(tt, v, yy, xx);
                                if (std::isnan(nb)) continue;
                                double d2num = 0, d2den = 0;
                                for (int py = -pr; py <= pr; ++py) {
                                    for (int px = -pr; px <= pr; ++px) {
                                        const int ay = y + py, ax = x + px;
                                        const int by = yy + py, bx = xx + px;
                                        if (ay < 0 || ay >= H || ax < 0 || ax >= W) continue;
                                        if (by < 0 || by >= H || bx < 0 || bx >= W) continue;
                                        const float a = cube.at(t, v, ay, ax);
                                        const float b = cube.at(tt, v, by, bx);
                                        if (std::isnan(a) || std::isnan(b)) continue;
                                        const double g = gauss(px, py);
                                        d2num += g * (a - b) * (a - b);
                                        d2den += g;
                                    }
                                }
                                if (d2den <= 0) continue;
                                const double d2 = d2num / d2den;
                                const double w = std::exp(-std::max(d2 - sub, 0.0) * inv_h2);
                                num += w * nb;
                                den += w;
                            }
                        }
                    }
                    out.at(t, v, y, x) = static_cast<float>(num / den);
                }
            }
        }
    }
    return out;
}

} // namespace oracle
