// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#include "fcd/nlm.hpp"

#include <algorithm>
#include <cstring>

#include "fcd/kernels/kernels.hpp"
#include "fcd/parallel.hpp"

namespace fcd {

void NlmParams::validate() const {
    if (patch_radius < 0) throw validation_error("patch_radius", "must be >= 0");
    if (search_radius_xy < 0) throw validation_error("search_radius_xy", "must be >= 0");
    if (search_radius_t < 0) throw validation_error("search_radius_t", "must be >= 0");
    if (h && !(*h > 0)) throw validation_error("h", "must be > 0");
    if (sigma && !(*sigma >= 0)) throw validation_error("sigma", "must be >= 0");
}

double estimate_noise_sigma(const DataCube& cube, int variable) {
    if (variable < 0 || variable >= cube.n_vars())
        throw validation_error("variable", "index " + std::to_string(variable) + " out of range");
    if (cube.width < 2 || cube.height < 2)
        throw validation_error("cube", "noise estimation needs at least 2x2 pixels");

    std::vector<float> diffs;
    diffs.reserve(static_cast<size_t>(cube.n_time()) * cube.height * (cube.width - 1));
    for (int t = 0; t < cube.n_time(); ++t) {
        const float* s = cube.slice(t, variable);
        for (int y = 0; y < cube.height; ++y) {
            const float* row = s + static_cast<int64_t>(y) * cube.width;
            for (int x = 0; x + 1 < cube.width; ++x) {
                const float a = row[x];
                const float b = row[x + 1];
                if (!std::isnan(a) && !std::isnan(b)) diffs.push_back(std::fabs(b - a));
            }
        }
    }
    if (diffs.empty())
        throw validation_error("cube", "variable " + cube.variables[variable] +
                                           " has no valid pixel pair (all NaN)");
    // Median of |d|; first differences of iid noise have std sigma*sqrt(2).
    const size_t mid = (diffs.size() - 1) / 2;
    std::nth_element(diffs.begin(), diffs.begin() + mid, diffs.end());
    return 1.4826 * static_cast<double>(diffs[mid]) / std::sqrt(2.0);
}

DataCube denoise_cube(const DataCube& cube, const NlmParams& params, int threads) {
    params.validate();
    cube.validate();

    const auto& K = kernels::active_kernels();
    const int W = cube.width, H = cube.height, T = cube.n_time(), nv = cube.n_vars();
    const int pr = params.patch_radius, sr = params.search_radius_xy, st = params.search_radius_t;
    const int pad = sr + pr;
    const int Wp = W + 2 * pad;
    const int sq_len = W + 2 * pr;

    // Gaussian patch taps, separable; center tap 1 so the denominator of a
    // valid center/neighbor pair is always positive.
    std::vector<float> taps(2 * pr + 1);
    const double sp = pr > 0 ? static_cast<double>(pr) : 1.0;
    for (int k = -pr; k <= pr; ++k)
        taps[k + pr] = static_cast<float>(std::exp(-(k * k) / (2.0 * sp * sp)));

    DataCube out = cube; // copies dims/dates/values; values overwritten below

    std::vector<float> vals(static_cast<size_t>(T) * H * Wp);
    std::vector<float> mask(static_cast<size_t>(T) * H * Wp);
    auto vrow = [&](std::vector<float>& buf, int t, int y) {
        return buf.data() + (static_cast<size_t>(t) * H + y) * Wp;
    };

    for (int v = 0; v < nv; ++v) {
        const double sigma = params.sigma ? *params.sigma : estimate_noise_sigma(cube, v);
        const double h = params.h ? *params.h : std::max(0.8 * sigma, 1e-6);
        const float sub = static_cast<float>(2.0 * sigma * sigma);
        const float inv_h2 = static_cast<float>(1.0 / (h * h));

        std::fill(vals.begin(), vals.end(), 0.0f);
        std::fill(mask.begin(), mask.end(), 0.0f);
        for (int t = 0; t < T; ++t) {
            const float* src = cube.slice(t, v);
            for (int y = 0; y < H; ++y)
                K.mask_vals(vrow(vals, t, y) + pad, vrow(mask, t, y) + pad,
                            src + static_cast<int64_t>(y) * W, W);
        }

        parallel_for(T, threads, [&](int64_t t0, int64_t t1) {
            std::vector<double> num(static_cast<size_t>(H) * W);
            std::vector<double> den(static_cast<size_t>(H) * W);
            std::vector<float> hnum(static_cast<size_t>(H) * W);
            std::vector<float> hden(static_cast<size_t>(H) * W);
            std::vector<float> sq(sq_len), m(sq_len);
            std::vector<float> d2num(W), d2den(W), wrow(W);

            for (int t = static_cast<int>(t0); t < t1; ++t) {
                std::fill(num.begin(), num.end(), 0.0);
                std::fill(den.begin(), den.end(), 0.0);

                for (int dt = -st; dt <= st; ++dt) {
                    const int tt = t + dt;
                    if (tt < 0 || tt >= T) continue;
                    for (int dy = -sr; dy <= sr; ++dy) {
                        for (int dx = -sr; dx <= sr; ++dx) {
                            // Horizontal patch pass over squared differences.
                            for (int y = 0; y < H; ++y) {
                                float* hn = hnum.data() + static_cast<size_t>(y) * W;
                                float* hd = hden.data() + static_cast<size_t>(y) * W;
                                const int yy = y + dy;
                                if (yy < 0 || yy >= H) {
                                    std::memset(hn, 0, sizeof(float) * W);
                                    std::memset(hd, 0, sizeof(float) * W);
                                    continue;
                                }
                                K.masked_sq_diff(sq.data(), m.data(),
                                                 vrow(vals, t, y) + pad - pr,
                                                 vrow(mask, t, y) + pad - pr,
                                                 vrow(vals, tt, yy) + pad - pr + dx,
                                                 vrow(mask, tt, yy) + pad - pr + dx, sq_len);
                                K.conv_row(hn, sq.data() + pr, W, taps.data(), pr);
                                K.conv_row(hd, m.data() + pr, W, taps.data(), pr);
                            }
                            // Vertical patch pass, weights, accumulation.
                            for (int y = 0; y < H; ++y) {
                                const int yy = y + dy;
                                if (yy < 0 || yy >= H) continue; // no neighbor center
                                std::fill(d2num.begin(), d2num.end(), 0.0f);
                                std::fill(d2den.begin(), d2den.end(), 0.0f);
                                for (int k = -pr; k <= pr; ++k) {
                                    const int yk = y + k;
                                    if (yk < 0 || yk >= H) continue;
                                    K.axpy(d2num.data(), hnum.data() + static_cast<size_t>(yk) * W,
                                           taps[k + pr], W);
                                    K.axpy(d2den.data(), hden.data() + static_cast<size_t>(yk) * W,
                                           taps[k + pr], W);
                                }
                                K.nlm_weights(wrow.data(), d2num.data(), d2den.data(), sub,
                                              inv_h2, W);
                                K.mul_f32(wrow.data(), vrow(mask, tt, yy) + pad + dx, W);
                                K.accum_weighted(num.data() + static_cast<size_t>(y) * W,
                                                 den.data() + static_cast<size_t>(y) * W,
                                                 wrow.data(), vrow(vals, tt, yy) + pad + dx, W);
                            }
                        }
                    }
                }

                float* dst = out.slice(t, v);
                for (int y = 0; y < H; ++y) {
                    const float* mc = vrow(mask, t, y) + pad;
                    const double* ny = num.data() + static_cast<size_t>(y) * W;
                    const double* dy_ = den.data() + static_cast<size_t>(y) * W;
                    float* drow = dst + static_cast<int64_t>(y) * W;
                    for (int x = 0; x < W; ++x)
                        drow[x] = mc[x] != 0.0f ? static_cast<float>(ny[x] / dy_[x])
                                                : std::numeric_limits<float>::quiet_NaN();
                }
            }
        });
    }
    return out;
}

} // namespace fcd
