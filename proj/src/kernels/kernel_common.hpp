// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0
//
// Scalar reference implementations. The SIMD variants in avx2.cpp / neon.cpp
// mirror these operation-for-operation and use them for loop tails, so any
// edit here is an edit to the contract the equivalence tests enforce.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

#include "fcd/kernels/kernels.hpp"

namespace fcd::kernels::detail {

// Shared constants; the SIMD code must broadcast these exact literals.
inline constexpr float kLog2E = 1.44269504f;
inline constexpr float kExpClamp = 125.0f;
inline constexpr float kP0 = 1.0f;
inline constexpr float kP1 = 6.93147182e-1f;
inline constexpr float kP2 = 2.40226507e-1f;
inline constexpr float kP3 = 5.55041087e-2f;
inline constexpr float kP4 = 9.61812911e-3f;
inline constexpr float kP5 = 1.33335581e-3f;
inline constexpr float kP6 = 1.54035306e-4f;

// exp(-x), x >= 0, via 2^k * 2^f with f in [-0.5, 0.5]. Plain mul/add only
// (no fma, no libm) so lanes of the SIMD version match this bit-for-bit.
inline float exp_neg_impl(float x) {
    const float xc = (x > 0.0f) ? x : 0.0f;
    const float t = xc * kLog2E;
    const float mt = 0.0f - t;
    const float mtc = (mt > -kExpClamp) ? mt : -kExpClamp;
    const float k = std::nearbyintf(mtc);
    const float f = mtc - k;
    float p = kP6;
    p = p * f + kP5;
    p = p * f + kP4;
    p = p * f + kP3;
    p = p * f + kP2;
    p = p * f + kP1;
    p = p * f + kP0;
    const int ki = static_cast<int>(k);
    const float scale = std::bit_cast<float>(static_cast<uint32_t>(ki + 127) << 23);
    const float r = p * scale;
    return (t > kExpClamp) ? 0.0f : r;
}

inline void sk_mask_vals(float* vals, float* mask, const float* src, int n) {
    for (int i = 0; i < n; ++i) {
        const float s = src[i];
        const bool nan = std::isnan(s);
        vals[i] = nan ? 0.0f : s;
        mask[i] = nan ? 0.0f : 1.0f;
    }
}

inline void sk_masked_sq_diff(float* sq, float* m, const float* va, const float* ma,
                              const float* vb, const float* mb, int n) {
    for (int i = 0; i < n; ++i) {
        const float mm = ma[i] * mb[i];
        const float d = va[i] - vb[i];
        m[i] = mm;
        sq[i] = mm * (d * d);
    }
}

inline void sk_conv_row(float* dst, const float* src, int n, const float* taps, int r) {
    for (int i = 0; i < n; ++i) {
        float acc = taps[0] * src[i - r];
        for (int k = 1; k <= 2 * r; ++k) acc = acc + taps[k] * src[i - r + k];
        dst[i] = acc;
    }
}

inline void sk_axpy(float* dst, const float* src, float a, int n) {
    for (int i = 0; i < n; ++i) dst[i] = dst[i] + a * src[i];
}

inline void sk_nlm_weights(float* w, const float* num, const float* den, float sub,
                           float inv_h2, int n) {
    for (int i = 0; i < n; ++i) {
        const float d2 = num[i] / den[i];
        const float excess = d2 - sub;
        const float arg = ((excess > 0.0f) ? excess : 0.0f) * inv_h2;
        const float e = exp_neg_impl(arg);
        w[i] = (den[i] > 0.0f) ? e : 0.0f;
    }
}

inline void sk_mul_f32(float* dst, const float* src, int n) {
    for (int i = 0; i < n; ++i) dst[i] = dst[i] * src[i];
}

inline void sk_mul_f64(double* dst, const double* src, int n) {
    for (int i = 0; i < n; ++i) dst[i] = dst[i] * src[i];
}

inline void sk_accum_weighted(double* num, double* den, const float* w, const float* v, int n) {
    for (int i = 0; i < n; ++i) {
        const double wd = static_cast<double>(w[i]);
        num[i] = num[i] + wd * static_cast<double>(v[i]);
        den[i] = den[i] + wd;
    }
}

inline void sk_similarity_row(double* p, const float* x, const double* probs,
                              const double* edges, double e0, double inv_bw, int nbins, int n) {
    for (int i = 0; i < n; ++i) {
        const float xf = x[i];
        if (std::isnan(xf)) {
            p[i] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const int k = bin_index(static_cast<double>(xf), e0, inv_bw, edges, nbins);
        p[i] = probs[k];
    }
}

inline void sk_lambda_row(double* lam, int32_t* tindex, double* evidence, const double* p,
                          double thr, double L, int32_t t, int n) {
    for (int i = 0; i < n; ++i) {
        const double pi = p[i];
        if (std::isnan(pi)) continue;
        double l = lam[i];
        if (pi >= thr) {
            l = 1.0;
        } else {
            const double base = (l > 1.0) ? l : 1.0;
            l = base * (thr / pi);
        }
        lam[i] = l;
        if (tindex[i] < 0 && l >= L) {
            tindex[i] = t;
            evidence[i] = l;
        }
    }
}

} // namespace fcd::kernels::detail
