// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0
//
// NEON kernel variant (aarch64 baseline, no runtime check needed). Mirrors
// kernel_common.hpp lane-for-lane. Ternaries in the scalar code become
// compare+bsl here — NEON vmaxq propagates NaN where the scalar reference
// must select the other operand, so vmaxq is deliberately avoided.
// similarity_row and lambda_row stay on the scalar path: they are gather- and
// int32-blend-heavy and not worth diverging for.

#if defined(__aarch64__)

#include <arm_neon.h>

#include "kernel_common.hpp"

namespace fcd::kernels {
namespace {

using detail::kExpClamp;
using detail::kLog2E;

inline float32x4_t select(uint32x4_t c, float32x4_t a, float32x4_t b) {
    return vbslq_f32(c, a, b);
}

inline float32x4_t exp_neg_v4(float32x4_t x) {
    const float32x4_t zero = vdupq_n_f32(0.0f);
    const float32x4_t xc = select(vcgtq_f32(x, zero), x, zero);
    const float32x4_t t = vmulq_f32(xc, vdupq_n_f32(kLog2E));
    const float32x4_t mt = vsubq_f32(zero, t);
    const float32x4_t nclamp = vdupq_n_f32(-kExpClamp);
    const float32x4_t mtc = select(vcgtq_f32(mt, nclamp), mt, nclamp);
    const float32x4_t k = vrndnq_f32(mtc);
    const float32x4_t f = vsubq_f32(mtc, k);
    float32x4_t p = vdupq_n_f32(detail::kP6);
    p = vaddq_f32(vmulq_f32(p, f), vdupq_n_f32(detail::kP5));
    p = vaddq_f32(vmulq_f32(p, f), vdupq_n_f32(detail::kP4));
    p = vaddq_f32(vmulq_f32(p, f), vdupq_n_f32(detail::kP3));
    p = vaddq_f32(vmulq_f32(p, f), vdupq_n_f32(detail::kP2));
    p = vaddq_f32(vmulq_f32(p, f), vdupq_n_f32(detail::kP1));
    p = vaddq_f32(vmulq_f32(p, f), vdupq_n_f32(detail::kP0));
    const int32x4_t ki = vcvtnq_s32_f32(k);
    const int32x4_t bits = vshlq_n_s32(vaddq_s32(ki, vdupq_n_s32(127)), 23);
    const float32x4_t r = vmulq_f32(p, vreinterpretq_f32_s32(bits));
    const uint32x4_t big = vcgtq_f32(t, vdupq_n_f32(kExpClamp));
    return select(big, zero, r);
}

void nn_mask_vals(float* vals, float* mask, const float* src, int n) {
    const float32x4_t zero = vdupq_n_f32(0.0f);
    const float32x4_t one = vdupq_n_f32(1.0f);
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        const float32x4_t s = vld1q_f32(src + i);
        const uint32x4_t ok = vceqq_f32(s, s);
        vst1q_f32(vals + i, select(ok, s, zero));
        vst1q_f32(mask + i, select(ok, one, zero));
    }
    detail::sk_mask_vals(vals + i, mask + i, src + i, n - i);
}

void nn_masked_sq_diff(float* sq, float* m, const float* va, const float* ma,
                       const float* vb, const float* mb, int n) {
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        const float32x4_t mm = vmulq_f32(vld1q_f32(ma + i), vld1q_f32(mb + i));
        const float32x4_t d = vsubq_f32(vld1q_f32(va + i), vld1q_f32(vb + i));
        vst1q_f32(m + i, mm);
        vst1q_f32(sq + i, vmulq_f32(mm, vmulq_f32(d, d)));
    }
    detail::sk_masked_sq_diff(sq + i, m + i, va + i, ma + i, vb + i, mb + i, n - i);
}

void nn_conv_row(float* dst, const float* src, int n, const float* taps, int r) {
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t acc = vmulq_f32(vdupq_n_f32(taps[0]), vld1q_f32(src + i - r));
        for (int k = 1; k <= 2 * r; ++k)
            acc = vaddq_f32(acc, vmulq_f32(vdupq_n_f32(taps[k]), vld1q_f32(src + i - r + k)));
        vst1q_f32(dst + i, acc);
    }
    detail::sk_conv_row(dst + i, src + i, n - i, taps, r);
}

void nn_axpy(float* dst, const float* src, float a, int n) {
    const float32x4_t av = vdupq_n_f32(a);
    int i = 0;
    for (; i + 4 <= n; i += 4)
        vst1q_f32(dst + i, vaddq_f32(vld1q_f32(dst + i), vmulq_f32(av, vld1q_f32(src + i))));
    detail::sk_axpy(dst + i, src + i, a, n - i);
}

void nn_nlm_weights(float* w, const float* num, const float* den, float sub, float inv_h2,
                    int n) {
    const float32x4_t zero = vdupq_n_f32(0.0f);
    const float32x4_t subv = vdupq_n_f32(sub);
    const float32x4_t ih2 = vdupq_n_f32(inv_h2);
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        const float32x4_t dv = vld1q_f32(den + i);
        const float32x4_t d2 = vdivq_f32(vld1q_f32(num + i), dv);
        const float32x4_t excess = vsubq_f32(d2, subv);
        const float32x4_t pos = select(vcgtq_f32(excess, zero), excess, zero);
        const float32x4_t e = exp_neg_v4(vmulq_f32(pos, ih2));
        vst1q_f32(w + i, select(vcgtq_f32(dv, zero), e, zero));
    }
    detail::sk_nlm_weights(w + i, num + i, den + i, sub, inv_h2, n - i);
}

void nn_mul_f32(float* dst, const float* src, int n) {
    int i = 0;
    for (; i + 4 <= n; i += 4) vst1q_f32(dst + i, vmulq_f32(vld1q_f32(dst + i), vld1q_f32(src + i)));
    detail::sk_mul_f32(dst + i, src + i, n - i);
}

void nn_mul_f64(double* dst, const double* src, int n) {
    int i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(dst + i, vmulq_f64(vld1q_f64(dst + i), vld1q_f64(src + i)));
    detail::sk_mul_f64(dst + i, src + i, n - i);
}

void nn_accum_weighted(double* num, double* den, const float* w, const float* v, int n) {
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        const float32x4_t w4 = vld1q_f32(w + i);
        const float32x4_t v4 = vld1q_f32(v + i);
        const float64x2_t wlo = vcvt_f64_f32(vget_low_f32(w4));
        const float64x2_t whi = vcvt_f64_f32(vget_high_f32(w4));
        const float64x2_t vlo = vcvt_f64_f32(vget_low_f32(v4));
        const float64x2_t vhi = vcvt_f64_f32(vget_high_f32(v4));
        vst1q_f64(num + i, vaddq_f64(vld1q_f64(num + i), vmulq_f64(wlo, vlo)));
        vst1q_f64(num + i + 2, vaddq_f64(vld1q_f64(num + i + 2), vmulq_f64(whi, vhi)));
        vst1q_f64(den + i, vaddq_f64(vld1q_f64(den + i), wlo));
        vst1q_f64(den + i + 2, vaddq_f64(vld1q_f64(den + i + 2), whi));
    }
    detail::sk_accum_weighted(num + i, den + i, w + i, v + i, n - i);
}

} // namespace

const Kernels* neon_table() {
    static const Kernels k = {
        "neon",          &nn_mask_vals, &nn_masked_sq_diff, &nn_conv_row,
        &nn_axpy,        &nn_nlm_weights, &nn_mul_f32,      &nn_mul_f64,
        &nn_accum_weighted, &detail::sk_similarity_row, &detail::sk_lambda_row,
    };
    return &k;
}

} // namespace fcd::kernels

#endif // aarch64
