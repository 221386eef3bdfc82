// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0
//
// AVX2 kernel variant. Compiled with -mavx2; only reachable through the
// dispatch table after a runtime CPU check. Each lane performs exactly the
// operation sequence of the scalar reference in kernel_common.hpp — no FMA,
// no reassociation — so outputs are bit-identical to it.

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include "kernel_common.hpp"

namespace fcd::kernels {
namespace {

using detail::kExpClamp;
using detail::kLog2E;

inline __m256 exp_neg_v8(__m256 x) {
    const __m256 zero = _mm256_setzero_ps();
    const __m256 xc = _mm256_max_ps(x, zero);
    const __m256 t = _mm256_mul_ps(xc, _mm256_set1_ps(kLog2E));
    const __m256 mt = _mm256_sub_ps(zero, t);
    const __m256 mtc = _mm256_max_ps(mt, _mm256_set1_ps(-kExpClamp));
    const __m256 k = _mm256_round_ps(mtc, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    const __m256 f = _mm256_sub_ps(mtc, k);
    __m256 p = _mm256_set1_ps(detail::kP6);
    p = _mm256_add_ps(_mm256_mul_ps(p, f), _mm256_set1_ps(detail::kP5));
    p = _mm256_add_ps(_mm256_mul_ps(p, f), _mm256_set1_ps(detail::kP4));
    p = _mm256_add_ps(_mm256_mul_ps(p, f), _mm256_set1_ps(detail::kP3));
    p = _mm256_add_ps(_mm256_mul_ps(p, f), _mm256_set1_ps(detail::kP2));
    p = _mm256_add_ps(_mm256_mul_ps(p, f), _mm256_set1_ps(detail::kP1));
    p = _mm256_add_ps(_mm256_mul_ps(p, f), _mm256_set1_ps(detail::kP0));
    const __m256i ki = _mm256_cvtps_epi32(k);
    const __m256i bits = _mm256_slli_epi32(_mm256_add_epi32(ki, _mm256_set1_epi32(127)), 23);
    const __m256 r = _mm256_mul_ps(p, _mm256_castsi256_ps(bits));
    const __m256 big = _mm256_cmp_ps(t, _mm256_set1_ps(kExpClamp), _CMP_GT_OQ);
    return _mm256_andnot_ps(big, r);
}

void ax_mask_vals(float* vals, float* mask, const float* src, int n) {
    const __m256 one = _mm256_set1_ps(1.0f);
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 s = _mm256_loadu_ps(src + i);
        const __m256 nan = _mm256_cmp_ps(s, s, _CMP_UNORD_Q);
        _mm256_storeu_ps(vals + i, _mm256_andnot_ps(nan, s));
        _mm256_storeu_ps(mask + i, _mm256_andnot_ps(nan, one));
    }
    detail::sk_mask_vals(vals + i, mask + i, src + i, n - i);
}

void ax_masked_sq_diff(float* sq, float* m, const float* va, const float* ma,
                       const float* vb, const float* mb, int n) {
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 mm = _mm256_mul_ps(_mm256_loadu_ps(ma + i), _mm256_loadu_ps(mb + i));
        const __m256 d = _mm256_sub_ps(_mm256_loadu_ps(va + i), _mm256_loadu_ps(vb + i));
        _mm256_storeu_ps(m + i, mm);
        _mm256_storeu_ps(sq + i, _mm256_mul_ps(mm, _mm256_mul_ps(d, d)));
    }
    detail::sk_masked_sq_diff(sq + i, m + i, va + i, ma + i, vb + i, mb + i, n - i);
}

void ax_conv_row(float* dst, const float* src, int n, const float* taps, int r) {
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 acc = _mm256_mul_ps(_mm256_set1_ps(taps[0]), _mm256_loadu_ps(src + i - r));
        for (int k = 1; k <= 2 * r; ++k) {
            const __m256 term =
                _mm256_mul_ps(_mm256_set1_ps(taps[k]), _mm256_loadu_ps(src + i - r + k));
            acc = _mm256_add_ps(acc, term);
        }
        _mm256_storeu_ps(dst + i, acc);
    }
    detail::sk_conv_row(dst + i, src + i, n - i, taps, r);
}

void ax_axpy(float* dst, const float* src, float a, int n) {
    const __m256 av = _mm256_set1_ps(a);
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 term = _mm256_mul_ps(av, _mm256_loadu_ps(src + i));
        _mm256_storeu_ps(dst + i, _mm256_add_ps(_mm256_loadu_ps(dst + i), term));
    }
    detail::sk_axpy(dst + i, src + i, a, n - i);
}

void ax_nlm_weights(float* w, const float* num, const float* den, float sub, float inv_h2,
                    int n) {
    const __m256 zero = _mm256_setzero_ps();
    const __m256 subv = _mm256_set1_ps(sub);
    const __m256 ih2 = _mm256_set1_ps(inv_h2);
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 dv = _mm256_loadu_ps(den + i);
        const __m256 d2 = _mm256_div_ps(_mm256_loadu_ps(num + i), dv);
        const __m256 excess = _mm256_sub_ps(d2, subv);
        const __m256 arg = _mm256_mul_ps(_mm256_max_ps(excess, zero), ih2);
        const __m256 e = exp_neg_v8(arg);
        const __m256 pos = _mm256_cmp_ps(dv, zero, _CMP_GT_OQ);
        _mm256_storeu_ps(w + i, _mm256_and_ps(pos, e));
    }
    detail::sk_nlm_weights(w + i, num + i, den + i, sub, inv_h2, n - i);
}

void ax_mul_f32(float* dst, const float* src, int n) {
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_ps(dst + i, _mm256_mul_ps(_mm256_loadu_ps(dst + i), _mm256_loadu_ps(src + i)));
    }
    detail::sk_mul_f32(dst + i, src + i, n - i);
}

void ax_mul_f64(double* dst, const double* src, int n) {
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(dst + i), _mm256_loadu_pd(src + i)));
    }
    detail::sk_mul_f64(dst + i, src + i, n - i);
}

void ax_accum_weighted(double* num, double* den, const float* w, const float* v, int n) {
    int i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 w8 = _mm256_loadu_ps(w + i);
        const __m256 v8 = _mm256_loadu_ps(v + i);
        const __m256d wlo = _mm256_cvtps_pd(_mm256_castps256_ps128(w8));
        const __m256d whi = _mm256_cvtps_pd(_mm256_extractf128_ps(w8, 1));
        const __m256d vlo = _mm256_cvtps_pd(_mm256_castps256_ps128(v8));
        const __m256d vhi = _mm256_cvtps_pd(_mm256_extractf128_ps(v8, 1));
        _mm256_storeu_pd(num + i,
                         _mm256_add_pd(_mm256_loadu_pd(num + i), _mm256_mul_pd(wlo, vlo)));
        _mm256_storeu_pd(num + i + 4,
                         _mm256_add_pd(_mm256_loadu_pd(num + i + 4), _mm256_mul_pd(whi, vhi)));
        _mm256_storeu_pd(den + i, _mm256_add_pd(_mm256_loadu_pd(den + i), wlo));
        _mm256_storeu_pd(den + i + 4, _mm256_add_pd(_mm256_loadu_pd(den + i + 4), whi));
    }
    detail::sk_accum_weighted(num + i, den + i, w + i, v + i, n - i);
}

inline __m128i mask64_to_mask32(__m256d m) {
    const __m256i mi = _mm256_castpd_si256(m);
    const __m128i lo = _mm256_castsi256_si128(mi);
    const __m128i hi = _mm256_extracti128_si256(mi, 1);
    return _mm_castps_si128(
        _mm_shuffle_ps(_mm_castsi128_ps(lo), _mm_castsi128_ps(hi), _MM_SHUFFLE(2, 0, 2, 0)));
}

void ax_similarity_row(double* p, const float* x, const double* probs, const double* edges,
                       double e0, double inv_bw, int nbins, int n) {
    const __m256d e0v = _mm256_set1_pd(e0);
    const __m256d ibwv = _mm256_set1_pd(inv_bw);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d topv = _mm256_set1_pd(static_cast<double>(nbins - 1));
    const __m256d nanv = _mm256_set1_pd(std::numeric_limits<double>::quiet_NaN());
    const __m128i one32 = _mm_set1_epi32(1);
    const __m128i zero32 = _mm_setzero_si128();
    const __m128i nb1 = _mm_set1_epi32(nbins - 1);
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xd = _mm256_cvtps_pd(_mm_loadu_ps(x + i));
        const __m256d nanm = _mm256_cmp_pd(xd, xd, _CMP_UNORD_Q);
        const __m256d xs = _mm256_blendv_pd(xd, e0v, nanm);
        __m256d fk = _mm256_floor_pd(_mm256_mul_pd(_mm256_sub_pd(xs, e0v), ibwv));
        fk = _mm256_max_pd(fk, zero);
        fk = _mm256_min_pd(fk, topv);
        __m128i k = _mm256_cvttpd_epi32(fk);
        for (int it = 0; it < 2; ++it) {
            const __m256d ek = _mm256_i32gather_pd(edges, k, 8);
            const __m256d ek1 = _mm256_i32gather_pd(edges, _mm_add_epi32(k, one32), 8);
            const __m128i gt0 = _mm_cmpgt_epi32(k, zero32);
            const __m128i below = mask64_to_mask32(_mm256_cmp_pd(xs, ek, _CMP_LT_OQ));
            const __m128i condA = _mm_and_si128(gt0, below);
            const __m128i room = _mm_cmpgt_epi32(nb1, k);
            const __m128i above = mask64_to_mask32(_mm256_cmp_pd(xs, ek1, _CMP_GE_OQ));
            const __m128i condB = _mm_andnot_si128(condA, _mm_and_si128(room, above));
            k = _mm_sub_epi32(k, _mm_and_si128(condA, one32));
            k = _mm_add_epi32(k, _mm_and_si128(condB, one32));
        }
        const __m256d pv = _mm256_i32gather_pd(probs, k, 8);
        _mm256_storeu_pd(p + i, _mm256_blendv_pd(pv, nanv, nanm));
    }
    detail::sk_similarity_row(p + i, x + i, probs, edges, e0, inv_bw, nbins, n - i);
}

void ax_lambda_row(double* lam, int32_t* tindex, double* evidence, const double* p, double thr,
                   double L, int32_t t, int n) {
    const __m256d thrv = _mm256_set1_pd(thr);
    const __m256d Lv = _mm256_set1_pd(L);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m128i tv = _mm_set1_epi32(t);
    const __m128i zero32 = _mm_setzero_si128();
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d pv = _mm256_loadu_pd(p + i);
        const __m256d nanm = _mm256_cmp_pd(pv, pv, _CMP_UNORD_Q);
        const __m256d lamv = _mm256_loadu_pd(lam + i);
        const __m256d reset = _mm256_cmp_pd(pv, thrv, _CMP_GE_OQ);
        const __m256d base = _mm256_max_pd(lamv, one);
        const __m256d acc = _mm256_mul_pd(base, _mm256_div_pd(thrv, pv));
        __m256d nl = _mm256_blendv_pd(acc, one, reset);
        nl = _mm256_blendv_pd(nl, lamv, nanm);
        _mm256_storeu_pd(lam + i, nl);

        __m128i ti = _mm_loadu_si128(reinterpret_cast<const __m128i*>(tindex + i));
        const __m128i undecl = _mm_cmpgt_epi32(zero32, ti);
        const __m128i cross = mask64_to_mask32(_mm256_cmp_pd(nl, Lv, _CMP_GE_OQ));
        const __m128i decl = _mm_and_si128(undecl, cross);
        ti = _mm_blendv_epi8(ti, tv, decl);
        _mm_storeu_si128(reinterpret_cast<__m128i*>(tindex + i), ti);

        const __m256d decl64 = _mm256_castsi256_pd(_mm256_cvtepi32_epi64(decl));
        const __m256d ev = _mm256_loadu_pd(evidence + i);
        _mm256_storeu_pd(evidence + i, _mm256_blendv_pd(ev, nl, decl64));
    }
    detail::sk_lambda_row(lam + i, tindex + i, evidence + i, p + i, thr, L, t, n - i);
}

} // namespace

// Referenced by dispatch.cpp after its runtime AVX2 check.
const Kernels* avx2_table() {
    static const Kernels k = {
        "avx2",          &ax_mask_vals, &ax_masked_sq_diff, &ax_conv_row,
        &ax_axpy,        &ax_nlm_weights, &ax_mul_f32,      &ax_mul_f64,
        &ax_accum_weighted, &ax_similarity_row, &ax_lambda_row,
    };
    return &k;
}

} // namespace fcd::kernels

#endif // x86
