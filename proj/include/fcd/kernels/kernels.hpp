// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0
//
// Inner-loop kernels behind the denoiser and the change detector.
//
// Every kernel is elementwise: output element i is a fixed sequence of IEEE
// operations on input elements at i (plus gathers/constants). That makes the
// scalar reference and the SIMD variants bit-identical, which the test suite
// asserts on randomized inputs. To keep that guarantee, kernel sources are
// compiled with -ffp-contract=off and the SIMD code never uses FMA or
// cross-lane reductions.

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace fcd::kernels {

struct Kernels {
    const char* name;

    // vals[i] = isnan(src[i]) ? 0 : src[i];  mask[i] = isnan(src[i]) ? 0 : 1
    void (*mask_vals)(float* vals, float* mask, const float* src, int n);

    // m[i] = ma[i]*mb[i];  sq[i] = m[i] * (va[i]-vb[i])^2
    // Inputs are zero-filled where masked, so the products stay finite.
    void (*masked_sq_diff)(float* sq, float* m, const float* va, const float* ma,
                           const float* vb, const float* mb, int n);

    // dst[i] = sum_{k=-r..r} taps[k+r] * src[i+k], ascending k.
    // src must be readable on [i-r, i+r] for every i in [0, n).
    void (*conv_row)(float* dst, const float* src, int n, const float* taps, int r);

    // dst[i] += a * src[i]
    void (*axpy)(float* dst, const float* src, float a, int n);

    // w[i] = den[i] > 0 ? exp(-max(num[i]/den[i] - sub, 0) * inv_h2) : 0
    // using the deterministic exp_neg below.
    void (*nlm_weights)(float* w, const float* num, const float* den, float sub,
                        float inv_h2, int n);

    // dst[i] *= src[i]
    void (*mul_f32)(float* dst, const float* src, int n);
    void (*mul_f64)(double* dst, const double* src, int n);

    // num[i] += w[i]*v[i];  den[i] += w[i]   (double accumulators)
    void (*accum_weighted)(double* num, double* den, const float* w, const float* v, int n);

    // p[i] = probs[bin_index(x[i])], NaN in -> NaN out. Binning must agree
    // exactly with fcd::kernels::bin_index.
    void (*similarity_row)(double* p, const float* x, const double* probs,
                           const double* edges, double e0, double inv_bw, int nbins, int n);

    // Cumulative evidence update for one timestep across a row of pixels:
    //   if isnan(p[i])          : skip (carry lam)
    //   else if p[i] >= thr     : lam[i] = 1
    //   else                    : lam[i] = max(lam[i], 1) * (thr / p[i])
    //   declare: if tindex[i] < 0 and lam[i] >= L: tindex[i] = t, evidence[i] = lam[i]
    void (*lambda_row)(double* lam, int32_t* tindex, double* evidence, const double* p,
                       double thr, double L, int32_t t, int n);
};

const Kernels& scalar_kernels();
const Kernels* avx2_kernels(); // nullptr off x86 or when the CPU lacks AVX2
const Kernels* neon_kernels(); // nullptr off aarch64

/// Best available variant; the FCD_SIMD environment variable
/// (scalar|avx2|neon) forces a specific one.
const Kernels& active_kernels();

/// All variants usable on this machine, scalar first. For equivalence tests.
std::vector<const Kernels*> available_kernels();

/// exp(-x) for x >= 0 as float, identical bit pattern from the scalar and
/// SIMD paths. Relative error is about 3e-7 + 1.5e-7*x (the float range
/// reduction scales error with the argument); underflows to exactly 0 beyond
/// x > 125*ln2. Not a general expf: negative x is clamped to x = 0.
float exp_neg(float x);

/// Bin index for uniform-width histogram edges, defined as the linear-scan
/// result over the stored edge array: edges[k] <= x < edges[k+1], with the
/// top edge falling in the last bin and out-of-range values clamped to the
/// nearest edge bin. The floor() fast path can be one bin off after float
/// rounding; the scan against stored edges corrects it.
inline int bin_index(double x, double e0, double inv_bw, const double* edges, int nbins) {
    // Clamp in the double domain; x may sit arbitrarily far outside the edges.
    double fk = std::floor((x - e0) * inv_bw);
    const double top = static_cast<double>(nbins - 1);
    if (!(fk > 0.0)) fk = 0.0;
    if (fk > top) fk = top;
    int k = static_cast<int>(fk);
    for (int it = 0; it < 2; ++it) {
        if (k > 0 && x < edges[k])
            --k;
        else if (k + 1 < nbins && x >= edges[k + 1])
            ++k;
    }
    return k;
}

} // namespace fcd::kernels
