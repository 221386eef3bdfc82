// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#include "kernel_common.hpp"

namespace fcd::kernels {

float exp_neg(float x) { return detail::exp_neg_impl(x); }

const Kernels& scalar_kernels() {
    static const Kernels k = {
        "scalar",
        &detail::sk_mask_vals,
        &detail::sk_masked_sq_diff,
        &detail::sk_conv_row,
        &detail::sk_axpy,
        &detail::sk_nlm_weights,
        &detail::sk_mul_f32,
        &detail::sk_mul_f64,
        &detail::sk_accum_weighted,
        &detail::sk_similarity_row,
        &detail::sk_lambda_row,
    };
    return k;
}

} // namespace fcd::kernels
