// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "fcd/datacube.hpp"

namespace fcd {

/// Spatio-temporal non-local-means parameters. Patches are spatial
/// (2*patch_radius+1 square, Gaussian-weighted); the search window is
/// spatio-temporal. Filtering runs per variable in the data's native units.
struct NlmParams {
    int patch_radius = 1;    // 3x3 patches
    int search_radius_xy = 3; // 7x7 window
    int search_radius_t = 1;  // 3 time slices
    /// Filter strength; unset = 0.8 x the per-variable noise sigma estimate.
    std::optional<double> h;
    /// Noise sigma used in the weight offset; unset = estimated per variable.
    std::optional<double> sigma;

    void validate() const;
};

/// Robust noise sigma for one variable: 1.4826 * median(|horizontal first
/// differences|) / sqrt(2), pooled over all timesteps and rows. Zero on a
/// constant slice; throws when the variable holds no valid difference pair
/// (all-NaN data).
double estimate_noise_sigma(const DataCube& cube, int variable);

/// Weight-normalized average over the search window. For neighbor n of
/// center c at the same timestep offset, w = exp(-max(d2 - 2*sigma^2, 0)/h^2)
/// with d2 the Gaussian-weighted mean squared difference of their spatial
/// patches (NaN patch cells excluded, weights renormalized). NaN inputs stay
/// NaN and contribute nothing to their neighbors.
DataCube denoise_cube(const DataCube& cube, const NlmParams& params, int threads = 0);

} // namespace fcd
