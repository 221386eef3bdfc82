// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "fcd/datacube.hpp"

namespace fcd {

/// Shared-across-time histogram geometry: per variable, n_bins uniform bins
/// whose edges span the masked data range expanded by 1% on each side.
struct HistogramSpec {
    int n_bins = 64;
    std::vector<std::vector<double>> edges; // per variable, n_bins+1 ascending

    void validate() const;
};

/// Reference-class statistics: per-(timestep, variable) histogram counts,
/// epsilon-floored bin probabilities, and the per-timestep joint-similarity
/// quantile thresholds the detector compares against.
struct ForestModel {
    HistogramSpec spec;
    std::vector<std::string> variables;
    int n_time = 0;
    int n_vars = 0;
    double epsilon = 1e-6;
    double q = 0.0; // quantile level; 0 until quantile_thresholds ran

    std::vector<int64_t> counts; // [t][v][b]
    std::vector<int64_t> totals; // [t] masked non-NaN pixels (same for all v)
    std::vector<double> probs;   // [t][v][b] = max(count/total, epsilon)
    std::vector<double> thresholds; // [t], NaN when unusable
    std::vector<uint8_t> usable;    // [t] totals[t] > 0

    int64_t count_at(int t, int v, int b) const {
        return counts[(static_cast<int64_t>(t) * n_vars + v) * spec.n_bins + b];
    }
    const double* prob_row(int t, int v) const {
        return probs.data() + (static_cast<int64_t>(t) * n_vars + v) * spec.n_bins;
    }
};

struct ModelParams {
    int n_bins = 64;
    double q = 0.05;
    double epsilon = 1e-6;

    void validate() const;
};

/// Counts stage: shared edges from the masked data range, then one exact
/// increment per masked non-NaN value per variable. Timesteps with no valid
/// masked pixel are flagged unusable instead of failing the fit.
ForestModel build_histograms(const DataCube& cube, const ForestMask& mask, int n_bins,
                             double epsilon = 1e-6, int threads = 0);

/// Per-variable similarity p_{i,t}(x): epsilon-floored bin mass, values
/// outside the edges clamped to the nearest edge bin. NaN in -> NaN out.
double similarity(const ForestModel& model, double x, int t, int v);

/// Joint similarity: product of per-variable similarities, ascending
/// variable order. Any NaN component -> NaN. `values[v * stride]` holds the
/// pixel value for variable v.
double joint_similarity(const ForestModel& model, const float* values, int64_t stride, int t);

/// Fills model.thresholds with the q-th quantile (nearest-rank, lower) of
/// the masked pixels' joint similarities at each usable timestep, so the
/// fraction of masked pixels strictly below the threshold never exceeds q.
void quantile_thresholds(ForestModel& model, const DataCube& cube, const ForestMask& mask,
                         double q, int threads = 0);

/// build_histograms + quantile_thresholds.
ForestModel fit_forest_model(const DataCube& cube, const ForestMask& mask,
                             const ModelParams& params, int threads = 0);

void save_model(const ForestModel& model, const std::string& path);
ForestModel load_model(const std::string& path);

} // namespace fcd
