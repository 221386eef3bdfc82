// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#include "fcd/forest_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "fcd/kernels/kernels.hpp"
#include "fcd/parallel.hpp"

namespace fcd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct EdgeCache {
    double e0;
    double inv_bw;
};

EdgeCache edge_cache(const std::vector<double>& edges) {
    const int B = static_cast<int>(edges.size()) - 1;
    const double bw = (edges[B] - edges[0]) / B;
    return {edges[0], 1.0 / bw};
}

void require_fitted(const ForestModel& m, int t) {
    if (t < 0 || t >= m.n_time)
        throw validation_error("t", "timestep " + std::to_string(t) + " outside [0, " +
                                        std::to_string(m.n_time) + ")");
}

std::vector<int64_t> masked_pixels(const DataCube& cube, const ForestMask& mask) {
    if (mask.width != cube.width || mask.height != cube.height)
        throw validation_error("mask", "dimensions " + std::to_string(mask.width) + "x" +
                                           std::to_string(mask.height) + " do not match cube " +
                                           std::to_string(cube.width) + "x" +
                                           std::to_string(cube.height));
    std::vector<int64_t> px;
    for (int64_t i = 0; i < static_cast<int64_t>(mask.flags.size()); ++i)
        if (mask.flags[i]) px.push_back(i);
    if (px.empty()) throw validation_error("mask", "empty mask: reference ensemble needs N >= 1");
    return px;
}

} // namespace

void HistogramSpec::validate() const {
    if (n_bins < 2) throw validation_error("n_bins", "need at least 2 bins");
    for (size_t v = 0; v < edges.size(); ++v) {
        if (static_cast<int>(edges[v].size()) != n_bins + 1)
            throw validation_error("edges", "variable " + std::to_string(v) + " needs n_bins+1 edges");
        for (int i = 0; i < n_bins; ++i)
            if (!(edges[v][i] < edges[v][i + 1]))
                throw validation_error("edges", "not strictly ascending at variable " +
                                                    std::to_string(v) + ", edge " +
                                                    std::to_string(i));
    }
}

void ModelParams::validate() const {
    if (n_bins < 2) throw validation_error("bins", "need at least 2 bins");
    if (!(q > 0.0 && q < 1.0)) throw validation_error("q", "must lie in (0, 1)");
    if (!(epsilon > 0.0)) throw validation_error("epsilon", "must be > 0");
}

ForestModel build_histograms(const DataCube& cube, const ForestMask& mask, int n_bins,
                             double epsilon, int threads) {
    if (n_bins < 2) throw validation_error("bins", "need at least 2 bins");
    if (!(epsilon > 0.0)) throw validation_error("epsilon", "must be > 0");
    const std::vector<int64_t> px = masked_pixels(cube, mask);

    const int T = cube.n_time(), nv = cube.n_vars();
    const int64_t plane = cube.plane_size();

    ForestModel m;
    m.spec.n_bins = n_bins;
    m.variables = cube.variables;
    m.n_time = T;
    m.n_vars = nv;
    m.epsilon = epsilon;

    // Shared edges per variable from the masked, non-NaN range over all
    // timesteps, expanded by 1% of the range each side. A degenerate range
    // becomes [v-0.5, v+0.5].
    m.spec.edges.resize(nv);
    for (int v = 0; v < nv; ++v) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        bool any = false;
        for (int t = 0; t < T; ++t) {
            const float* s = cube.slice(t, v);
            for (int64_t i : px) {
                const float val = s[i];
                if (std::isnan(val)) continue;
                any = true;
                if (val < lo) lo = val;
                if (val > hi) hi = val;
            }
        }
        if (!any)
            throw validation_error("mask", "all-NaN masked data for variable " + cube.variables[v]);
        if (lo == hi) {
            lo -= 0.5;
            hi += 0.5;
        } else {
            const double margin = 0.01 * (hi - lo);
            lo -= margin;
            hi += margin;
        }
        const double bw = (hi - lo) / n_bins;
        auto& e = m.spec.edges[v];
        e.resize(n_bins + 1);
        for (int i = 0; i <= n_bins; ++i) e[i] = lo + i * bw;
    }
    m.spec.validate();

    m.counts.assign(static_cast<int64_t>(T) * nv * n_bins, 0);
    m.totals.assign(T, 0);
    m.usable.assign(T, 0);
    m.probs.assign(static_cast<int64_t>(T) * nv * n_bins, kNaN);
    m.thresholds.assign(T, kNaN);

    std::vector<EdgeCache> ec(nv);
    for (int v = 0; v < nv; ++v) ec[v] = edge_cache(m.spec.edges[v]);

    parallel_for(T, threads, [&](int64_t t0, int64_t t1) {
        for (int t = static_cast<int>(t0); t < t1; ++t) {
            int64_t total = 0;
            for (int64_t i : px) {
                if (std::isnan(cube.values[(static_cast<int64_t>(t) * nv) * plane + i])) continue;
                ++total;
                for (int v = 0; v < nv; ++v) {
                    const double x =
                        cube.values[(static_cast<int64_t>(t) * nv + v) * plane + i];
                    const int b = kernels::bin_index(x, ec[v].e0, ec[v].inv_bw,
                                                     m.spec.edges[v].data(), n_bins);
                    ++m.counts[(static_cast<int64_t>(t) * nv + v) * n_bins + b];
                }
            }
            m.totals[t] = total;
            m.usable[t] = total > 0;
            if (total > 0) {
                for (int v = 0; v < nv; ++v) {
                    const int64_t base = (static_cast<int64_t>(t) * nv + v) * n_bins;
                    for (int b = 0; b < n_bins; ++b) {
                        const double p = static_cast<double>(m.counts[base + b]) /
                                         static_cast<double>(total);
                        m.probs[base + b] = std::max(p, epsilon);
                    }
                }
            }
        }
    });
    return m;
}

double similarity(const ForestModel& model, double x, int t, int v) {
    require_fitted(model, t);
    if (v < 0 || v >= model.n_vars) throw validation_error("variable", "index out of range");
    if (std::isnan(x) || !model.usable[t]) return kNaN;
    const EdgeCache ec = edge_cache(model.spec.edges[v]);
    const int b = kernels::bin_index(x, ec.e0, ec.inv_bw, model.spec.edges[v].data(),
                                     model.spec.n_bins);
    return model.prob_row(t, v)[b];
}

double joint_similarity(const ForestModel& model, const float* values, int64_t stride, int t) {
    require_fitted(model, t);
    if (!model.usable[t]) return kNaN;
    double p = 1.0;
    for (int v = 0; v < model.n_vars; ++v) {
        const float x = values[v * stride];
        if (std::isnan(x)) return kNaN;
        const EdgeCache ec = edge_cache(model.spec.edges[v]);
        const int b = kernels::bin_index(static_cast<double>(x), ec.e0, ec.inv_bw,
                                         model.spec.edges[v].data(), model.spec.n_bins);
        p = p * model.prob_row(t, v)[b];
    }
    return p;
}

void quantile_thresholds(ForestModel& model, const DataCube& cube, const ForestMask& mask,
                         double q, int threads) {
    if (!(q > 0.0 && q < 1.0)) throw validation_error("q", "must lie in (0, 1)");
    if (cube.n_time() != model.n_time || cube.n_vars() != model.n_vars)
        throw validation_error("cube", "cube shape does not match the fitted model");
    const std::vector<int64_t> px = masked_pixels(cube, mask);
    model.q = q;

    const int64_t plane = cube.plane_size();
    parallel_for(model.n_time, threads, [&](int64_t t0, int64_t t1) {
        std::vector<double> sims;
        for (int t = static_cast<int>(t0); t < t1; ++t) {
            if (!model.usable[t]) {
                model.thresholds[t] = kNaN;
                continue;
            }
            sims.clear();
            for (int64_t i : px) {
                const double p =
                    joint_similarity(model, cube.values.data() + static_cast<int64_t>(t) *
                                            model.n_vars * plane + i, plane, t);
                if (!std::isnan(p)) sims.push_back(p);
            }
            const int64_t M = static_cast<int64_t>(sims.size());
            // Nearest-rank (lower): zero-based rank ceil(q*M)-1, clamped.
            int64_t rank = static_cast<int64_t>(std::ceil(q * static_cast<double>(M))) - 1;
            rank = std::clamp<int64_t>(rank, 0, M - 1);
            std::nth_element(sims.begin(), sims.begin() + rank, sims.end());
            model.thresholds[t] = sims[rank];
        }
    });
}

ForestModel fit_forest_model(const DataCube& cube, const ForestMask& mask,
                             const ModelParams& params, int threads) {
    params.validate();
    ForestModel m = build_histograms(cube, mask, params.n_bins, params.epsilon, threads);
    quantile_thresholds(m, cube, mask, params.q, threads);
    return m;
}

void save_model(const ForestModel& model, const std::string& path) {
    nlohmann::json j;
    j["version"] = 1;
    j["n_bins"] = model.spec.n_bins;
    j["q"] = model.q;
    j["epsilon"] = model.epsilon;
    j["variables"] = model.variables;
    j["n_time"] = model.n_time;
    j["edges"] = model.spec.edges;
    j["totals"] = model.totals;
    auto counts = nlohmann::json::array();
    for (int t = 0; t < model.n_time; ++t) {
        auto per_var = nlohmann::json::array();
        for (int v = 0; v < model.n_vars; ++v) {
            std::vector<int64_t> row(model.spec.n_bins);
            for (int b = 0; b < model.spec.n_bins; ++b) row[b] = model.count_at(t, v, b);
            per_var.push_back(row);
        }
        counts.push_back(per_var);
    }
    j["counts"] = std::move(counts);
    auto thr = nlohmann::json::array();
    for (int t = 0; t < model.n_time; ++t) {
        if (model.usable[t])
            thr.push_back(model.thresholds[t]);
        else
            thr.push_back(nullptr);
    }
    j["thresholds"] = std::move(thr);

    std::ofstream f(path, std::ios::trunc);
    if (!f) throw io_error(path, "cannot open for writing");
    f << j.dump(2) << "\n";
    if (!f) throw io_error(path, "write failed");
}

ForestModel load_model(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error(path, "cannot open for reading");
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(path, std::string("invalid JSON: ") + e.what());
    }

    ForestModel m;
    try {
        if (j.at("version").get<int>() != 1)
            throw validation_error("version", "unsupported model version");
        m.spec.n_bins = j.at("n_bins").get<int>();
        m.q = j.at("q").get<double>();
        m.epsilon = j.at("epsilon").get<double>();
        m.variables = j.at("variables").get<std::vector<std::string>>();
        m.n_time = j.at("n_time").get<int>();
        m.n_vars = static_cast<int>(m.variables.size());
        m.spec.edges = j.at("edges").get<std::vector<std::vector<double>>>();
        m.totals = j.at("totals").get<std::vector<int64_t>>();
        const auto& counts = j.at("counts");
        m.counts.assign(static_cast<int64_t>(m.n_time) * m.n_vars * m.spec.n_bins, 0);
        for (int t = 0; t < m.n_time; ++t)
            for (int v = 0; v < m.n_vars; ++v)
                for (int b = 0; b < m.spec.n_bins; ++b)
                    m.counts[(static_cast<int64_t>(t) * m.n_vars + v) * m.spec.n_bins + b] =
                        counts.at(t).at(v).at(b).get<int64_t>();
        const auto& thr = j.at("thresholds");
        m.thresholds.assign(m.n_time, kNaN);
        m.usable.assign(m.n_time, 0);
        for (int t = 0; t < m.n_time; ++t) {
            if (!thr.at(t).is_null()) {
                m.thresholds[t] = thr.at(t).get<double>();
                m.usable[t] = 1;
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(path, std::string("malformed model: ") + e.what());
    }
    m.spec.validate();
    if (static_cast<int>(m.totals.size()) != m.n_time)
        throw validation_error("totals", "length does not match n_time");

    // Probabilities are derived state; rebuild them exactly as fitted.
    m.probs.assign(static_cast<int64_t>(m.n_time) * m.n_vars * m.spec.n_bins, kNaN);
    for (int t = 0; t < m.n_time; ++t) {
        if (m.totals[t] <= 0) {
            m.usable[t] = 0;
            continue;
        }
        for (int v = 0; v < m.n_vars; ++v) {
            const int64_t base = (static_cast<int64_t>(t) * m.n_vars + v) * m.spec.n_bins;
            for (int b = 0; b < m.spec.n_bins; ++b) {
                const double p = static_cast<double>(m.counts[base + b]) /
                                 static_cast<double>(m.totals[t]);
                m.probs[base + b] = std::max(p, m.epsilon);
            }
        }
    }
    return m;
}

} // namespace fcd
