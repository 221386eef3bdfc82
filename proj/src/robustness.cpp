// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#include "fcd/robustness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "fcd/detector.hpp"
#include "fcd/log.hpp"
#include "fcd/png_writer.hpp"
#include "fcd/rng.hpp"

namespace fcd {

namespace {

std::vector<int64_t> member_indices(const ForestMask& mask) {
    std::vector<int64_t> out;
    for (int64_t i = 0; i < static_cast<int64_t>(mask.flags.size()); ++i)
        if (mask.flags[i]) out.push_back(i);
    return out;
}

int64_t corruption_count(double c, int64_t n) {
    // ceil(c*N) with a guard against float droop (0.1 * 2000 != 200 exactly).
    return static_cast<int64_t>(std::ceil(c * static_cast<double>(n) - 1e-9));
}

} // namespace

ForestMask sample_mask(const ForestMask& mask, int64_t n, uint64_t seed) {
    std::vector<int64_t> members = member_indices(mask);
    if (n < 1 || n > static_cast<int64_t>(members.size()))
        throw validation_error("n", "sample size " + std::to_string(n) + " outside [1, " +
                                        std::to_string(members.size()) + "]");
    SplitMix64 rng(counter_hash(seed, 0x5a3f, 0));
    seeded_shuffle(members, rng);
    ForestMask out{mask.width, mask.height,
                   std::vector<uint8_t>(static_cast<size_t>(mask.width) * mask.height, 0)};
    for (int64_t i = 0; i < n; ++i) out.flags[members[i]] = 1;
    return out;
}

ForestMask corrupt_mask(const ForestMask& mask, const ForestMask& pool, double c,
                        uint64_t seed) {
    if (!(c >= 0.0 && c < 1.0)) throw validation_error("c", "corruption fraction outside [0, 1)");
    if (mask.width != pool.width || mask.height != pool.height)
        throw validation_error("pool", "pool dimensions do not match the mask");
    for (size_t i = 0; i < mask.flags.size(); ++i)
        if (mask.flags[i] && pool.flags[i])
            throw validation_error("pool", "pool overlaps the forest ensemble at offset " +
                                               std::to_string(i));

    std::vector<int64_t> members = member_indices(mask);
    std::vector<int64_t> candidates = member_indices(pool);
    const int64_t n = static_cast<int64_t>(members.size());
    if (n == 0) throw validation_error("mask", "empty ensemble");
    const int64_t k = corruption_count(c, n);
    if (k > static_cast<int64_t>(candidates.size()))
        throw validation_error("pool", "needs " + std::to_string(k) + " non-forest pixels, only " +
                                           std::to_string(candidates.size()) + " available");

    SplitMix64 rng_members(counter_hash(seed, 0xf07e57, 1));
    SplitMix64 rng_pool(counter_hash(seed, 0xf07e57, 2));
    seeded_shuffle(members, rng_members);
    seeded_shuffle(candidates, rng_pool);

    // Drop the first k ensemble members, adopt the first k pool members:
    // prefix truncation keeps the swapped sets nested across c.
    ForestMask out{mask.width, mask.height,
                   std::vector<uint8_t>(static_cast<size_t>(mask.width) * mask.height, 0)};
    for (int64_t i = k; i < n; ++i) out.flags[members[i]] = 1;
    for (int64_t i = 0; i < k; ++i) out.flags[candidates[i]] = 1;
    return out;
}

void SweepParams::validate() const {
    if (fractions.empty()) throw validation_error("fractions", "sweep needs at least one fraction");
    for (size_t i = 0; i < fractions.size(); ++i) {
        if (!(fractions[i] >= 0.0 && fractions[i] < 1.0))
            throw validation_error("fractions", "entry " + std::to_string(i) + " outside [0, 1)");
        if (i > 0 && fractions[i] <= fractions[i - 1])
            throw validation_error("fractions", "must be strictly ascending");
    }
    model.validate();
    detector.validate();
}

std::vector<SweepRow> noise_sweep(const DataCube& cube, const ReferenceChangeMap& truth,
                                  const ForestMask& ensemble, const ForestMask& pool,
                                  const SweepParams& params, const std::string& out_dir,
                                  int threads) {
    params.validate();
    namespace fs = std::filesystem;
    if (!out_dir.empty()) fs::create_directories(out_dir);

    std::vector<SweepRow> rows;
    for (double c : params.fractions) {
        try {
            const ForestMask corrupted = corrupt_mask(ensemble, pool, c, params.seed);
            const ForestModel model = fit_forest_model(cube, corrupted, params.model, threads);
            const ChangeMap map = detect_cube(model, cube, params.detector, threads);
            rows.push_back({c, assess(map, cube.dates, truth)});
            log_info("sweep", "fraction done",
                     {{"c", c},
                      {"pa", rows.back().report.pa},
                      {"ua", rows.back().report.ua}});
            if (!out_dir.empty()) {
                char name[64];
                std::snprintf(name, sizeof(name), "cmap_noise_fraction_%.2f.png", c);
                render_change_map_png((fs::path(out_dir) / name).string(), map, cube.n_time());
            }
        } catch (const validation_error& e) {
            throw validation_error(e.field(), "at corruption fraction c=" + std::to_string(c) +
                                                  ": " + e.what());
        }
    }

    if (!out_dir.empty()) {
        std::ofstream csv((fs::path(out_dir) / "sweep.csv").string(), std::ios::trunc);
        if (!csv) throw io_error(out_dir + "/sweep.csv", "cannot open for writing");
        csv << "c,ua,pa,oa,ba_standard,ba_paper,mean_lag_days\n";
        for (const auto& row : rows) {
            char buf[256];
            std::snprintf(buf, sizeof(buf), "%.4g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g", row.c,
                          row.report.ua, row.report.pa, row.report.oa, row.report.ba_standard,
                          row.report.ba_paper, row.report.mean_lag_days);
            csv << buf << "\n";
        }
        if (!csv) throw io_error(out_dir + "/sweep.csv", "write failed");
    }
    return rows;
}

std::vector<double> parse_fractions(const std::string& text) {
    std::vector<double> out;
    const auto c1 = text.find(':');
    if (c1 != std::string::npos) {
        const auto c2 = text.find(':', c1 + 1);
        if (c2 == std::string::npos)
            throw validation_error("fractions", "expected begin:end:step, got '" + text + "'");
        const double begin = std::stod(text.substr(0, c1));
        const double end = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        const double step = std::stod(text.substr(c2 + 1));
        if (!(step > 0)) throw validation_error("fractions", "step must be positive");
        for (int i = 0;; ++i) {
            const double v = begin + i * step;
            if (v > end + 1e-9) break;
            out.push_back(v);
        }
        return out;
    }
    size_t pos = 0;
    while (pos < text.size()) {
        const auto comma = text.find(',', pos);
        const std::string tok =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!tok.empty()) out.push_back(std::stod(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw validation_error("fractions", "empty fraction list");
    return out;
}

} // namespace fcd
