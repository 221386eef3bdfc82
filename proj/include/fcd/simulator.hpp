// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "fcd/datacube.hpp"

namespace fcd {

/// Per-class signal parameters, one entry per cube variable.
struct ClassParams {
    std::vector<double> mean_db;
    std::vector<double> std_db; // per-pixel static texture spread
};

enum class PatchClass { forest, nonforest, deforest, lookalike };

struct ScenePatch {
    enum class Shape { rect, disk } shape = Shape::rect;
    int x = 0, y = 0, w = 0, h = 0; // rect
    double cx = 0, cy = 0, r = 0;   // disk
    PatchClass cls = PatchClass::nonforest;
    ClassParams params;
    int change_index = -1; // deforest: first timestep of the transition
    int reveal_index = -1; // lookalike: first timestep at its own signature
};

/// Seeded synthetic scene with known ground truth. Pixel series =
/// class mean + static per-pixel texture + seasonal sinusoid + white noise,
/// all in dB. Deforestation pixels ramp linearly from the forest signature
/// to their target signature over transition_steps starting at change_index.
struct SceneSpec {
    int width = 0, height = 0, n_time = 0;
    std::vector<std::string> variables;
    Date start_date{2017, 1, 5};
    int cadence_days = 12;
    uint64_t seed = 42;
    double noise_std_db = 1.0;
    std::vector<double> seasonal_amplitude_db;
    double seasonal_period_days = 365.25;
    double seasonal_phase_days = 0.0;
    int transition_steps = 2;
    ClassParams forest;
    std::vector<ScenePatch> patches; // must be disjoint; background is forest

    void validate() const;
};

struct Scene {
    DataCube cube;
    ForestMask forest_truth;       // stable-forest pixels
    ReferenceChangeMap change_truth; // deforestation pixels with dates
    ForestMask nonforest_pool;     // known non-forest (incl. lookalikes)
};

Scene generate_scene(const SceneSpec& spec, int threads = 0);

SceneSpec parse_scene_spec(const nlohmann::json& j);
SceneSpec load_scene_spec(const std::string& path);
nlohmann::json scene_spec_to_json(const SceneSpec& spec);

/// The documented acceptance scene: 128x128x60x2, 12-day cadence, seed 42,
/// >= 2 dB forest/non-forest mean gap per variable, noise sigma 1 dB, six
/// dated deforestation patches and a two-mode non-forest pool. With
/// `with_lookalike`, adds a non-forest patch that carries the forest
/// signature for its first 10 timesteps.
SceneSpec acceptance_scene_spec(bool with_lookalike = false);

} // namespace fcd
