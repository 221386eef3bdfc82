// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#include "fcd/simulator.hpp"

#include <cmath>
#include <fstream>

#include "fcd/parallel.hpp"
#include "fcd/rng.hpp"

namespace fcd {

namespace {

const char* class_name(PatchClass c) {
    switch (c) {
        case PatchClass::forest: return "forest";
        case PatchClass::nonforest: return "nonforest";
        case PatchClass::deforest: return "deforest";
        case PatchClass::lookalike: return "lookalike";
    }
    return "?";
}

PatchClass class_from_name(const std::string& s) {
    if (s == "forest") return PatchClass::forest;
    if (s == "nonforest") return PatchClass::nonforest;
    if (s == "deforest") return PatchClass::deforest;
    if (s == "lookalike") return PatchClass::lookalike;
    throw validation_error("class", "unknown patch class '" + s + "'");
}

bool patch_contains(const ScenePatch& p, int x, int y) {
    if (p.shape == ScenePatch::Shape::rect)
        return x >= p.x && x < p.x + p.w && y >= p.y && y < p.y + p.h;
    const double dx = x - p.cx, dy = y - p.cy;
    return dx * dx + dy * dy <= p.r * p.r;
}

void check_params(const ClassParams& p, size_t n_vars, const std::string& where) {
    if (p.mean_db.size() != n_vars)
        throw validation_error(where, "mean_db needs one entry per variable");
    if (p.std_db.size() != n_vars)
        throw validation_error(where, "std_db needs one entry per variable");
    for (double s : p.std_db)
        if (!(s >= 0)) throw validation_error(where, "std_db entries must be >= 0");
}

} // namespace

void SceneSpec::validate() const {
    if (width <= 0 || height <= 0 || n_time <= 0)
        throw validation_error("dims", "width/height/n_time must be positive");
    if (variables.empty()) throw validation_error("variables", "need at least one variable");
    if (cadence_days <= 0) throw validation_error("cadence_days", "must be positive");
    if (!(noise_std_db >= 0)) throw validation_error("noise_std_db", "must be >= 0");
    if (seasonal_amplitude_db.size() != variables.size())
        throw validation_error("seasonal_amplitude_db", "needs one entry per variable");
    if (seasonal_period_days <= 0) throw validation_error("seasonal_period_days", "must be positive");
    if (transition_steps < 1) throw validation_error("transition_steps", "must be >= 1");
    check_params(forest, variables.size(), "forest");
    for (size_t i = 0; i < patches.size(); ++i) {
        const auto& p = patches[i];
        const std::string where = "patches[" + std::to_string(i) + "]";
        check_params(p.params, variables.size(), where);
        if (p.cls == PatchClass::deforest && (p.change_index < 1 || p.change_index >= n_time))
            throw validation_error(where, "change_index " + std::to_string(p.change_index) +
                                              " outside [1, " + std::to_string(n_time) + ")");
        if (p.cls == PatchClass::lookalike && (p.reveal_index < 1 || p.reveal_index >= n_time))
            throw validation_error(where, "reveal_index outside [1, n_time)");
        if (p.shape == ScenePatch::Shape::rect) {
            if (p.w <= 0 || p.h <= 0 || p.x < 0 || p.y < 0 || p.x + p.w > width ||
                p.y + p.h > height)
                throw validation_error(where, "rect outside the image");
        } else {
            if (p.r <= 0 || p.cx - p.r < 0 || p.cy - p.r < 0 || p.cx + p.r >= width ||
                p.cy + p.r >= height)
                throw validation_error(where, "disk outside the image");
        }
    }
    // Each pixel must belong to exactly one class (background forest + at
    // most one patch).
    for (size_t i = 0; i < patches.size(); ++i) {
        for (size_t j = i + 1; j < patches.size(); ++j) {
            const auto& a = patches[i];
            const auto& b = patches[j];
            int x0 = 0, x1 = width, y0 = 0, y1 = height;
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x)
                    if (patch_contains(a, x, y) && patch_contains(b, x, y))
                        throw validation_error("patches", "patches " + std::to_string(i) + " and " +
                                                              std::to_string(j) + " overlap at (" +
                                                              std::to_string(x) + "," +
                                                              std::to_string(y) + ")");
        }
    }
}

Scene generate_scene(const SceneSpec& spec, int threads) {
    spec.validate();
    const int W = spec.width, H = spec.height, T = spec.n_time;
    const int nv = static_cast<int>(spec.variables.size());

    Scene scene;
    scene.cube.width = W;
    scene.cube.height = H;
    scene.cube.variables = spec.variables;
    scene.cube.dates.reserve(T);
    for (int t = 0; t < T; ++t)
        scene.cube.dates.push_back(add_days(spec.start_date, static_cast<int64_t>(t) * spec.cadence_days));
    scene.cube.values.resize(static_cast<int64_t>(T) * nv * H * W);

    scene.forest_truth = ForestMask{W, H, std::vector<uint8_t>(static_cast<size_t>(W) * H, 1)};
    scene.nonforest_pool = ForestMask{W, H, std::vector<uint8_t>(static_cast<size_t>(W) * H, 0)};
    scene.change_truth.width = W;
    scene.change_truth.height = H;
    scene.change_truth.change_index.assign(static_cast<size_t>(W) * H, kNoChange);
    scene.change_truth.dates = scene.cube.dates;
    scene.change_truth.provenance = "synthetic-truth";

    // Pixel -> owning patch (or -1 for background forest).
    std::vector<int32_t> owner(static_cast<size_t>(W) * H, -1);
    for (size_t pi = 0; pi < spec.patches.size(); ++pi) {
        const auto& p = spec.patches[pi];
        for (int y = 0; y < H; ++y) {
            for (int x = 0; x < W; ++x) {
                if (!patch_contains(p, x, y)) continue;
                const int64_t i = static_cast<int64_t>(y) * W + x;
                owner[i] = static_cast<int32_t>(pi);
                switch (p.cls) {
                    case PatchClass::forest:
                        break;
                    case PatchClass::nonforest:
                    case PatchClass::lookalike:
                        scene.forest_truth.flags[i] = 0;
                        scene.nonforest_pool.flags[i] = 1;
                        break;
                    case PatchClass::deforest:
                        scene.forest_truth.flags[i] = 0;
                        scene.change_truth.change_index[i] = p.change_index;
                        break;
                }
            }
        }
    }

    // Seasonal term per (t, v), shared by all pixels.
    std::vector<double> seasonal(static_cast<size_t>(T) * nv);
    for (int t = 0; t < T; ++t) {
        const double day = static_cast<double>(days_between(scene.cube.dates[t], spec.start_date));
        for (int v = 0; v < nv; ++v)
            seasonal[static_cast<size_t>(t) * nv + v] =
                spec.seasonal_amplitude_db[v] *
                std::sin(2.0 * M_PI * (day - spec.seasonal_phase_days) / spec.seasonal_period_days);
    }

    parallel_for(H, threads, [&](int64_t y0, int64_t y1) {
        for (int y = static_cast<int>(y0); y < y1; ++y) {
            for (int x = 0; x < W; ++x) {
                const int64_t pix = static_cast<int64_t>(y) * W + x;
                const int32_t o = owner[pix];
                const ScenePatch* patch = o >= 0 ? &spec.patches[o] : nullptr;
                const ClassParams& base = spec.forest;
                const ClassParams& target =
                    patch && patch->cls != PatchClass::forest ? patch->params : spec.forest;
                // Static texture draws for the base and target signatures.
                for (int v = 0; v < nv; ++v) {
                    const double z_base = gaussian_from_counters(spec.seed, pix, v, 1000000);
                    const double z_target = gaussian_from_counters(spec.seed, pix, v, 1000001);
                    for (int t = 0; t < T; ++t) {
                        double alpha = 0.0; // blend toward target signature
                        if (patch) {
                            if (patch->cls == PatchClass::nonforest) {
                                alpha = 1.0;
                            } else if (patch->cls == PatchClass::deforest) {
                                if (t >= patch->change_index)
                                    alpha = std::min(
                                        1.0, (t - patch->change_index + 1.0) / spec.transition_steps);
                            } else if (patch->cls == PatchClass::lookalike) {
                                alpha = t >= patch->reveal_index ? 1.0 : 0.0;
                            }
                        }
                        const double mean =
                            (1.0 - alpha) * base.mean_db[v] + alpha * target.mean_db[v];
                        const double texture = (1.0 - alpha) * base.std_db[v] * z_base +
                                               alpha * target.std_db[v] * z_target;
                        const double noise =
                            spec.noise_std_db == 0.0
                                ? 0.0
                                : spec.noise_std_db * gaussian_from_counters(spec.seed, pix, v, t);
                        const double value =
                            mean + texture + seasonal[static_cast<size_t>(t) * nv + v] + noise;
                        scene.cube.values[scene.cube.index(t, v, y, x)] =
                            static_cast<float>(value);
                    }
                }
            }
        }
    });

    return scene;
}

SceneSpec parse_scene_spec(const nlohmann::json& j) {
    SceneSpec s;
    auto get = [&](const char* key, auto& dst, bool required = true) {
        if (j.contains(key)) {
            try {
                j.at(key).get_to(dst);
            } catch (const nlohmann::json::exception&) {
                throw validation_error(key, "wrong type in scene spec");
            }
        } else if (required) {
            throw validation_error(key, "missing from scene spec");
        }
    };
    get("width", s.width);
    get("height", s.height);
    get("n_time", s.n_time);
    get("variables", s.variables);
    std::string date_str = format_date(s.start_date);
    get("start_date", date_str, false);
    s.start_date = parse_date(date_str);
    get("cadence_days", s.cadence_days, false);
    get("seed", s.seed, false);
    get("noise_std_db", s.noise_std_db, false);
    s.seasonal_amplitude_db.assign(s.variables.size(), 0.0);
    get("seasonal_amplitude_db", s.seasonal_amplitude_db, false);
    get("seasonal_period_days", s.seasonal_period_days, false);
    get("seasonal_phase_days", s.seasonal_phase_days, false);
    get("transition_steps", s.transition_steps, false);
    if (!j.contains("forest")) throw validation_error("forest", "missing from scene spec");
    s.forest.mean_db = j.at("forest").at("mean_db").get<std::vector<double>>();
    s.forest.std_db = j.at("forest").at("std_db").get<std::vector<double>>();
    if (j.contains("patches")) {
        for (const auto& pj : j.at("patches")) {
            ScenePatch p;
            const std::string shape = pj.value("shape", "rect");
            if (shape == "rect") {
                p.shape = ScenePatch::Shape::rect;
                p.x = pj.at("x").get<int>();
                p.y = pj.at("y").get<int>();
                p.w = pj.at("w").get<int>();
                p.h = pj.at("h").get<int>();
            } else if (shape == "disk") {
                p.shape = ScenePatch::Shape::disk;
                p.cx = pj.at("cx").get<double>();
                p.cy = pj.at("cy").get<double>();
                p.r = pj.at("r").get<double>();
            } else {
                throw validation_error("shape", "unknown patch shape '" + shape + "'");
            }
            p.cls = class_from_name(pj.at("class").get<std::string>());
            p.params.mean_db = pj.at("mean_db").get<std::vector<double>>();
            p.params.std_db = pj.at("std_db").get<std::vector<double>>();
            p.change_index = pj.value("change_index", -1);
            p.reveal_index = pj.value("reveal_index", -1);
            s.patches.push_back(std::move(p));
        }
    }
    s.validate();
    return s;
}

SceneSpec load_scene_spec(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error(path, "cannot open for reading");
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(path, std::string("invalid JSON: ") + e.what());
    }
    return parse_scene_spec(j);
}

nlohmann::json scene_spec_to_json(const SceneSpec& s) {
    nlohmann::json j = {{"width", s.width},
                        {"height", s.height},
                        {"n_time", s.n_time},
                        {"variables", s.variables},
                        {"start_date", format_date(s.start_date)},
                        {"cadence_days", s.cadence_days},
                        {"seed", s.seed},
                        {"noise_std_db", s.noise_std_db},
                        {"seasonal_amplitude_db", s.seasonal_amplitude_db},
                        {"seasonal_period_days", s.seasonal_period_days},
                        {"seasonal_phase_days", s.seasonal_phase_days},
                        {"transition_steps", s.transition_steps},
                        {"forest", {{"mean_db", s.forest.mean_db}, {"std_db", s.forest.std_db}}}};
    j["patches"] = nlohmann::json::array();
    for (const auto& p : s.patches) {
        nlohmann::json pj;
        if (p.shape == ScenePatch::Shape::rect) {
            pj = {{"shape", "rect"}, {"x", p.x}, {"y", p.y}, {"w", p.w}, {"h", p.h}};
        } else {
            pj = {{"shape", "disk"}, {"cx", p.cx}, {"cy", p.cy}, {"r", p.r}};
        }
        pj["class"] = class_name(p.cls);
        pj["mean_db"] = p.params.mean_db;
        pj["std_db"] = p.params.std_db;
        if (p.cls == PatchClass::deforest) pj["change_index"] = p.change_index;
        if (p.cls == PatchClass::lookalike) pj["reveal_index"] = p.reveal_index;
        j["patches"].push_back(pj);
    }
    return j;
}

SceneSpec acceptance_scene_spec(bool with_lookalike) {
    SceneSpec s;
    s.width = 128;
    s.height = 128;
    s.n_time = 60;
    s.variables = {"VV", "VH"};
    s.start_date = Date{2017, 1, 5};
    s.cadence_days = 12;
    s.seed = 42;
    s.noise_std_db = 1.0;
    s.seasonal_amplitude_db = {0.4, 0.3};
    s.transition_steps = 2;
    s.forest = {{-7.0, -12.5}, {0.4, 0.4}};

    // Two non-forest modes bracketing the cleared signature, the nearer one
    // at 0.6 dB: under label corruption its histogram mass leaks onto cleared
    // values, which is what degrades late detections once the corruption
    // fraction passes the quantile level.
    const ClassParams pasture{{-10.4, -16.4}, {0.5, 0.5}};
    const ClassParams bare{{-12.5, -18.5}, {0.6, 0.6}};
    const ClassParams cleared{{-11.0, -17.0}, {0.5, 0.5}};

    auto rect = [](int x, int y, int w, int h, PatchClass c, ClassParams cp) {
        ScenePatch p;
        p.shape = ScenePatch::Shape::rect;
        p.x = x; p.y = y; p.w = w; p.h = h;
        p.cls = c;
        p.params = std::move(cp);
        return p;
    };
    auto disk = [](double cx, double cy, double r, PatchClass c, ClassParams cp) {
        ScenePatch p;
        p.shape = ScenePatch::Shape::disk;
        p.cx = cx; p.cy = cy; p.r = r;
        p.cls = c;
        p.params = std::move(cp);
        return p;
    };

    s.patches.push_back(rect(2, 2, 18, 18, PatchClass::nonforest, pasture));
    s.patches.push_back(rect(106, 106, 18, 18, PatchClass::nonforest, bare));

    ScenePatch d1 = rect(26, 6, 26, 22, PatchClass::deforest, cleared);
    d1.change_index = 8;
    ScenePatch d2 = rect(62, 10, 28, 20, PatchClass::deforest, cleared);
    d2.change_index = 15;
    ScenePatch d3 = disk(24, 62, 13, PatchClass::deforest, cleared);
    d3.change_index = 22;
    ScenePatch d4 = rect(58, 46, 26, 22, PatchClass::deforest, cleared);
    d4.change_index = 30;
    ScenePatch d5 = disk(98, 44, 12, PatchClass::deforest, cleared);
    d5.change_index = 38;
    ScenePatch d6 = rect(32, 96, 30, 20, PatchClass::deforest, cleared);
    d6.change_index = 45;
    for (auto& d : {d1, d2, d3, d4, d5, d6}) s.patches.push_back(d);

    if (with_lookalike) {
        ScenePatch la = rect(88, 76, 16, 16, PatchClass::lookalike, cleared);
        la.reveal_index = 10;
        s.patches.push_back(la);
    }
    return s;
}

} // namespace fcd
