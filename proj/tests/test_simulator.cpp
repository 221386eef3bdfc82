// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstring>

#include "fcd/accuracy.hpp"
#include "fcd/detector.hpp"
#include "fcd/simulator.hpp"
#include "test_util.hpp"

using namespace fcd;

namespace {

SceneSpec tiny_spec() {
    SceneSpec s;
    s.width = 16;
    s.height = 12;
    s.n_time = 10;
    s.variables = {"VV", "VH"};
    s.seed = 7;
    s.noise_std_db = 0.0;
    s.seasonal_amplitude_db = {0.0, 0.0};
    s.transition_steps = 2;
    s.forest = {{-7.0, -12.0}, {0.0, 0.0}};
    ScenePatch p;
    p.shape = ScenePatch::Shape::rect;
    p.x = 2;
    p.y = 3;
    p.w = 4;
    p.h = 4;
    p.cls = PatchClass::deforest;
    p.change_index = 4;
    p.params = {{-11.0, -16.0}, {0.0, 0.0}};
    s.patches.push_back(p);
    return s;
}

} // namespace

TEST_SUITE("simulator") {

TEST_CASE("noise-free limit: forest pixels sit exactly at the forest mean") {
    const Scene scene = generate_scene(tiny_spec());
    CHECK(scene.cube.at(0, 0, 0, 0) == -7.0f);
    CHECK(scene.cube.at(9, 1, 11, 15) == -12.0f);
    // Deforestation pixel equals the target mean after the transition.
    CHECK(scene.cube.at(3, 0, 4, 3) == -7.0f);  // before change
    CHECK(scene.cube.at(5, 0, 4, 3) == -11.0f); // transition (2 steps) done
    CHECK(scene.cube.at(9, 1, 4, 3) == -16.0f);
}

TEST_CASE("same seed: bit-identical cubes; truth outputs consistent") {
    SceneSpec spec = tiny_spec();
    spec.noise_std_db = 0.7;
    spec.forest.std_db = {0.3, 0.3};
    const Scene a = generate_scene(spec);
    const Scene b = generate_scene(spec);
    CHECK(std::memcmp(a.cube.values.data(), b.cube.values.data(),
                      a.cube.values.size() * sizeof(float)) == 0);

    // Different seed differs somewhere.
    spec.seed = 8;
    const Scene c = generate_scene(spec);
    CHECK(std::memcmp(a.cube.values.data(), c.cube.values.data(),
                      a.cube.values.size() * sizeof(float)) != 0);

    // Truth consistency: forest truth and change truth are disjoint; the
    // deforest patch is exactly the changed region.
    int changed = 0;
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x) {
            const bool in_patch = x >= 2 && x < 6 && y >= 3 && y < 7;
            const bool is_changed = a.change_truth.changed(y, x);
            CHECK(is_changed == in_patch);
            if (is_changed) {
                ++changed;
                CHECK(!a.forest_truth.at(y, x));
                CHECK(a.change_truth.index_at(y, x) == 4);
            }
        }
    CHECK(changed == 16);
    CHECK(a.forest_truth.count() == 16 * 12 - 16);
    CHECK(a.nonforest_pool.count() == 0);
}

TEST_CASE("generation is schedule-independent") {
    SceneSpec spec = tiny_spec();
    spec.noise_std_db = 1.0;
    const Scene a = generate_scene(spec, 1);
    const Scene b = generate_scene(spec, 4);
    CHECK(std::memcmp(a.cube.values.data(), b.cube.values.data(),
                      a.cube.values.size() * sizeof(float)) == 0);
}

TEST_CASE("overlapping patches are rejected") {
    SceneSpec spec = tiny_spec();
    ScenePatch p = spec.patches[0];
    p.x = 4; // overlaps the original patch
    p.cls = PatchClass::nonforest;
    spec.patches.push_back(p);
    CHECK_THROWS_WITH_AS(generate_scene(spec), doctest::Contains("overlap"), validation_error);
}

TEST_CASE("out-of-range change dates are rejected") {
    SceneSpec spec = tiny_spec();
    spec.patches[0].change_index = 0; // must be >= 1
    CHECK_THROWS_AS(generate_scene(spec), validation_error);
    spec.patches[0].change_index = 10; // == n_time
    CHECK_THROWS_AS(generate_scene(spec), validation_error);
}

TEST_CASE("acceptance scene: class sample means within 3 sigma / sqrt(n)") {
    const SceneSpec spec = acceptance_scene_spec();
    const Scene scene = generate_scene(spec);
    const int T = spec.n_time;

    // Expected seasonal offset averaged over the series (the sinusoid does
    // not integrate to zero over a non-integer number of periods).
    std::vector<double> seasonal_mean(spec.variables.size(), 0.0);
    for (int t = 0; t < T; ++t) {
        const double day = 12.0 * t;
        for (size_t v = 0; v < spec.variables.size(); ++v)
            seasonal_mean[v] += spec.seasonal_amplitude_db[v] *
                                std::sin(2.0 * M_PI * day / spec.seasonal_period_days) / T;
    }

    for (size_t v = 0; v < spec.variables.size(); ++v) {
        double sum = 0;
        int64_t n = 0;
        for (int y = 0; y < spec.height; ++y)
            for (int x = 0; x < spec.width; ++x) {
                if (!scene.forest_truth.at(y, x)) continue;
                for (int t = 0; t < T; ++t) {
                    sum += scene.cube.at(t, static_cast<int>(v), y, x);
                    ++n;
                }
            }
        const double mean = sum / n;
        const double expect = spec.forest.mean_db[v] + seasonal_mean[v];
        // Texture is static per pixel, so the effective sample count for the
        // texture term is the pixel count, not pixel*time.
        const int64_t n_pix = n / T;
        const double se = std::sqrt(spec.forest.std_db[v] * spec.forest.std_db[v] / n_pix +
                                    spec.noise_std_db * spec.noise_std_db / n);
        CHECK(std::fabs(mean - expect) < 3.0 * se);
    }
}

TEST_CASE("separability dial: a wider class gap never lowers PA") {
    double last_pa = -1.0;
    for (double gap : {0.6, 2.0, 4.0}) {
        SceneSpec spec;
        spec.width = 32;
        spec.height = 32;
        spec.n_time = 20;
        spec.variables = {"VV"};
        spec.seed = 77;
        spec.noise_std_db = 1.0;
        spec.seasonal_amplitude_db = {0.0};
        spec.forest = {{-7.0}, {0.3}};
        ScenePatch d;
        d.shape = ScenePatch::Shape::rect;
        d.x = 8;
        d.y = 8;
        d.w = 12;
        d.h = 12;
        d.cls = PatchClass::deforest;
        d.change_index = 8;
        d.params = {{-7.0 - gap}, {0.3}};
        spec.patches.push_back(d);
        const Scene scene = generate_scene(spec);

        const ForestModel model =
            fit_forest_model(scene.cube, scene.forest_truth, ModelParams{64, 0.05, 1e-6});
        const ChangeMap map = detect_cube(model, scene.cube, DetectorParams{});
        const AccuracyReport r = metrics(confusion(map, scene.change_truth));
        CHECK(r.pa >= last_pa);
        last_pa = r.pa;
    }
    CHECK(last_pa > 0.9); // the widest gap must be essentially fully detected
}

TEST_CASE("scene spec JSON round-trip") {
    const SceneSpec spec = acceptance_scene_spec(true);
    const SceneSpec back = parse_scene_spec(scene_spec_to_json(spec));
    const Scene a = generate_scene(spec);
    const Scene b = generate_scene(back);
    CHECK(std::memcmp(a.cube.values.data(), b.cube.values.data(),
                      a.cube.values.size() * sizeof(float)) == 0);
    CHECK(a.forest_truth.flags == b.forest_truth.flags);
    CHECK(a.nonforest_pool.flags == b.nonforest_pool.flags);
    CHECK(a.change_truth.change_index == b.change_truth.change_index);
}

} // TEST_SUITE
