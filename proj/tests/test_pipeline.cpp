// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>
#include <map>

#include "fcd/cube_io.hpp"
#include "fcd/pipeline.hpp"
#include "fcd/simulator.hpp"
#include "test_util.hpp"

using namespace fcd;
using testutil::TempDir;

namespace {

std::string file_bytes(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

/// Small detectable scene written to disk; returns the data directory.
void write_scene(const std::string& dir) {
    SceneSpec spec;
    spec.width = 24;
    spec.height = 20;
    spec.n_time = 14;
    spec.variables = {"VV", "VH"};
    spec.seed = 3;
    spec.noise_std_db = 0.9;
    spec.seasonal_amplitude_db = {0.2, 0.2};
    spec.forest = {{-7.0, -12.0}, {0.3, 0.3}};
    ScenePatch d;
    d.shape = ScenePatch::Shape::rect;
    d.x = 3;
    d.y = 3;
    d.w = 8;
    d.h = 8;
    d.cls = PatchClass::deforest;
    d.change_index = 5;
    d.params = {{-11.5, -16.5}, {0.4, 0.4}};
    spec.patches.push_back(d);
    const Scene scene = generate_scene(spec);
    write_cube(scene.cube, dir);
    write_mask(scene.forest_truth, (std::filesystem::path(dir) / "mask.json").string());
    write_reference_map(scene.change_truth,
                        (std::filesystem::path(dir) / "truth.json").string());
}

RunConfig base_config(const std::string& data_dir, const std::string& out_dir) {
    RunConfig c;
    c.cube_path = data_dir + "/cube.json";
    c.mask_path = data_dir + "/mask.json";
    c.reference_path = data_dir + "/truth.json";
    c.out_dir = out_dir;
    c.nlm.search_radius_xy = 2; // keep the test fast
    c.model.q = 0.05;
    c.detector.L = 10;
    return c;
}

} // namespace

TEST_SUITE("pipeline") {

TEST_CASE("run_pipeline writes every artifact and matches manual stages byte-for-byte") {
    TempDir data("pipe_data"), out_a("pipe_a"), out_b("pipe_b");
    write_scene(data.str());

    RunConfig config = base_config(data.str(), out_a.str());
    run_pipeline(config);
    for (const char* f : {"model.json", "changes.json", "changes.bin", "changes.csv",
                          "changes.png", "report.json", "report.csv", "provenance.json"})
        CHECK(std::filesystem::exists(out_a.path() / f));

    // Manual stage-by-stage invocation through the library surfaces.
    const DataCube cube = read_cube(config.cube_path);
    const ForestMask mask = read_mask(config.mask_path);
    const DataCube filtered = denoise_cube(cube, config.nlm, config.threads);
    TempDir stage_dir("pipe_stage");
    write_cube(filtered, stage_dir.str());
    const DataCube reloaded = read_cube((stage_dir.path() / "cube.json").string());
    const ForestModel model = fit_forest_model(reloaded, mask, config.model);
    save_model(model, (out_b.path() / "model.json").string());
    const ChangeMap map = detect_cube(model, reloaded, config.detector);
    write_change_map(map, reloaded.dates, out_b.str());

    CHECK(file_bytes(out_a.path() / "model.json") == file_bytes(out_b.path() / "model.json"));
    CHECK(file_bytes(out_a.path() / "changes.bin") == file_bytes(out_b.path() / "changes.bin"));
    CHECK(file_bytes(out_a.path() / "changes.csv") == file_bytes(out_b.path() / "changes.csv"));
    CHECK(file_bytes(out_a.path() / "changes.png") == file_bytes(out_b.path() / "changes.png"));
}

TEST_CASE("rerun with identical config: identical hash and identical bytes") {
    TempDir data("pipe_rerun"), out_a("pipe_r1"), out_b("pipe_r2");
    write_scene(data.str());

    RunConfig a = base_config(data.str(), out_a.str());
    run_pipeline(a);
    const std::string bytes_first = file_bytes(out_a.path() / "changes.bin");
    const std::string prov_first = file_bytes(out_a.path() / "provenance.json");
    run_pipeline(a); // overwrite in place
    CHECK(file_bytes(out_a.path() / "changes.bin") == bytes_first);
    CHECK(file_bytes(out_a.path() / "provenance.json") == prov_first);

    // Same inputs into a different out dir: everything but the recorded
    // out path (and thus the hash) matches.
    RunConfig b = base_config(data.str(), out_b.str());
    run_pipeline(b);
    CHECK(file_bytes(out_b.path() / "changes.bin") == bytes_first);
    CHECK(file_bytes(out_b.path() / "report.json") == file_bytes(out_a.path() / "report.json"));
}

TEST_CASE("worker count never changes the artifacts") {
    TempDir data("pipe_threads"), out("pipe_t");
    write_scene(data.str());
    RunConfig config = base_config(data.str(), out.str());

    config.threads = 1;
    run_pipeline(config);
    std::map<std::string, std::string> single;
    for (const char* f : {"model.json", "changes.bin", "changes.csv", "report.json",
                          "provenance.json"})
        single[f] = file_bytes(out.path() / f);

    config.threads = 4;
    run_pipeline(config); // same out dir, same config identity
    for (const auto& [name, bytes] : single) CHECK(file_bytes(out.path() / name) == bytes);
}

TEST_CASE("missing mask path fails validation naming the field") {
    TempDir data("pipe_missing"), out("pipe_m_out");
    write_scene(data.str());
    RunConfig c = base_config(data.str(), out.str());
    c.mask_path = data.str() + "/does_not_exist.json";
    try {
        run_pipeline(c);
        FAIL("expected validation_error");
    } catch (const validation_error& e) {
        CHECK(e.field() == "mask");
    }
    CHECK(!std::filesystem::exists(out.path() / "changes.bin"));
}

TEST_CASE("config JSON parsing and the threads-free hash") {
    const nlohmann::json j = {
        {"cube", "a.json"}, {"mask", "b.json"}, {"out", "o"},
        {"model", {{"bins", 32}, {"q", 0.02}}},  {"detector", {{"L", 100.0}, {"mode", "paper-literal"}}},
        {"nlm", {{"search_xy", 2}}}, {"seed", 7}, {"threads", 3}};
    const RunConfig c = run_config_from_json(j);
    CHECK(c.cube_path == "a.json");
    CHECK(c.model.n_bins == 32);
    CHECK(c.model.q == 0.02);
    CHECK(c.detector.L == 100.0);
    CHECK(c.detector.mode == DetectorMode::paper_literal);
    CHECK(c.nlm.search_radius_xy == 2);
    CHECK(c.seed == 7);
    CHECK(c.threads == 3);

    RunConfig d = c;
    d.threads = 1;
    CHECK(config_hash(c) == config_hash(d)); // execution detail, not identity
    d.model.q = 0.05;
    CHECK(config_hash(c) != config_hash(d));
}

} // TEST_SUITE
