// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#include "fcd/pipeline.hpp"

#include <filesystem>
#include <fstream>

#include "fcd/cube_io.hpp"
#include "fcd/kernels/kernels.hpp"
#include "fcd/log.hpp"

namespace fcd {

namespace fs = std::filesystem;

void RunConfig::validate() const {
    if (cube_path.empty()) throw validation_error("cube", "path not set");
    if (!fs::exists(cube_path)) throw validation_error("cube", "no such file: " + cube_path);
    if (mask_path.empty()) throw validation_error("mask", "path not set");
    if (!fs::exists(mask_path)) throw validation_error("mask", "no such file: " + mask_path);
    if (!reference_path.empty() && !fs::exists(reference_path))
        throw validation_error("reference", "no such file: " + reference_path);
    if (out_dir.empty()) throw validation_error("out", "output directory not set");
    nlm.validate();
    model.validate();
    detector.validate();
}

RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig c;
    auto opt = [&](const nlohmann::json& obj, const char* key, auto& dst) {
        if (obj.contains(key)) {
            try {
                obj.at(key).get_to(dst);
            } catch (const nlohmann::json::exception&) {
                throw validation_error(key, "wrong type in run config");
            }
        }
    };
    opt(j, "cube", c.cube_path);
    opt(j, "mask", c.mask_path);
    opt(j, "reference", c.reference_path);
    opt(j, "out", c.out_dir);
    opt(j, "denoise", c.denoise);
    opt(j, "seed", c.seed);
    opt(j, "threads", c.threads);
    if (j.contains("nlm")) {
        const auto& n = j.at("nlm");
        opt(n, "patch_radius", c.nlm.patch_radius);
        opt(n, "search_xy", c.nlm.search_radius_xy);
        opt(n, "search_t", c.nlm.search_radius_t);
        if (n.contains("h") && !n.at("h").is_null()) c.nlm.h = n.at("h").get<double>();
        if (n.contains("sigma") && !n.at("sigma").is_null())
            c.nlm.sigma = n.at("sigma").get<double>();
    }
    if (j.contains("model")) {
        const auto& m = j.at("model");
        opt(m, "bins", c.model.n_bins);
        opt(m, "q", c.model.q);
        opt(m, "epsilon", c.model.epsilon);
    }
    if (j.contains("detector")) {
        const auto& d = j.at("detector");
        opt(d, "L", c.detector.L);
        std::string mode = detector_mode_name(c.detector.mode);
        opt(d, "mode", mode);
        c.detector.mode = detector_mode_from_name(mode);
    }
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error(path, "cannot open for reading");
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(path, std::string("invalid JSON: ") + e.what());
    }
    return run_config_from_json(j);
}

nlohmann::json run_config_canonical_json(const RunConfig& c) {
    nlohmann::json nlm = {{"patch_radius", c.nlm.patch_radius},
                          {"search_xy", c.nlm.search_radius_xy},
                          {"search_t", c.nlm.search_radius_t}};
    nlm["h"] = c.nlm.h ? nlohmann::json(*c.nlm.h) : nlohmann::json(nullptr);
    nlm["sigma"] = c.nlm.sigma ? nlohmann::json(*c.nlm.sigma) : nlohmann::json(nullptr);
    return nlohmann::json{
        {"cube", c.cube_path},
        {"mask", c.mask_path},
        {"reference", c.reference_path},
        {"out", c.out_dir},
        {"denoise", c.denoise},
        {"nlm", nlm},
        {"model", {{"bins", c.model.n_bins}, {"q", c.model.q}, {"epsilon", c.model.epsilon}}},
        {"detector",
         {{"L", c.detector.L}, {"mode", detector_mode_name(c.detector.mode)}}},
        {"seed", c.seed}};
}

std::string config_hash(const RunConfig& c) {
    const std::string dump = run_config_canonical_json(c).dump();
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : dump) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

PipelineResult run_pipeline(const RunConfig& config) {
    config.validate();
    fs::create_directories(config.out_dir);

    auto run_stage = [&](const char* stage, auto&& fn) {
        try {
            log_info(stage, "start");
            return fn();
        } catch (const validation_error& e) {
            throw validation_error(std::string(stage) + "." + e.field(), e.what());
        }
    };

    DataCube cube = run_stage("load", [&] { return read_cube(config.cube_path); });
    const ForestMask mask = read_mask(config.mask_path);

    if (config.denoise)
        cube = run_stage("denoise",
                         [&] { return denoise_cube(cube, config.nlm, config.threads); });

    const ForestModel model = run_stage(
        "fit", [&] { return fit_forest_model(cube, mask, config.model, config.threads); });
    save_model(model, (fs::path(config.out_dir) / "model.json").string());

    PipelineResult result;
    result.map = run_stage(
        "detect", [&] { return detect_cube(model, cube, config.detector, config.threads); });
    write_change_map(result.map, cube.dates, config.out_dir);

    if (!config.reference_path.empty()) {
        const ReferenceChangeMap ref = read_reference_map(config.reference_path);
        result.report =
            run_stage("assess", [&] { return assess(result.map, cube.dates, ref); });
        result.assessed = true;
        write_report(result.report, (fs::path(config.out_dir) / "report.json").string(),
                     (fs::path(config.out_dir) / "report.csv").string());
    }

    // Machine-readable provenance; deliberately free of timestamps and the
    // worker count so reruns produce identical bytes.
    const nlohmann::json prov = {{"config", run_config_canonical_json(config)},
                                 {"config_hash", config_hash(config)},
                                 {"seed", config.seed},
                                 {"kernels", kernels::active_kernels().name},
                                 {"format_version", 1}};
    std::ofstream f((fs::path(config.out_dir) / "provenance.json").string(), std::ios::trunc);
    if (!f) throw io_error(config.out_dir + "/provenance.json", "cannot open for writing");
    f << prov.dump(2) << "\n";
    if (!f) throw io_error(config.out_dir + "/provenance.json", "write failed");

    log_info("pipeline", "done", {{"out", config.out_dir}});
    return result;
}

} // namespace fcd
