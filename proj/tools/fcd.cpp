// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0
//
// fcd — raster time-series change detection against a reference class.
// Subcommands cover each pipeline stage plus an end-to-end `run`.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fcd/accuracy.hpp"
#include "fcd/cube_io.hpp"
#include "fcd/detector.hpp"
#include "fcd/forest_model.hpp"
#include "fcd/kernels/kernels.hpp"
#include "fcd/log.hpp"
#include "fcd/nlm.hpp"
#include "fcd/pipeline.hpp"
#include "fcd/robustness.hpp"
#include "fcd/simulator.hpp"

namespace fs = std::filesystem;
using namespace fcd;

namespace {

struct TracePixel {
    int x = 0, y = 0;
};

std::vector<TracePixel> parse_trace_args(const std::vector<std::string>& args) {
    std::vector<TracePixel> out;
    for (const auto& a : args) {
        const auto comma = a.find(',');
        if (comma == std::string::npos)
            throw validation_error("trace", "expected x,y got '" + a + "'");
        out.push_back({std::stoi(a.substr(0, comma)), std::stoi(a.substr(comma + 1))});
    }
    return out;
}

int run_simulate(const std::string& spec_path, const std::string& preset,
                 const std::string& out_dir, int threads) {
    SceneSpec spec;
    if (!spec_path.empty()) {
        spec = load_scene_spec(spec_path);
    } else if (preset == "acceptance") {
        spec = acceptance_scene_spec(false);
    } else if (preset == "acceptance-lookalike") {
        spec = acceptance_scene_spec(true);
    } else {
        throw validation_error("spec", "need --spec FILE or --preset acceptance[-lookalike]");
    }
    const Scene scene = generate_scene(spec, threads);
    fs::create_directories(out_dir);
    write_cube(scene.cube, out_dir);
    write_mask(scene.forest_truth, (fs::path(out_dir) / "forest_mask.json").string());
    write_mask(scene.nonforest_pool, (fs::path(out_dir) / "pool_mask.json").string());
    write_reference_map(scene.change_truth, (fs::path(out_dir) / "truth.json").string());
    std::ofstream echo((fs::path(out_dir) / "scene.json").string(), std::ios::trunc);
    echo << scene_spec_to_json(spec).dump(2) << "\n";
    log_info("simulate", "scene written",
             {{"out", out_dir},
              {"forest_pixels", scene.forest_truth.count()},
              {"pool_pixels", scene.nonforest_pool.count()}});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"raster time-series change detection against a stable reference class"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = auto)")->capture_default_str();

    // --- simulate ---
    auto* sim = app.add_subcommand("simulate", "generate a synthetic scene with ground truth");
    std::string sim_spec, sim_preset, sim_out;
    sim->add_option("--spec", sim_spec, "scene spec JSON");
    sim->add_option("--preset", sim_preset, "built-in scene: acceptance | acceptance-lookalike");
    sim->add_option("--out", sim_out, "output directory")->required();

    // --- denoise ---
    auto* den = app.add_subcommand("denoise", "non-local-means denoise a cube");
    std::string den_in, den_out;
    NlmParams nlm;
    double den_h = 0, den_sigma = -1;
    den->add_option("--in", den_in, "cube manifest")->required();
    den->add_option("--out", den_out, "output directory")->required();
    den->add_option("--patch-radius", nlm.patch_radius)->capture_default_str();
    den->add_option("--search-xy", nlm.search_radius_xy)->capture_default_str();
    den->add_option("--search-t", nlm.search_radius_t)->capture_default_str();
    auto* den_h_opt = den->add_option("--h", den_h, "filter strength (default 0.8 x sigma)");
    auto* den_sigma_opt = den->add_option("--sigma", den_sigma, "noise sigma override");

    // --- fit ---
    auto* fit = app.add_subcommand("fit", "fit the reference-class model");
    std::string fit_cube, fit_mask, fit_out;
    ModelParams model_params;
    fit->add_option("--cube", fit_cube)->required();
    fit->add_option("--mask", fit_mask)->required();
    fit->add_option("--bins", model_params.n_bins)->capture_default_str();
    fit->add_option("--q", model_params.q, "quantile level")->capture_default_str();
    fit->add_option("--epsilon", model_params.epsilon)->capture_default_str();
    fit->add_option("--out", fit_out, "model JSON path")->required();

    // --- detect ---
    auto* det = app.add_subcommand("detect", "accumulate evidence and declare changes");
    std::string det_cube, det_model, det_out, det_mode = "coherent";
    DetectorParams det_params;
    std::vector<std::string> det_trace;
    det->add_option("--cube", det_cube)->required();
    det->add_option("--model", det_model)->required();
    det->add_option("--L", det_params.L, "evidence threshold")->capture_default_str();
    det->add_option("--mode", det_mode, "coherent | paper-literal")->capture_default_str();
    det->add_option("--out", det_out, "output directory")->required();
    det->add_option("--trace", det_trace, "pixel x,y to dump a trace CSV for (repeatable)");

    // --- assess ---
    auto* ass = app.add_subcommand("assess", "compare a change map against a reference");
    std::string ass_changes, ass_ref, ass_out;
    ass->add_option("--changes", ass_changes, "changes.json")->required();
    ass->add_option("--ref", ass_ref, "reference map JSON")->required();
    ass->add_option("--out", ass_out, "report JSON path")->required();

    // --- tune ---
    auto* tun = app.add_subcommand("tune", "grid-search q and L for the best balanced accuracy");
    std::string tun_cube, tun_mask, tun_ref, tun_out, tun_ba = "standard";
    std::string tun_qs, tun_ls;
    tun->add_option("--cube", tun_cube)->required();
    tun->add_option("--mask", tun_mask)->required();
    tun->add_option("--ref", tun_ref)->required();
    tun->add_option("--ba", tun_ba, "standard | paper")->capture_default_str();
    tun->add_option("--q-grid", tun_qs, "comma list (default 0.01,0.02,0.05,0.1,0.2)");
    tun->add_option("--l-grid", tun_ls, "comma list (default 2,5,10,100,1000,10000)");
    tun->add_option("--out", tun_out, "tuned JSON path")->required();

    // --- sweep ---
    auto* swp = app.add_subcommand("sweep", "label-noise robustness sweep");
    std::string swp_cube, swp_truth, swp_pool, swp_mask, swp_out;
    std::string swp_fracs = "0:0.22:0.02";
    SweepParams sweep_params;
    swp->add_option("--cube", swp_cube)->required();
    swp->add_option("--truth", swp_truth, "truth reference map JSON")->required();
    swp->add_option("--mask", swp_mask, "forest ensemble mask JSON")->required();
    swp->add_option("--pool", swp_pool, "non-forest pool mask JSON")->required();
    swp->add_option("--fractions", swp_fracs, "begin:end:step or comma list")
        ->capture_default_str();
    swp->add_option("--seed", sweep_params.seed)->capture_default_str();
    swp->add_option("--bins", sweep_params.model.n_bins)->capture_default_str();
    swp->add_option("--q", sweep_params.model.q)->capture_default_str();
    swp->add_option("--L", sweep_params.detector.L)->capture_default_str();
    swp->add_option("--out", swp_out, "output directory")->required();

    // --- run ---
    auto* run = app.add_subcommand("run", "full pipeline: denoise, fit, detect, assess");
    std::string run_config_path, run_cube, run_mask, run_ref, run_out, run_mode;
    double run_q = -1, run_l = -1;
    int run_bins = -1;
    bool run_no_denoise = false;
    run->add_option("--config", run_config_path, "run config JSON (flags override it)");
    run->add_option("--cube", run_cube);
    run->add_option("--mask", run_mask);
    run->add_option("--ref", run_ref);
    run->add_option("--out", run_out);
    run->add_option("--q", run_q);
    run->add_option("--L", run_l);
    run->add_option("--bins", run_bins);
    run->add_option("--mode", run_mode, "coherent | paper-literal");
    run->add_flag("--no-denoise", run_no_denoise, "skip the NLM stage");

    CLI11_PARSE(app, argc, argv);

    std::string stage = "cli";
    try {
        if (sim->parsed()) {
            stage = "simulate";
            return run_simulate(sim_spec, sim_preset, sim_out, threads);
        }
        if (den->parsed()) {
            stage = "denoise";
            if (den_h_opt->count()) nlm.h = den_h;
            if (den_sigma_opt->count()) nlm.sigma = den_sigma;
            const DataCube cube = read_cube(den_in);
            const DataCube filtered = denoise_cube(cube, nlm, threads);
            write_cube(filtered, den_out);
            log_info(stage, "denoised cube written", {{"out", den_out}});
            return 0;
        }
        if (fit->parsed()) {
            stage = "fit";
            const DataCube cube = read_cube(fit_cube);
            const ForestMask mask = read_mask(fit_mask);
            const ForestModel model = fit_forest_model(cube, mask, model_params, threads);
            save_model(model, fit_out);
            log_info(stage, "model written", {{"out", fit_out}, {"ensemble", mask.count()}});
            return 0;
        }
        if (det->parsed()) {
            stage = "detect";
            det_params.mode = detector_mode_from_name(det_mode);
            const DataCube cube = read_cube(det_cube);
            const ForestModel model = load_model(det_model);
            const ChangeMap map = detect_cube(model, cube, det_params, threads);
            fs::create_directories(det_out);
            write_change_map(map, cube.dates, det_out);
            for (const auto& px : parse_trace_args(det_trace)) {
                if (px.x < 0 || px.x >= cube.width || px.y < 0 || px.y >= cube.height)
                    throw validation_error("trace", "pixel outside the cube");
                const EvidenceTrace trace =
                    detect_pixel(model, pixel_series(cube, px.y, px.x), det_params);
                char name[64];
                std::snprintf(name, sizeof(name), "trace_%d_%d.csv", px.x, px.y);
                write_trace_csv((fs::path(det_out) / name).string(), trace, cube.dates);
            }
            log_info(stage, "change map written", {{"out", det_out}});
            return 0;
        }
        if (ass->parsed()) {
            stage = "assess";
            std::vector<Date> dates;
            const ChangeMap map = read_change_map(ass_changes, &dates);
            const ReferenceChangeMap ref = read_reference_map(ass_ref);
            const AccuracyReport report = assess(map, dates, ref);
            const std::string csv =
                (fs::path(ass_out).parent_path() / (fs::path(ass_out).stem().string() + ".csv"))
                    .string();
            write_report(report, ass_out, csv);
            log_info(stage, "report written",
                     {{"out", ass_out},
                      {"pa", report.pa},
                      {"ua", report.ua},
                      {"ba_standard", report.ba_standard}});
            return 0;
        }
        if (tun->parsed()) {
            stage = "tune";
            const DataCube cube = read_cube(tun_cube);
            const ForestMask mask = read_mask(tun_mask);
            const ReferenceChangeMap ref = read_reference_map(tun_ref);
            std::vector<double> qs = kDefaultTuneQ, ls = kDefaultTuneL;
            if (!tun_qs.empty()) qs = parse_fractions(tun_qs);
            if (!tun_ls.empty()) ls = parse_fractions(tun_ls);
            const TuneResult result =
                tune_thresholds(cube, mask, ref, qs, ls, ba_variant_from_name(tun_ba),
                                ModelParams{}, DetectorParams{}, threads);
            write_tune_result(result, tun_out);
            log_info(stage, "tuned", {{"q", result.q}, {"L", result.L}});
            return 0;
        }
        if (swp->parsed()) {
            stage = "sweep";
            sweep_params.fractions = parse_fractions(swp_fracs);
            const DataCube cube = read_cube(swp_cube);
            const ReferenceChangeMap truth = read_reference_map(swp_truth);
            const ForestMask ensemble = read_mask(swp_mask);
            const ForestMask pool = read_mask(swp_pool);
            noise_sweep(cube, truth, ensemble, pool, sweep_params, swp_out, threads);
            log_info(stage, "sweep written", {{"out", swp_out}});
            return 0;
        }
        if (run->parsed()) {
            stage = "run";
            RunConfig config;
            if (!run_config_path.empty()) config = load_run_config(run_config_path);
            if (!run_cube.empty()) config.cube_path = run_cube;
            if (!run_mask.empty()) config.mask_path = run_mask;
            if (!run_ref.empty()) config.reference_path = run_ref;
            if (!run_out.empty()) config.out_dir = run_out;
            if (run_q >= 0) config.model.q = run_q;
            if (run_l >= 0) config.detector.L = run_l;
            if (run_bins >= 0) config.model.n_bins = run_bins;
            if (!run_mode.empty()) config.detector.mode = detector_mode_from_name(run_mode);
            if (run_no_denoise) config.denoise = false;
            config.threads = threads;
            run_pipeline(config);
            return 0;
        }
    } catch (const validation_error& e) {
        log_error(stage, e.what(), {{"field", e.field()}});
        return 1;
    } catch (const io_error& e) {
        log_error(stage, e.what(), {{"path", e.path()}});
        return 1;
    } catch (const std::exception& e) {
        log_error(stage, e.what());
        return 1;
    }
    return 1;
}
