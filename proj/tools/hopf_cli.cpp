#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "hopftk/linking.hpp"
#include "hopftk/lipschitz.hpp"
#include "hopftk/serialization.hpp"
#include "hopftk/verify.hpp"

namespace fs = std::filesystem;
using namespace hopftk;
using serialization::json;
using serialization::RunConfig;

namespace {

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

void emit(const RunConfig& cfg, const std::string& filename, const json& report) {
    json doc;
    doc["config"] = serialization::run_config_to_json(cfg);
    doc["report"] = report;
    fs::create_directories(cfg.out_dir);
    write_json(fs::path(cfg.out_dir) / filename, doc);
    std::cout << doc.dump(2) << "\n";
}

manifolds::SpherePoint draw_base_point(Rng& rng) {
    return {rng.unit_vec(3) * 0.5, 0.5};
}

int run_hopf_invariant(const RunConfig& cfg, const maps::MapDescriptor& m) {
    Rng rng(cfg.seed);
    const auto y = draw_base_point(rng);
    auto yp = draw_base_point(rng);
    while (manifolds::sphere_distance(y, yp) <= 0.15) yp = draw_base_point(rng);

    linking::HopfConfig hc;
    hc.trace.seeds = cfg.samples;
    hc.trace.step = cfg.step;
    hc.trace.rng_seed = cfg.seed;
    hc.gap_threshold = cfg.tol;

    const auto result = linking::hopf_invariant(m, y, yp, hc);

    json report = serialization::report_to_json(result);
    report["y"] = serialization::detail::vec_to_json(y.coords);
    report["yprime"] = serialization::detail::vec_to_json(yp.coords);

    fs::create_directories(cfg.out_dir);
    auto dump_curves = [&](const std::vector<fibers::FiberCurve>& curves,
                           const std::string& prefix) {
        for (std::size_t i = 0; i < curves.size(); ++i) {
            std::ofstream out(fs::path(cfg.out_dir) /
                              (prefix + "_" + std::to_string(i) + ".csv"));
            fibers::write_fiber_csv(out, curves[i]);
        }
    };
    dump_curves(result.fibers_y, "fiber_y");
    dump_curves(result.fibers_yprime, "fiber_yprime");

    emit(cfg, "hopf_invariant.json", report);
    return 0;
}

int run_lipschitz(const RunConfig& cfg, const maps::MapDescriptor& m) {
    const auto report = lipschitz::lipschitz_report(m, cfg.samples, cfg.seed);
    emit(cfg, "lipschitz.json", serialization::report_to_json(report));
    return 0;
}

int status_code(const verify::VerificationReport& r) {
    switch (r.status) {
        case verify::CheckStatus::Pass:
            return 0;
        case verify::CheckStatus::Fail:
            return 1;
        case verify::CheckStatus::Inconclusive:
            return 2;
    }
    return 1;
}

int run_verify(RunConfig& cfg, const maps::MapDescriptor& m) {
    Rng rng(cfg.seed);
    fibers::TraceConfig trace;
    trace.rng_seed = cfg.seed;
    trace.step = cfg.step;

    verify::VerificationReport report;
    if (cfg.check == "great-circles") {
        if (cfg.samples == 0) cfg.samples = 20;
        if (cfg.tol == 0.0) cfg.tol = 1e-6;
        std::vector<manifolds::SpherePoint> values;
        for (int i = 0; i < cfg.samples; ++i) values.push_back(draw_base_point(rng));
        report = verify::verify_great_circle_fibers(m, values, cfg.tol, trace);
    } else if (cfg.check == "parallel") {
        if (cfg.samples == 0) cfg.samples = 10;
        if (cfg.tol == 0.0) cfg.tol = 1e-6;
        std::vector<std::pair<manifolds::SpherePoint, manifolds::SpherePoint>> pairs;
        for (int i = 0; i < cfg.samples; ++i) {
            const auto y = draw_base_point(rng);
            auto z = draw_base_point(rng);
            while (manifolds::sphere_distance(y, z) <= 0.15) z = draw_base_point(rng);
            pairs.emplace_back(y, z);
        }
        report = verify::verify_parallel_fibers(m, pairs, cfg.tol, trace);
    } else if (cfg.check == "torus") {
        if (cfg.samples == 0) cfg.samples = 5;
        if (cfg.tol == 0.0) cfg.tol = 1e-6;
        report = verify::verify_torus_membership(m, cfg.samples, cfg.tol, trace);
    } else if (cfg.check == "key-lemma") {
        if (cfg.samples == 0) cfg.samples = 200;
        if (cfg.tol == 0.0) cfg.tol = 1e-6;
        const auto f1 = maps::isometry_conjugate(
            maps::identity_map({2, 1.0}), {algebra::random_rotation(3, cfg.seed)}, {});
        Vec center(3);
        center << 0, 0, 1;
        const auto f2 =
            maps::bump_perturb(maps::identity_map({2, 1.0}), center, 0.3, 1.0);
        verify::KeyLemmaConfig kc;
        kc.starts = cfg.samples;
        kc.seed = cfg.seed;
        const auto result = verify::key_lemma_search(f1, f2, kc);
        report.check = "key-lemma";
        report.tolerance = cfg.tol;
        report.seed = cfg.seed;
        report.map = "rotation vs bump-perturbed identity on S^2";
        report.residual = result.residual;
        report.parameters["starts_used"] = result.starts_used;
        report.status = result.residual < cfg.tol ? verify::CheckStatus::Pass
                                                  : verify::CheckStatus::Inconclusive;
    } else if (cfg.check == "lemma-f") {
        if (cfg.tol == 0.0) cfg.tol = 1e-10;
        report = verify::verify_lemma_f(2, cfg.seed, cfg.tol);
    } else if (cfg.check == "theorem-c") {
        if (cfg.samples == 0) cfg.samples = 1000;
        if (cfg.tol == 0.0) cfg.tol = 1e-9;
        report = verify::theorem_c_checks(algebra::random_ocs(4, cfg.seed),
                                          algebra::random_ocs(4, cfg.seed + 1),
                                          cfg.seed, cfg.tol, cfg.samples);
    } else if (cfg.check == "theorem-d") {
        if (cfg.samples == 0) cfg.samples = 1000;
        if (cfg.tol == 0.0) cfg.tol = 1e-10;
        report = verify::theorem_d_checks(cfg.seed, cfg.samples, cfg.tol);
    } else if (cfg.check == "sasaki-lengths") {
        if (cfg.samples == 0) cfg.samples = 20000;
        if (cfg.tol == 0.0) cfg.tol = 1e-6;
        report = verify::verify_sasaki_lengths(cfg.samples, cfg.tol);
    } else {
        std::cerr << "unknown check '" << cfg.check << "'\n";
        return 1;
    }
    emit(cfg, "verify_" + cfg.check + ".json", serialization::report_to_json(report));
    return status_code(report);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hopf fibration geometry toolkit"};
    app.require_subcommand(1);

    std::string map_arg = "hopf";
    std::uint64_t seed = 0;
    int samples = 0;
    double tol = 0.0;
    double step = 5e-3;
    std::string out_dir = "hopftk-out";
    std::string check;

    auto add_common = [&](CLI::App* cmd, bool needs_check) {
        cmd->add_option("--map", map_arg, "builtin name or JSON descriptor");
        cmd->add_option("--seed", seed, "deterministic seed (required)")->required();
        cmd->add_option("--samples", samples, "sample count (command default if 0)");
        cmd->add_option("--tol", tol, "tolerance (command default if 0)");
        cmd->add_option("--step", step, "fiber tracing step");
        cmd->add_option("--out", out_dir, "output directory");
        if (needs_check)
            cmd->add_option("--check", check,
                            "great-circles | parallel | torus | key-lemma | lemma-f | "
                            "theorem-c | theorem-d | sasaki-lengths")
                ->required();
    };

    auto* hopf_cmd = app.add_subcommand("hopf-invariant",
                                        "trace two fibers and report the total "
                                        "linking number");
    add_common(hopf_cmd, false);
    auto* lip_cmd = app.add_subcommand("lipschitz",
                                       "sampled Lipschitz lower bound and spectral "
                                       "estimate");
    add_common(lip_cmd, false);
    auto* verify_cmd = app.add_subcommand("verify", "run a named verification check");
    add_common(verify_cmd, true);

    CLI11_PARSE(app, argc, argv);

    try {
        const maps::MapDescriptor m = serialization::parse_map_argument(map_arg);
        RunConfig cfg;
        cfg.map = serialization::map_to_json(m);
        cfg.seed = seed;
        cfg.samples = samples;
        cfg.tol = tol;
        cfg.step = step;
        cfg.out_dir = out_dir;
        cfg.check = check;

        if (app.got_subcommand(hopf_cmd)) {
            cfg.command = "hopf-invariant";
            if (cfg.samples == 0) cfg.samples = 64;
            if (cfg.tol == 0.0) cfg.tol = 0.1;
            return run_hopf_invariant(cfg, m);
        }
        if (app.got_subcommand(lip_cmd)) {
            cfg.command = "lipschitz";
            if (cfg.samples == 0) cfg.samples = 10000;
            return run_lipschitz(cfg, m);
        }
        cfg.command = "verify";
        return run_verify(cfg, m);
    } catch (const linking::LinkError& e) {
        std::cerr << "linking error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
