// Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
// Run via ctest (target `acceptance`) or directly: ./acceptance

#include <gtest/gtest.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hopftk/linking.hpp"
#include "hopftk/lipschitz.hpp"
#include "hopftk/serialization.hpp"
#include "hopftk/verify.hpp"

namespace fs = std::filesystem;
using namespace hopftk;
using serialization::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args, const fs::path& workdir) {
    const std::string cmd =
        "cd " + workdir.string() + " && " + HOPFTK_CLI_PATH + " " + args + " 2>&1";
    std::array<char, 4096> buffer{};
    RunResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return result;
    while (fgets(buffer.data(), buffer.size(), pipe) != nullptr)
        result.output += buffer.data();
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("hopftk_acc_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

void report_line(int criterion, const char* what) {
    std::printf("[CRITERION %d] %s - %s\n", criterion,
                ::testing::Test::HasFailure() ? "FAIL" : "PASS", what);
    std::fflush(stdout);
}

manifolds::SpherePoint base_point(Rng& rng) {
    return {rng.unit_vec(3) * 0.5, 0.5};
}

}  // namespace

TEST(Acceptance, Criterion1_HopfInvariantViaCli) {
    const auto dir = fresh_dir("c1");

    const auto t0 = std::chrono::steady_clock::now();
    const auto base = run_cli("hopf-invariant --map hopf --seed 5 --out hopf", dir);
    EXPECT_LT(seconds_since(t0), 60.0);
    ASSERT_EQ(base.exit_code, 0) << base.output;
    const json base_doc = json::parse(slurp(dir / "hopf" / "hopf_invariant.json"));
    const long base_value = base_doc.at("report").at("hopf_invariant").get<long>();
    EXPECT_EQ(std::abs(base_value), 1);
    EXPECT_LT(base_doc.at("report").at("max_gap").get<double>(), 0.02);
    EXPECT_EQ(base_doc.at("report").at("crossing_total").get<long>(), base_value);

    for (int d : {-2, -1, 0, 1, 2, 3}) {
        const auto td = std::chrono::steady_clock::now();
        const std::string out = "power_" + std::to_string(d + 2);
        const auto res = run_cli("hopf-invariant --map 'power(" + std::to_string(d) +
                                     ")' --seed 5 --out " + out,
                                 dir);
        EXPECT_LT(seconds_since(td), 60.0) << "degree " << d;
        ASSERT_EQ(res.exit_code, 0) << res.output;
        const json doc = json::parse(slurp(dir / out / "hopf_invariant.json"));
        EXPECT_EQ(doc.at("report").at("hopf_invariant").get<long>(), d * base_value)
            << "degree " << d;
        EXPECT_LT(doc.at("report").at("max_gap").get<double>(), 0.02);
        // gauss and crossing agreement is enforced in-process; re-check here
        EXPECT_EQ(doc.at("report").at("crossing_total").get<long>(),
                  doc.at("report").at("hopf_invariant").get<long>());
    }
    report_line(1, "Hopf invariant: base map magnitude 1, power(d) scales, "
                   "gauss/crossing agree, < 60 s per map");
}

TEST(Acceptance, Criterion2_HopfProjectionsHaveLipschitzConstantOne) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<maps::MapDescriptor> projections = {
        maps::hopf_complex(1), maps::hopf_complex(2), maps::hopf_quaternionic(1),
        maps::hopf_octonionic()};
    for (const auto& m : projections) {
        const auto report = lipschitz::pair_lower_bound(m, 10000, 23);
        EXPECT_GE(report.pair_lower, 0.999) << maps::map_name(m);
        EXPECT_LE(report.pair_lower, 1.001) << maps::map_name(m);
        const double spectral = lipschitz::spectral_estimate(m, 10000, 29);
        EXPECT_GE(spectral, 0.999) << maps::map_name(m);
        EXPECT_LE(spectral, 1.001) << maps::map_name(m);
    }
    EXPECT_LT(seconds_since(t0), 120.0);
    report_line(2, "Lipschitz constant 1 for the complex, quaternionic and "
                   "octonionic Hopf projections at 1e4 samples, < 120 s");
}

TEST(Acceptance, Criterion3_TheoremAGeometryAtTheMinimizer) {
    const auto m = maps::hopf_complex(1);
    Rng rng(31);

    // 20 random fibers fit great circles to 1e-8
    for (int i = 0; i < 20; ++i) {
        const auto curves = fibers::trace_fiber(m, base_point(rng));
        ASSERT_EQ(curves.size(), 1u);
        EXPECT_LT(fibers::fit_great_circle(curves[0]).max_residual, 1e-8);
    }

    // 10 fiber pairs: constant distance equal to the base distance
    for (int i = 0; i < 10; ++i) {
        const auto y = base_point(rng);
        auto z = base_point(rng);
        while (manifolds::sphere_distance(y, z) <= 0.15) z = base_point(rng);
        const double alpha = manifolds::sphere_distance(y, z);
        const auto k1 = fibers::trace_fiber(m, y)[0];
        const auto k2 = fibers::trace_fiber(m, z)[0];
        const auto stats = fibers::fiber_distance_stats(k1, k2);
        EXPECT_LT(stats.max - stats.min, 1e-6);
        EXPECT_NEAR(stats.min, alpha, 1e-6);
    }

    // torus membership
    fibers::TraceConfig cfg;
    cfg.rng_seed = 33;
    const auto torus = verify::verify_torus_membership(m, 3, 1e-6, cfg);
    EXPECT_TRUE(torus.pass());
    EXPECT_LT(torus.residual, 1e-6);
    report_line(3, "Hopf fibers are parallel great circles on the expected tori");
}

TEST(Acceptance, Criterion4_NegativeControls) {
    Vec center(4);
    center << 1, 0, 0, 0;
    Rng rng(37);
    for (double amp : {0.05, 0.1, 0.2}) {
        const auto m = maps::bump_perturb(maps::hopf_complex(1), center, amp, 0.5);

        // Hopf invariant survives the perturbation
        Vec y1(3), y2(3);
        y1 << 0.2, -0.1, std::sqrt(0.25 - 0.05);
        y2 << -0.3, 0.1, -std::sqrt(0.25 - 0.1);
        const auto inv = linking::hopf_invariant(m, {y1, 0.5}, {y2, 0.5});
        EXPECT_EQ(inv.value, 1) << "amplitude " << amp;

        // ... but the fiber geometry degrades measurably
        std::vector<manifolds::SpherePoint> values = {
            {maps::evaluate(m, center), 0.5}, base_point(rng)};
        const auto gc = verify::verify_great_circle_fibers(m, values, 1e-3);
        EXPECT_FALSE(gc.pass()) << "amplitude " << amp;
        EXPECT_GT(gc.residual, 1e-3);

        Vec near_pole(3);
        near_pole << 0.05, 0.0, std::sqrt(0.25 - 0.0025);
        std::vector<std::pair<manifolds::SpherePoint, manifolds::SpherePoint>> pairs =
            {{{near_pole, 0.5}, base_point(rng)}};
        const auto par = verify::verify_parallel_fibers(m, pairs, 1e-6);
        EXPECT_FALSE(par.pass()) << "amplitude " << amp;

        // and the map stretches strictly beyond 1
        const auto lip = lipschitz::pair_lower_bound(m, 4000, 41);
        EXPECT_GT(lip.pair_lower, 1.005) << "amplitude " << amp;
    }
    report_line(4, "bump-perturbed Hopf maps keep invariant 1 but fail the "
                   "great-circle, parallelism and Lipschitz-1 properties");
}

TEST(Acceptance, Criterion5_TheoremBIngredients) {
    Rng rng(43);

    // diagonal metric: product distance = sqrt(2) arccos(x . y), max pi sqrt(2)
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Vec x = rng.unit_vec(4), y = rng.unit_vec(4);
        const manifolds::ProductPoint p{{x, 1.0}, {x, 1.0}};
        const manifolds::ProductPoint q{{y, 1.0}, {y, 1.0}};
        const double expected = std::sqrt(2.0) * std::acos(clamp_unit(x.dot(y)));
        worst = std::max(worst,
                         std::abs(manifolds::product_distance(p, q) - expected));
    }
    EXPECT_LT(worst, 1e-9);
    {
        const Vec x = rng.unit_vec(4);
        const manifolds::ProductPoint p{{x, 1.0}, {x, 1.0}};
        const manifolds::ProductPoint q{{-x, 1.0}, {-x, 1.0}};
        EXPECT_NEAR(manifolds::product_distance(p, q), kPi * std::sqrt(2.0), 1e-9);
    }

    // Key Lemma search over 20 seeded pairs homotopic to the identity
    const maps::SphereSpace s2{2, 1.0};
    const maps::SphereSpace s3{3, 1.0};
    int cases = 0;
    for (std::uint64_t seed = 1; cases < 20; ++seed) {
        maps::MapDescriptor f1 = maps::identity_map(s2);
        maps::MapDescriptor f2 = maps::identity_map(s2);
        switch (cases % 4) {
            case 0:
                f1 = maps::isometry_conjugate(maps::identity_map(s2),
                                              {algebra::random_rotation(3, seed)}, {});
                f2 = maps::isometry_conjugate(
                    maps::identity_map(s2), {algebra::random_rotation(3, seed + 100)},
                    {});
                break;
            case 1: {
                f1 = maps::isometry_conjugate(maps::identity_map(s3),
                                              {algebra::random_rotation(4, seed)}, {});
                f2 = maps::isometry_conjugate(
                    maps::identity_map(s3), {algebra::random_rotation(4, seed + 100)},
                    {});
                break;
            }
            case 2: {
                Vec north(3);
                north << 0, 0, 1;
                f1 = maps::isometry_conjugate(maps::identity_map(s2),
                                              {algebra::random_rotation(3, seed)}, {});
                f2 = maps::bump_perturb(maps::identity_map(s2), north, 0.3, 1.0);
                break;
            }
            default: {
                const auto profile = verify::build_profile();
                f1 = verify::profile_sphere_map(profile, 2);
                f2 = maps::isometry_conjugate(maps::identity_map(s2),
                                              {algebra::random_rotation(3, seed)}, {});
                break;
            }
        }
        verify::KeyLemmaConfig kc;
        kc.seed = seed;
        const auto found = verify::key_lemma_search(f1, f2, kc);
        EXPECT_LT(found.residual, 1e-6) << "case " << cases;
        ++cases;
    }

    // the equator restriction of a suspension reproduces the inner map
    const auto sh = maps::suspend(maps::hopf_complex(1));
    const auto sd = maps::suspend(maps::diagonal_inclusion(2));
    double eq_worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        Vec x(5);
        x << rng.unit_vec(4), 0.0;
        const Vec lifted = maps::evaluate(sh, x);
        const Vec inner = maps::evaluate(maps::hopf_complex(1), x.head(4));
        eq_worst = std::max(eq_worst, (lifted.head(3) - inner).norm());
        eq_worst = std::max(eq_worst, std::abs(lifted[3]));

        Vec p(4);
        p.head(3) = rng.unit_vec(3) * std::sqrt(2.0);
        p[3] = 0.0;
        const Vec dl = maps::evaluate(sd, p);
        const Vec di = maps::evaluate(maps::diagonal_inclusion(2), p.head(3));
        eq_worst = std::max(eq_worst, (dl.head(3) - di.head(3)).norm());
        eq_worst = std::max(eq_worst, (dl.segment(4, 3) - di.tail(3)).norm());
    }
    EXPECT_LT(eq_worst, 1e-12);
    report_line(5, "diagonal geometry, Key Lemma search and suspension identities");
}

TEST(Acceptance, Criterion6_LemmaFProfile) {
    const auto profile = verify::build_profile();
    EXPECT_LT(verify::profile_reflection_residual(profile, 10000), 1e-12);
    EXPECT_NEAR(profile.slope_at_start(), 2.0, 1e-15);
    EXPECT_NEAR(profile.slope_at_end(), 0.5, 1e-15);

    const auto report = verify::verify_lemma_f(2, 47, 1e-10);
    EXPECT_TRUE(report.pass());
    EXPECT_LT(report.parameters.at("involution_residual"), 1e-10);
    EXPECT_GT(report.parameters.at("min_motion_off_caps"), 0.05);
    report_line(6, "Lemma F profile: reflection symmetry, end slopes, involution, "
                   "fixed points only at the poles");
}

TEST(Acceptance, Criterion7_TheoremCGraphs) {
    for (int dim : {4, 6}) {
        const auto j = algebra::random_ocs(dim, 53);
        const auto jp = algebra::random_ocs(dim, 54);
        const auto report = verify::theorem_c_checks(j, jp, 55, 1e-9, 1000);
        EXPECT_TRUE(report.pass()) << "dim " << dim;
        EXPECT_LT(report.parameters.at("graph_in_bundle"), 1e-10);
        EXPECT_LT(report.parameters.at("graph_isometric_to_diagonal"), 1e-9);
        EXPECT_LT(report.parameters.at("conjugate_graphs_match"), 1e-9);
    }
    const auto lengths = verify::verify_sasaki_lengths(20000, 1e-6);
    EXPECT_TRUE(lengths.pass());
    EXPECT_NEAR(lengths.parameters.at("sasaki_length"), 2.0 * kPi, 1e-6);
    EXPECT_NEAR(lengths.parameters.at("product_length"),
                2.0 * kPi * std::sqrt(2.0), 1e-6);
    report_line(7, "Hopf vector field graphs sit isometrically in the unit "
                   "tangent bundle; Sasaki vs product loop lengths");
}

TEST(Acceptance, Criterion8_TheoremDIdentities) {
    const auto report = verify::theorem_d_checks(59, 1000, 1e-10, 1e-4);
    EXPECT_TRUE(report.pass())
        << (report.failures.empty() ? "" : report.failures.front());
    EXPECT_LT(report.parameters.at("stiefel_identity"), 1e-12);
    EXPECT_LT(report.parameters.at("decomposable_equal_projections"), 1e-12);
    EXPECT_LT(report.parameters.at("spectral_vs_sqrt2"), 1e-4);
    EXPECT_LT(report.parameters.at("uv_round_sphere"), 1e-9);
    report_line(8, "Stiefel projection identities, Gluck-Warner split, sqrt(2) "
                   "factor, round uV spheres");
}

TEST(Acceptance, Criterion9_CliDeterminism) {
    const auto dir1 = fresh_dir("c9a");
    const auto dir2 = fresh_dir("c9b");
    const std::vector<std::pair<std::string, std::string>> runs = {
        {"hopf-invariant --map 'power(2)' --seed 13 --out out",
         "hopf_invariant.json"},
        {"verify --check theorem-d --seed 13 --out out", "verify_theorem-d.json"},
        {"lipschitz --map stiefel-quat --seed 13 --samples 2000 --out out",
         "lipschitz.json"},
    };
    for (const auto& [args, file] : runs) {
        const auto r1 = run_cli(args, dir1);
        const auto r2 = run_cli(args, dir2);
        ASSERT_EQ(r1.exit_code, 0) << r1.output;
        ASSERT_EQ(r2.exit_code, 0) << r2.output;
        const std::string b1 = slurp(dir1 / "out" / file);
        const std::string b2 = slurp(dir2 / "out" / file);
        EXPECT_FALSE(b1.empty());
        EXPECT_EQ(b1, b2) << file;
    }
    report_line(9, "re-runs with identical config and seed are byte-identical");
}
