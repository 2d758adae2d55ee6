#include "hopftk/serialization.hpp"

#include <gtest/gtest.h>

using namespace hopftk;
using namespace hopftk::serialization;

TEST(MapJson, RoundTripsEveryFamily) {
    Vec center(4);
    center << 1, 0, 0, 0;
    Vec value(3);
    value << 0, 0, 0.5;
    const std::vector<maps::MapDescriptor> family = {
        maps::hopf_complex(1),
        maps::hopf_complex(3),
        maps::hopf_quaternionic(2),
        maps::hopf_octonionic(),
        maps::diagonal_inclusion(4),
        maps::hopf_vector_field(algebra::random_ocs(6, 11)),
        maps::stiefel_pluecker(),
        maps::stiefel_quat(),
        maps::power_precompose(maps::hopf_complex(1), -2),
        maps::suspend(maps::hopf_complex(1)),
        maps::isometry_conjugate(maps::hopf_complex(1),
                                 {algebra::random_rotation(4, 1)},
                                 {algebra::random_rotation(3, 2)}),
        maps::bump_perturb(maps::hopf_complex(1), center, 0.1, 0.5),
        maps::identity_map({2, 1.0}),
        maps::constant_map({3, 1.0}, {2, 0.5}, value),
        maps::longitude_reparam({0.0, 1.0 / 3.0, 1.0}, {0.0, 2.0 / 3.0, 1.0}, 2),
    };
    for (const auto& m : family) {
        const json j = map_to_json(m);
        const auto back = map_from_json(j);
        EXPECT_EQ(j, map_to_json(back)) << maps::map_name(m);
        EXPECT_EQ(maps::domain(m), maps::domain(back));
        EXPECT_EQ(maps::codomain(m), maps::codomain(back));
    }
}

TEST(MapJson, RejectsUnknownAndMissingFields) {
    EXPECT_THROW(map_from_json({{"family", "hopf-complex"}}), SchemaError);
    EXPECT_THROW(map_from_json({{"family", "hopf-complex"}, {"n", 1}, {"extra", 2}}),
                 SchemaError);
    EXPECT_THROW(map_from_json({{"family", "no-such-map"}}), SchemaError);
    EXPECT_THROW(map_from_json(json::array()), SchemaError);
}

TEST(Builtins, ParseAndEvaluate) {
    EXPECT_EQ(maps::map_name(parse_builtin("hopf")), "hopf-complex(1)");
    EXPECT_EQ(maps::map_name(parse_builtin("hopf-quat")), "hopf-quaternionic(1)");
    EXPECT_EQ(maps::map_name(parse_builtin("hopf-oct")), "hopf-octonionic");
    EXPECT_EQ(maps::map_name(parse_builtin("diagonal(3)")), "diagonal-inclusion(3)");
    EXPECT_EQ(maps::map_name(parse_builtin("stiefel-quat")), "stiefel-quat");
    EXPECT_EQ(maps::map_name(parse_builtin("stiefel-pluecker")), "stiefel-pluecker");
    EXPECT_EQ(maps::map_name(parse_builtin("power(-2)")), "power(-2)");
    EXPECT_EQ(maps::map_name(parse_builtin("hopf-vf")), "hopf-vector-field(dim 4)");
    EXPECT_EQ(maps::map_name(parse_builtin("suspend(hopf)")),
              "suspend(hopf-complex(1))");
    const auto bump = parse_builtin("bump(0.1,0.5)");
    EXPECT_EQ(maps::map_name(bump), "bump(hopf-complex(1), amp 0.100000)");
    EXPECT_THROW(parse_builtin("nope"), SchemaError);
    EXPECT_THROW(parse_builtin("power(2"), SchemaError);
    EXPECT_THROW(parse_builtin("power(1,2)"), SchemaError);
}

TEST(Builtins, JsonLiteralArgument) {
    const auto m = parse_map_argument(R"({"family":"power-precompose","d":3})");
    EXPECT_EQ(maps::map_name(m), "power(3)");
}

TEST(Reports, VerificationReportFields) {
    verify::VerificationReport r;
    r.check = "demo";
    r.status = verify::CheckStatus::Inconclusive;
    r.residual = 0.5;
    r.tolerance = 1e-6;
    r.map = "hopf-complex(1)";
    r.seed = 9;
    r.parameters["alpha"] = 1.25;
    r.failures.push_back("sub-check text");
    const json j = report_to_json(r);
    EXPECT_EQ(j.at("status"), "inconclusive");
    EXPECT_EQ(j.at("check"), "demo");
    EXPECT_EQ(j.at("parameters").at("alpha"), 1.25);
    EXPECT_EQ(j.at("failures").size(), 1u);
}

TEST(Reports, DumpIsDeterministic) {
    lipschitz::LipschitzReport r;
    r.pair_lower = 1.0;
    r.spectral_sup = 1.0 + 1e-12;
    r.witness_x = Vec::Zero(4);
    r.witness_xprime = Vec::Ones(4);
    r.samples = 10;
    r.seed = 3;
    const std::string a = report_to_json(r).dump(2);
    const std::string b = report_to_json(r).dump(2);
    EXPECT_EQ(a, b);
}
