#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopftk/algebra.hpp"
#include "hopftk/linking.hpp"
#include "hopftk/lipschitz.hpp"
#include "hopftk/maps.hpp"
#include "hopftk/verify.hpp"

namespace hopftk::serialization {

using json = nlohmann::json;

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void expect_fields(const json& j, const std::set<std::string>& required,
                          const std::set<std::string>& optional = {}) {
    if (!j.is_object()) throw SchemaError("expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (required.count(key) == 0 && optional.count(key) == 0)
            throw SchemaError("unknown field '" + key + "'");
    }
    for (const auto& key : required)
        if (!j.contains(key)) throw SchemaError("missing field '" + key + "'");
}

inline json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Mat mat_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw SchemaError("matrix must be a 2D array");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j[i].size()) != cols)
            throw SchemaError("matrix rows have unequal lengths");
        for (int c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
}

inline json vec_to_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

inline Vec vec_from_json(const json& j) {
    if (!j.is_array()) throw SchemaError("vector must be an array");
    Vec v(static_cast<int>(j.size()));
    for (int i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
    return v;
}

inline json blocks_to_json(const std::vector<Mat>& blocks) {
    json a = json::array();
    for (const auto& b : blocks) a.push_back(mat_to_json(b));
    return a;
}

inline std::vector<Mat> blocks_from_json(const json& j) {
    std::vector<Mat> blocks;
    for (const auto& b : j) blocks.push_back(mat_from_json(b));
    return blocks;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Map descriptors
// ---------------------------------------------------------------------------

inline json map_to_json(const maps::MapDescriptor& m) {
    using namespace maps;
    return std::visit(
        [](const auto& f) -> json {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, HopfComplexFamily>)
                return {{"family", "hopf-complex"}, {"n", f.n}};
            else if constexpr (std::is_same_v<T, HopfQuaternionicFamily>)
                return {{"family", "hopf-quaternionic"}, {"n", f.n}};
            else if constexpr (std::is_same_v<T, HopfOctonionicFamily>)
                return {{"family", "hopf-octonionic"}};
            else if constexpr (std::is_same_v<T, DiagonalInclusionFamily>)
                return {{"family", "diagonal-inclusion"}, {"n", f.n}};
            else if constexpr (std::is_same_v<T, HopfVectorFieldFamily>)
                return {{"family", "hopf-vector-field"},
                        {"structure", detail::mat_to_json(f.structure)}};
            else if constexpr (std::is_same_v<T, StiefelPlueckerFamily>)
                return {{"family", "stiefel-pluecker"}};
            else if constexpr (std::is_same_v<T, StiefelQuatFamily>)
                return {{"family", "stiefel-quat"}};
            else if constexpr (std::is_same_v<T, PowerPrecomposeFamily>)
                return {{"family", "power-precompose"}, {"d", f.d}};
            else if constexpr (std::is_same_v<T, SuspensionFamily>)
                return {{"family", "suspension"}, {"inner", map_to_json(*f.inner)}};
            else if constexpr (std::is_same_v<T, IsometryConjugateFamily>)
                return {{"family", "isometry-conjugate"},
                        {"inner", map_to_json(*f.inner)},
                        {"domain_blocks", detail::blocks_to_json(f.dom_blocks)},
                        {"codomain_blocks", detail::blocks_to_json(f.cod_blocks)}};
            else if constexpr (std::is_same_v<T, BumpPerturbFamily>)
                return {{"family", "bump-perturb"},
                        {"inner", map_to_json(*f.inner)},
                        {"center", detail::vec_to_json(f.center)},
                        {"amplitude", f.amplitude},
                        {"width", f.width}};
            else if constexpr (std::is_same_v<T, IdentityFamily>)
                return {{"family", "identity"},
                        {"dim", f.sphere.dim},
                        {"radius", f.sphere.radius}};
            else if constexpr (std::is_same_v<T, ConstantFamily>)
                return {{"family", "constant"},
                        {"dim", f.domain.dim},
                        {"radius", f.domain.radius},
                        {"codomain_dim", f.codomain.dim},
                        {"codomain_radius", f.codomain.radius},
                        {"value", detail::vec_to_json(f.value)}};
            else
                return {{"family", "longitude-reparam"},
                        {"n", f.n},
                        {"breakpoints", f.xs},
                        {"values", f.ys}};
        },
        m.family);
}

inline maps::MapDescriptor map_from_json(const json& j) {
    using namespace maps;
    if (!j.is_object() || !j.contains("family"))
        throw SchemaError("map descriptor needs a 'family' tag");
    const std::string family = j.at("family").get<std::string>();
    if (family == "hopf-complex") {
        detail::expect_fields(j, {"family", "n"});
        return hopf_complex(j.at("n").get<int>());
    }
    if (family == "hopf-quaternionic") {
        detail::expect_fields(j, {"family", "n"});
        return hopf_quaternionic(j.at("n").get<int>());
    }
    if (family == "hopf-octonionic") {
        detail::expect_fields(j, {"family"});
        return hopf_octonionic();
    }
    if (family == "diagonal-inclusion") {
        detail::expect_fields(j, {"family", "n"});
        return diagonal_inclusion(j.at("n").get<int>());
    }
    if (family == "hopf-vector-field") {
        detail::expect_fields(j, {"family"}, {"structure", "dim", "seed"});
        if (j.contains("structure"))
            return hopf_vector_field({detail::mat_from_json(j.at("structure"))});
        const int dim = j.value("dim", 4);
        const std::uint64_t seed = j.value("seed", 0ULL);
        return hopf_vector_field(seed == 0 ? algebra::standard_ocs(dim)
                                           : algebra::random_ocs(dim, seed));
    }
    if (family == "stiefel-pluecker") {
        detail::expect_fields(j, {"family"});
        return stiefel_pluecker();
    }
    if (family == "stiefel-quat") {
        detail::expect_fields(j, {"family"});
        return stiefel_quat();
    }
    if (family == "power-precompose") {
        detail::expect_fields(j, {"family", "d"});
        return power_precompose(hopf_complex(1), j.at("d").get<int>());
    }
    if (family == "suspension") {
        detail::expect_fields(j, {"family", "inner"});
        return suspend(map_from_json(j.at("inner")));
    }
    if (family == "isometry-conjugate") {
        detail::expect_fields(j, {"family", "inner"},
                              {"domain_blocks", "codomain_blocks"});
        return isometry_conjugate(
            map_from_json(j.at("inner")),
            j.contains("domain_blocks")
                ? detail::blocks_from_json(j.at("domain_blocks"))
                : std::vector<Mat>{},
            j.contains("codomain_blocks")
                ? detail::blocks_from_json(j.at("codomain_blocks"))
                : std::vector<Mat>{});
    }
    if (family == "bump-perturb") {
        detail::expect_fields(j, {"family", "inner", "center", "amplitude", "width"});
        return bump_perturb(map_from_json(j.at("inner")),
                            detail::vec_from_json(j.at("center")),
                            j.at("amplitude").get<double>(),
                            j.at("width").get<double>());
    }
    if (family == "identity") {
        detail::expect_fields(j, {"family", "dim", "radius"});
        return identity_map({j.at("dim").get<int>(), j.at("radius").get<double>()});
    }
    if (family == "constant") {
        detail::expect_fields(j, {"family", "dim", "radius", "codomain_dim",
                                  "codomain_radius", "value"});
        return constant_map(
            {j.at("dim").get<int>(), j.at("radius").get<double>()},
            {j.at("codomain_dim").get<int>(), j.at("codomain_radius").get<double>()},
            detail::vec_from_json(j.at("value")));
    }
    if (family == "longitude-reparam") {
        detail::expect_fields(j, {"family", "n", "breakpoints", "values"});
        return longitude_reparam(j.at("breakpoints").get<std::vector<double>>(),
                                 j.at("values").get<std::vector<double>>(),
                                 j.at("n").get<int>());
    }
    throw SchemaError("unknown map family '" + family + "'");
}

// ---------------------------------------------------------------------------
// Builtin names: hopf, hopf-quat, hopf-oct, diagonal(n), hopf-vf,
// stiefel-quat, stiefel-pluecker, power(d), bump(amp,width), suspend(inner)
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_args(const std::string& s) {
    std::vector<std::string> parts;
    int depth = 0;
    std::string current;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            parts.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty()) parts.push_back(current);
    return parts;
}

}  // namespace detail

inline maps::MapDescriptor parse_builtin(const std::string& name) {
    const auto open = name.find('(');
    std::string head = name.substr(0, open);
    std::vector<std::string> args;
    if (open != std::string::npos) {
        const auto close = name.rfind(')');
        if (close == std::string::npos || close < open)
            throw SchemaError("unbalanced parentheses in map name: " + name);
        args = detail::split_args(name.substr(open + 1, close - open - 1));
    }
    auto want = [&](std::size_t n) {
        if (args.size() != n)
            throw SchemaError("map '" + head + "' takes " + std::to_string(n) +
                              " argument(s)");
    };
    if (head == "hopf") {
        want(0);
        return maps::hopf_complex(1);
    }
    if (head == "hopf-quat") {
        want(0);
        return maps::hopf_quaternionic(1);
    }
    if (head == "hopf-oct") {
        want(0);
        return maps::hopf_octonionic();
    }
    if (head == "diagonal") {
        want(1);
        return maps::diagonal_inclusion(std::stoi(args[0]));
    }
    if (head == "hopf-vf") {
        want(0);
        return maps::hopf_vector_field(algebra::standard_ocs(4));
    }
    if (head == "stiefel-quat") {
        want(0);
        return maps::stiefel_quat();
    }
    if (head == "stiefel-pluecker") {
        want(0);
        return maps::stiefel_pluecker();
    }
    if (head == "power") {
        want(1);
        return maps::power_precompose(maps::hopf_complex(1), std::stoi(args[0]));
    }
    if (head == "bump") {
        want(2);
        Vec center(4);
        center << 1, 0, 0, 0;
        return maps::bump_perturb(maps::hopf_complex(1), center, std::stod(args[0]),
                                  std::stod(args[1]));
    }
    if (head == "suspend") {
        want(1);
        return maps::suspend(parse_builtin(args[0]));
    }
    throw SchemaError("unknown builtin map '" + name + "'");
}

/// Accepts a JSON object literal or a builtin name.
inline maps::MapDescriptor parse_map_argument(const std::string& arg) {
    if (!arg.empty() && arg.front() == '{')
        return map_from_json(json::parse(arg));
    return parse_builtin(arg);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json report_to_json(const verify::VerificationReport& r) {
    const char* status = r.status == verify::CheckStatus::Pass   ? "pass"
                         : r.status == verify::CheckStatus::Fail ? "fail"
                                                                 : "inconclusive";
    return {{"check", r.check},       {"status", status},
            {"residual", r.residual}, {"tolerance", r.tolerance},
            {"map", r.map},           {"seed", r.seed},
            {"parameters", r.parameters}, {"failures", r.failures}};
}

inline json report_to_json(const lipschitz::LipschitzReport& r) {
    return {{"pair_lower", r.pair_lower},
            {"spectral_sup", r.spectral_sup},
            {"witness",
             {{"x", detail::vec_to_json(r.witness_x)},
              {"xprime", detail::vec_to_json(r.witness_xprime)},
              {"ratio", r.witness_ratio}}},
            {"samples", r.samples},
            {"seed", r.seed}};
}

inline json report_to_json(const linking::HopfInvariantResult& r) {
    return {{"hopf_invariant", r.value},
            {"gauss_raw_total", r.gauss_raw_total},
            {"crossing_total", r.crossing_total},
            {"max_gap", r.max_gap},
            {"refinement_rounds", r.refinement_rounds},
            {"components_y", r.fibers_y.size()},
            {"components_yprime", r.fibers_yprime.size()}};
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct RunConfig {
    std::string command;
    json map;                  // resolved descriptor
    std::uint64_t seed = 1;
    int samples = 0;           // command-specific default resolved by the CLI
    double tol = 0.0;
    double step = 5e-3;
    std::string check;
    std::string out_dir;
};

inline json run_config_to_json(const RunConfig& c) {
    return {{"command", c.command}, {"map", c.map},   {"seed", c.seed},
            {"samples", c.samples}, {"tol", c.tol},   {"step", c.step},
            {"check", c.check},     {"out", c.out_dir}};
}

}  // namespace hopftk::serialization
