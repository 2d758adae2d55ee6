#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hopftk/algebra.hpp"
#include "hopftk/core.hpp"
#include "hopftk/fibers.hpp"
#include "hopftk/lipschitz.hpp"
#include "hopftk/manifolds.hpp"
#include "hopftk/maps.hpp"

namespace hopftk::verify {

enum class CheckStatus { Pass, Fail, Inconclusive };

struct VerificationReport {
    std::string check;
    CheckStatus status = CheckStatus::Fail;
    double residual = 0.0;   // worst case over all subchecks
    double tolerance = 0.0;
    std::string map;         // provenance
    std::uint64_t seed = 0;
    std::map<std::string, double> parameters;
    std::vector<std::string> failures;

    bool pass() const { return status == CheckStatus::Pass; }
};

namespace detail {

inline CheckStatus status_from(double residual, double tol) {
    return residual < tol ? CheckStatus::Pass : CheckStatus::Fail;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Theorem A style fiber-geometry verifiers
// ---------------------------------------------------------------------------

/// Trace the fiber over every listed value, fit great circles, report the
/// worst plane residual.
inline VerificationReport verify_great_circle_fibers(
    const maps::MapDescriptor& m, const std::vector<manifolds::SpherePoint>& values,
    double tol, const fibers::TraceConfig& cfg = {}) {
    VerificationReport report;
    report.check = "great-circles";
    report.tolerance = tol;
    report.map = maps::map_name(m);
    report.seed = cfg.rng_seed;
    report.parameters["values"] = static_cast<double>(values.size());
    double worst = 0.0;
    for (const auto& y : values) {
        for (const auto& curve : fibers::trace_fiber(m, y, cfg)) {
            const auto fit = fibers::fit_great_circle(curve);
            worst = std::max(worst, fit.max_residual);
        }
    }
    report.residual = worst;
    report.status = detail::status_from(worst, tol);
    return report;
}

/// For each (y, z) pair: both fibers must sit at constant distance, and the
/// constant must equal the base distance (Riemannian-submersion consistency).
inline VerificationReport verify_parallel_fibers(
    const maps::MapDescriptor& m,
    const std::vector<std::pair<manifolds::SpherePoint, manifolds::SpherePoint>>&
        value_pairs,
    double tol, const fibers::TraceConfig& cfg = {}) {
    VerificationReport report;
    report.check = "parallel";
    report.tolerance = tol;
    report.map = maps::map_name(m);
    report.seed = cfg.rng_seed;
    report.parameters["pairs"] = static_cast<double>(value_pairs.size());
    double worst = 0.0;
    for (const auto& [y, z] : value_pairs) {
        const double base = manifolds::sphere_distance(y, z);
        const auto ky = fibers::trace_fiber(m, y, cfg);
        const auto kz = fibers::trace_fiber(m, z, cfg);
        for (const auto& a : ky) {
            for (const auto& b : kz) {
                const auto stats = fibers::fiber_distance_stats(a, b);
                worst = std::max(worst, stats.max - stats.min);
                worst = std::max(worst, std::abs(stats.min - base));
            }
        }
    }
    report.residual = worst;
    report.status = detail::status_from(worst, tol);
    return report;
}

/// Fibers over y, -y and points at intermediate distances alpha: every
/// sample of the intermediate fiber must sit at distance alpha from K and
/// pi/2 - alpha from K'.
inline VerificationReport verify_torus_membership(const maps::MapDescriptor& m,
                                                  int intermediate_values, double tol,
                                                  const fibers::TraceConfig& cfg = {}) {
    VerificationReport report;
    report.check = "torus";
    report.tolerance = tol;
    report.map = maps::map_name(m);
    report.seed = cfg.rng_seed;
    report.parameters["intermediate_values"] = intermediate_values;

    Rng rng(cfg.rng_seed + 101);
    const Vec yv = rng.unit_vec(3) * 0.5;
    const manifolds::SpherePoint y{yv, 0.5};
    const manifolds::SpherePoint ybar{-yv, 0.5};
    const auto k = fibers::trace_fiber(m, y, cfg).at(0);
    const auto kp = fibers::trace_fiber(m, ybar, cfg).at(0);

    double worst = 0.0;
    for (int i = 0; i < intermediate_values; ++i) {
        Vec zv = rng.unit_vec(3) * 0.5;
        double alpha = manifolds::sphere_distance(y, {zv, 0.5});
        int guard = 0;
        while ((alpha < 0.15 || alpha > kPi / 2.0 - 0.15) && guard++ < 100) {
            zv = rng.unit_vec(3) * 0.5;
            alpha = manifolds::sphere_distance(y, {zv, 0.5});
        }
        const auto kpp = fibers::trace_fiber(m, {zv, 0.5}, cfg).at(0);
        for (const auto& s : kpp.points) {
            worst = std::max(
                worst, std::abs(fibers::detail::min_distance_to_curve(s, k) - alpha));
            worst = std::max(worst,
                             std::abs(fibers::detail::min_distance_to_curve(s, kp) -
                                      (kPi / 2.0 - alpha)));
        }
    }
    report.residual = worst;
    report.status = detail::status_from(worst, tol);
    return report;
}

// ---------------------------------------------------------------------------
// Key Lemma search
// ---------------------------------------------------------------------------

struct KeyLemmaConfig {
    int starts = 200;
    int max_iters = 300;
    double initial_step = 0.1;
    double stop_below = 1e-12;  // early exit once the residual is this small
    std::uint64_t seed = 1;
};

struct KeyLemmaResult {
    Vec u;
    Vec v;
    double residual = std::numeric_limits<double>::infinity();
    int starts_used = 0;
};

/// Minimize r(u, v) = |f1(u) + f1(v)|^2 + |f2(u) + f2(v)|^2 over S^n x S^n
/// by multi-start projected gradient descent. A zero certifies the pair of
/// simultaneous antipodal images the Key Lemma guarantees.
inline KeyLemmaResult key_lemma_search(const maps::MapDescriptor& f1,
                                       const maps::MapDescriptor& f2,
                                       const KeyLemmaConfig& cfg = {}) {
    const auto d1 = maps::domain(f1);
    const auto* sphere = std::get_if<manifolds::SphereSpace>(&d1);
    if (sphere == nullptr || !(maps::codomain(f1) == d1) ||
        !(maps::domain(f2) == d1) || !(maps::codomain(f2) == d1))
        throw std::invalid_argument(
            "key_lemma_search: f1, f2 must be self-maps of one sphere");

    const int amb = sphere->dim + 1;
    Rng rng(cfg.seed);
    auto objective = [&](const Vec& u, const Vec& v) {
        const Vec a = maps::detail::eval_impl(f1, u) + maps::detail::eval_impl(f1, v);
        const Vec b = maps::detail::eval_impl(f2, u) + maps::detail::eval_impl(f2, v);
        return a.squaredNorm() + b.squaredNorm();
    };

    KeyLemmaResult best;
    for (int start = 0; start < cfg.starts; ++start) {
        best.starts_used = start + 1;
        Vec u = rng.unit_vec(amb) * sphere->radius;
        Vec v = rng.unit_vec(amb) * sphere->radius;
        double value = objective(u, v);
        double eta = cfg.initial_step;
        for (int iter = 0; iter < cfg.max_iters && value > cfg.stop_below; ++iter) {
            // numeric gradient in tangent frames
            const Mat fu = manifolds::space_tangent_frame(d1, u);
            const Mat fv = manifolds::space_tangent_frame(d1, v);
            Vec gu(fu.cols()), gv(fv.cols());
            const double h = 1e-6;
            for (int i = 0; i < fu.cols(); ++i) {
                const Vec up = manifolds::space_retract(d1, u + h * fu.col(i));
                const Vec um = manifolds::space_retract(d1, u - h * fu.col(i));
                gu[i] = (objective(up, v) - objective(um, v)) / (2.0 * h);
            }
            for (int i = 0; i < fv.cols(); ++i) {
                const Vec vp = manifolds::space_retract(d1, v + h * fv.col(i));
                const Vec vm = manifolds::space_retract(d1, v - h * fv.col(i));
                gv[i] = (objective(u, vp) - objective(u, vm)) / (2.0 * h);
            }
            const double gnorm = std::sqrt(gu.squaredNorm() + gv.squaredNorm());
            if (gnorm < 1e-14) break;
            const Vec ucand =
                manifolds::space_retract(d1, u - (eta / gnorm) * (fu * gu));
            const Vec vcand =
                manifolds::space_retract(d1, v - (eta / gnorm) * (fv * gv));
            const double cand = objective(ucand, vcand);
            if (cand < value) {
                u = ucand;
                v = vcand;
                value = cand;
            } else {
                eta *= 0.5;
                if (eta < 1e-12) break;
            }
        }
        if (value < best.residual) {
            best.residual = value;
            best.u = u;
            best.v = v;
        }
        if (best.residual < cfg.stop_below) break;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Lemma F profile
// ---------------------------------------------------------------------------

/// Piecewise-linear increasing bijection of [0, 1] whose graph is symmetric
/// under reflection about the diagonal of slope -1.
struct Profile {
    std::vector<double> xs;
    std::vector<double> ys;

    double operator()(double t) const {
        return maps::detail::piecewise_linear(xs, ys, t);
    }
    double slope_at_start() const { return (ys[1] - ys[0]) / (xs[1] - xs[0]); }
    double slope_at_end() const {
        const std::size_t k = xs.size() - 1;
        return (ys[k] - ys[k - 1]) / (xs[k] - xs[k - 1]);
    }
};

/// The minimal two-piece profile with slope 2 at 0 and 1/2 at 1:
/// f(x) = 2x on [0, 1/3], f(x) = (1 + x)/2 on [1/3, 1]. Satisfies
/// f(1 - f(x)) = 1 - x exactly, piece by piece.
inline Profile build_profile() {
    return {{0.0, 1.0 / 3.0, 1.0}, {0.0, 2.0 / 3.0, 1.0}};
}

/// Reflection-symmetry defect max |f(1 - f(x)) - (1 - x)| on a uniform grid.
inline double profile_reflection_residual(const Profile& p, int grid = 10000) {
    double worst = 0.0;
    for (int i = 0; i <= grid; ++i) {
        const double x = static_cast<double>(i) / grid;
        worst = std::max(worst, std::abs(p(1.0 - p(x)) - (1.0 - x)));
    }
    return worst;
}

/// The sphere map copying the profile on every great semicircle of longitude.
inline maps::MapDescriptor profile_sphere_map(const Profile& p, int n) {
    return maps::longitude_reparam(p.xs, p.ys, n);
}

/// Lemma F package: profile symmetry, boundary slopes, -F involution, and
/// confinement of the fixed points to the poles.
inline VerificationReport verify_lemma_f(int n = 2, std::uint64_t seed = 1,
                                         double tol = 1e-10) {
    VerificationReport report;
    report.check = "lemma-f";
    report.tolerance = tol;
    report.seed = seed;
    const Profile p = build_profile();
    const auto f = profile_sphere_map(p, n);
    report.map = maps::map_name(f);

    double worst = 0.0;
    const double sym = profile_reflection_residual(p);
    report.parameters["profile_reflection_residual"] = sym;
    if (sym > 1e-12) report.failures.push_back("profile reflection symmetry");
    worst = std::max(worst, sym);

    if (std::abs(p.slope_at_start() - 2.0) > 1e-15 ||
        std::abs(p.slope_at_end() - 0.5) > 1e-15)
        report.failures.push_back("boundary slopes");

    // -F must be an involution: F(-F(x)) = -x
    Rng rng(seed);
    double inv_worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Vec x = rng.unit_vec(n + 1);
        const Vec once = -maps::detail::eval_impl(f, x);
        const Vec twice = -maps::detail::eval_impl(f, once);
        inv_worst = std::max(inv_worst, (twice - x).norm());
    }
    report.parameters["involution_residual"] = inv_worst;
    if (inv_worst > tol) report.failures.push_back("-F involution");
    worst = std::max(worst, inv_worst);

    // fixed points only at the poles: off the polar caps of radius 0.1 the
    // colatitude moves by more than 0.05
    const int grid = 10000;
    double min_motion = std::numeric_limits<double>::infinity();
    const double lo = 0.1, hi = kPi - 0.1;
    for (int i = 0; i < grid; ++i) {
        const double theta = lo + (hi - lo) * (i + 0.5) / grid;
        const double moved = kPi * p(theta / kPi);
        min_motion = std::min(min_motion, std::abs(moved - theta));
    }
    report.parameters["min_motion_off_caps"] = min_motion;
    if (min_motion <= 0.05) report.failures.push_back("interior fixed point");

    report.residual = worst;
    report.status = report.failures.empty() ? CheckStatus::Pass : CheckStatus::Fail;
    return report;
}

// ---------------------------------------------------------------------------
// Theorem C checks
// ---------------------------------------------------------------------------

/// (a) the graph of J lies in the unit tangent bundle; (b) the graph is
/// isometric to the diagonal sphere of radius sqrt(2); (c) the conjugator g
/// carries graph(J) onto graph(J') pointwise via (g, g).
inline VerificationReport theorem_c_checks(
    const algebra::OrthogonalComplexStructure& j,
    const algebra::OrthogonalComplexStructure& jprime, std::uint64_t seed = 1,
    double tol = 1e-9, int pair_samples = 1000) {
    VerificationReport report;
    report.check = "theorem-c";
    report.tolerance = tol;
    report.seed = seed;
    report.map = "hopf-vector-field(dim " + std::to_string(j.dim()) + ")";

    Rng rng(seed);
    const int dim = j.dim();
    double worst_a = 0.0, worst_b = 0.0, worst_c = 0.0;

    for (int trial = 0; trial < pair_samples; ++trial) {
        const Vec x = rng.unit_vec(dim);
        const Vec jx = j.matrix * x;
        worst_a = std::max(worst_a, std::abs(x.dot(jx)));
        worst_a = std::max(worst_a, std::abs(jx.norm() - 1.0));

        const Vec y = rng.unit_vec(dim);
        const Vec jy = j.matrix * y;
        const manifolds::ProductPoint p{{x, 1.0}, {jx, 1.0}};
        const manifolds::ProductPoint q{{y, 1.0}, {jy, 1.0}};
        const double expected = std::sqrt(2.0) * std::acos(clamp_unit(x.dot(y)));
        worst_b =
            std::max(worst_b, std::abs(manifolds::product_distance(p, q) - expected));
    }

    Mat g;
    bool conjugator_ok = true;
    try {
        g = algebra::conjugator_between(j, jprime);
    } catch (const std::exception&) {
        conjugator_ok = false;
    }
    if (conjugator_ok) {
        for (int trial = 0; trial < pair_samples; ++trial) {
            const Vec x = rng.unit_vec(dim);
            const Vec lhs = g * (j.matrix * x);
            const Vec rhs = jprime.matrix * (g * x);
            worst_c = std::max(worst_c, (lhs - rhs).norm());
        }
    } else {
        worst_c = std::numeric_limits<double>::infinity();
    }

    report.parameters["graph_in_bundle"] = worst_a;
    report.parameters["graph_isometric_to_diagonal"] = worst_b;
    report.parameters["conjugate_graphs_match"] = worst_c;
    if (worst_a > 1e-10) report.failures.push_back("graph not in US^{2n+1}");
    if (worst_b > tol) report.failures.push_back("graph not isometric to diagonal");
    if (worst_c > tol) report.failures.push_back("conjugated graphs differ");
    report.residual = std::max({worst_a, worst_b, worst_c});
    report.status = report.failures.empty() ? CheckStatus::Pass : CheckStatus::Fail;
    return report;
}

/// Velocity lift of a great circle measured in both bundle metrics.
inline VerificationReport verify_sasaki_lengths(int points = 20000, double tol = 1e-6) {
    VerificationReport report;
    report.check = "sasaki-lengths";
    report.tolerance = tol;
    report.map = "great-circle velocity lift";
    report.parameters["points"] = points;
    std::vector<std::pair<Vec, Vec>> curve;
    curve.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double t = 2.0 * kPi * i / points;
        Vec x = Vec::Zero(4), v = Vec::Zero(4);
        x[0] = std::cos(t);
        x[1] = std::sin(t);
        v[0] = -std::sin(t);
        v[1] = std::cos(t);
        curve.emplace_back(x, v);
    }
    const double sasaki = lipschitz::curve_length(curve, lipschitz::BundleMetric::Sasaki);
    const double product =
        lipschitz::curve_length(curve, lipschitz::BundleMetric::Product);
    report.parameters["sasaki_length"] = sasaki;
    report.parameters["product_length"] = product;
    const double r1 = std::abs(sasaki - 2.0 * kPi);
    const double r2 = std::abs(product - 2.0 * kPi * std::sqrt(2.0));
    report.residual = std::max(r1, r2);
    report.status = detail::status_from(report.residual, tol);
    if (!report.pass()) report.failures.push_back("loop lengths off");
    return report;
}

// ---------------------------------------------------------------------------
// Theorem D checks
// ---------------------------------------------------------------------------

/// Bivector x ^ y expressed in the +-1 Hodge eigenbasis (3 + 3 components).
inline Vec bivector_split(const Vec& x, const Vec& y) {
    Vec st(8);
    st << x, y;
    return maps::detail::eval_impl(maps::stiefel_pluecker(), st);
}

inline std::pair<double, double> hodge_projection_norms(const Vec& split6) {
    return {split6.head(3).norm(), split6.tail(3).norm()};
}

/// (a) p(x, ux) = (u, x^{-1} u x); (b) images are imaginary unit quaternions;
/// (c) the Gluck-Warner decomposability criterion; (d) the sqrt(2) spectral
/// factor; (e) uV is a round 3-sphere of radius sqrt(2).
inline VerificationReport theorem_d_checks(std::uint64_t seed = 1, int samples = 1000,
                                           double tol = 1e-10,
                                           double spectral_tol = 1e-5) {
    VerificationReport report;
    report.check = "theorem-d";
    report.tolerance = tol;
    report.seed = seed;
    report.map = "stiefel-quat";

    Rng rng(seed);
    const auto sq = maps::stiefel_quat();
    double worst_a = 0.0, worst_b = 0.0, worst_c = 0.0, worst_e = 0.0;
    double nondecomposable_min_gap = std::numeric_limits<double>::infinity();

    for (int trial = 0; trial < samples; ++trial) {
        // (a) and (e): points of uV = {(x, ux)}
        const Vec xv = rng.unit_vec(4);
        Vec uim = rng.unit_vec(3);
        const algebra::Quaternion u{0.0, uim[0], uim[1], uim[2]};
        const algebra::Quaternion x{xv[0], xv[1], xv[2], xv[3]};
        const algebra::Quaternion ux = u * x;
        Vec st(8);
        st << xv, algebra::quat_to_vec(ux).cast<double>();
        const Vec img = maps::detail::eval_impl(sq, st);
        const algebra::Quaternion expected2 = x.conjugate() * u * x;
        worst_a = std::max(worst_a, std::abs(img[0] - u.x));
        worst_a = std::max(worst_a, std::abs(img[1] - u.y));
        worst_a = std::max(worst_a, std::abs(img[2] - u.z));
        worst_a = std::max(worst_a, std::abs(img[3] - expected2.x));
        worst_a = std::max(worst_a, std::abs(img[4] - expected2.y));
        worst_a = std::max(worst_a, std::abs(img[5] - expected2.z));

        // (b) on generic Stiefel points: purely imaginary unit images
        const Vec p = manifolds::space_sample(manifolds::StiefelSpace{}, rng);
        const algebra::Quaternion px{p[0], p[1], p[2], p[3]};
        const algebra::Quaternion py{p[4], p[5], p[6], p[7]};
        const algebra::Quaternion q1 = py * px.conjugate();
        const algebra::Quaternion q2 = px.conjugate() * py;
        worst_b = std::max({worst_b, std::abs(q1.real()), std::abs(q2.real()),
                            std::abs(q1.norm() - 1.0), std::abs(q2.norm() - 1.0)});

        // (c) decomposable bivectors have equal Hodge projections
        const auto [plus, minus] = hodge_projection_norms(
            bivector_split(p.head(4), p.tail(4)));
        worst_c = std::max(worst_c, std::abs(plus - minus));

        // a generic non-decomposable bivector does not
        Vec raw = rng.gaussian_vec(6);
        raw.normalize();
        const auto [rp, rm] = hodge_projection_norms(raw);
        nondecomposable_min_gap = std::min(nondecomposable_min_gap,
                                           std::abs(rp - rm));

        // (e) uV pairwise distances match a round sphere of radius sqrt(2)
        const Vec yv = rng.unit_vec(4);
        const algebra::Quaternion y{yv[0], yv[1], yv[2], yv[3]};
        const algebra::Quaternion uy = u * y;
        const double geo = std::hypot(
            std::acos(clamp_unit(xv.dot(yv))),
            std::acos(clamp_unit(algebra::quat_dot(ux, uy))));
        const double expected_geo = std::sqrt(2.0) * std::acos(clamp_unit(xv.dot(yv)));
        worst_e = std::max(worst_e, std::abs(geo - expected_geo));
        const double chord = std::sqrt((xv - yv).squaredNorm() +
                                       (algebra::quat_to_vec(ux) -
                                        algebra::quat_to_vec(uy)).squaredNorm());
        worst_e = std::max(worst_e,
                           std::abs(chord - std::sqrt(2.0) * (xv - yv).norm()));
    }

    // e1 ^ e2 splits into projections of norm 1/sqrt(2) each
    Vec e1 = Vec::Zero(4), e2 = Vec::Zero(4);
    e1[0] = 1.0;
    e2[1] = 1.0;
    const auto [b12p, b12m] = hodge_projection_norms(bivector_split(e1, e2));
    worst_c = std::max({worst_c, std::abs(b12p - 1.0 / std::sqrt(2.0)),
                        std::abs(b12m - 1.0 / std::sqrt(2.0))});

    // (d) spectral factor sqrt(2)
    const double spectral = lipschitz::spectral_estimate(sq, 200, seed + 7);
    const double worst_d = std::abs(spectral - std::sqrt(2.0));

    report.parameters["stiefel_identity"] = worst_a;
    report.parameters["imaginary_unit_images"] = worst_b;
    report.parameters["decomposable_equal_projections"] = worst_c;
    report.parameters["nondecomposable_min_projection_gap"] = nondecomposable_min_gap;
    report.parameters["spectral_vs_sqrt2"] = worst_d;
    report.parameters["uv_round_sphere"] = worst_e;
    if (worst_a > 1e-12) report.failures.push_back("p(x, ux) identity");
    if (worst_b > tol) report.failures.push_back("images not imaginary units");
    if (worst_c > 1e-12) report.failures.push_back("Gluck-Warner projections");
    if (nondecomposable_min_gap < 1e-6)
        report.failures.push_back("non-decomposable control too balanced");
    if (worst_d > spectral_tol) report.failures.push_back("spectral factor");
    if (worst_e > 1e-9) report.failures.push_back("uV not round of radius sqrt(2)");
    report.residual = std::max({worst_a, worst_b, worst_c, worst_e, worst_d});
    report.status = report.failures.empty() ? CheckStatus::Pass : CheckStatus::Fail;
    return report;
}

}  // namespace hopftk::verify
