#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hopftk/core.hpp"
#include "hopftk/fibers.hpp"
#include "hopftk/manifolds.hpp"
#include "hopftk/maps.hpp"

namespace hopftk::linking {

using Eigen::Vector3d;
using Eigen::Vector4d;
using fibers::FiberCurve;

struct LinkingResult {
    double raw = 0.0;
    long rounded = 0;
    double gap = 0.0;
};

enum class LinkErrorKind {
    CurvesTooClose,
    PoleSearchFailed,
    NoGenericProjection,
    OracleDisagreement,
    GapNotConverged,
};

struct LinkError : std::runtime_error {
    LinkErrorKind kind;
    LinkError(LinkErrorKind k, const std::string& msg)
        : std::runtime_error(msg), kind(k) {}
};

struct LinkingConfig {
    std::uint64_t pole_seed = 2024;
    int pole_candidates = 100;
    double min_pole_distance = 0.2;
    std::uint64_t projection_seed = 4096;
    int projection_attempts = 50;
};

namespace detail {

inline double min_curve_separation(const FiberCurve& a, const FiberCurve& b) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : a.points)
        best = std::min(best, fibers::detail::min_distance_to_curve(p, b));
    return best;
}

inline double min_geodesic_to_vertices(const Vector4d& p, const FiberCurve& c) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : c.points)
        best = std::min(best, fibers::detail::geodesic(p, q));
    return best;
}

struct Projection {
    Vector4d pole = Vector4d::Zero();
    Eigen::Matrix<double, 4, 3> basis;  // (b1, b2, b3) with det[b1 b2 b3 n] > 0
};

/// Pole chosen among seeded candidates to maximize the minimum distance to
/// both curves; the complement basis is oriented so that the projected
/// linking number agrees with the outward-normal orientation of S^3
/// (pinned by the golden Hopf-fiber test).
inline Projection choose_projection(const FiberCurve& k1, const FiberCurve& k2,
                                    const LinkingConfig& cfg) {
    Rng rng(cfg.pole_seed);
    Vector4d best_pole = Vector4d::Zero();
    double best_score = -1.0;
    for (int trial = 0; trial < cfg.pole_candidates; ++trial) {
        const Vec cand = rng.unit_vec(4);
        const Vector4d n(cand[0], cand[1], cand[2], cand[3]);
        const double score =
            std::min(min_geodesic_to_vertices(n, k1), min_geodesic_to_vertices(n, k2));
        if (score > best_score) {
            best_score = score;
            best_pole = n;
        }
    }
    if (best_score < cfg.min_pole_distance)
        throw LinkError(LinkErrorKind::PoleSearchFailed,
                        "no stereographic pole clears both curves");
    Projection proj;
    proj.pole = best_pole;
    int have = 0;
    for (int axis = 0; axis < 4 && have < 3; ++axis) {
        Vector4d u = Vector4d::Zero();
        u[axis] = 1.0;
        u -= best_pole.dot(u) * best_pole;
        for (int k = 0; k < have; ++k)
            u -= proj.basis.col(k).dot(u) * proj.basis.col(k);
        if (u.norm() < 1e-3) continue;
        proj.basis.col(have++) = u.normalized();
    }
    Eigen::Matrix4d full;
    full.col(0) = proj.basis.col(0);
    full.col(1) = proj.basis.col(1);
    full.col(2) = proj.basis.col(2);
    full.col(3) = proj.pole;
    if (full.determinant() < 0.0) proj.basis.col(2) = -proj.basis.col(2);
    return proj;
}

inline std::vector<Vector3d> stereographic(const FiberCurve& c, const Projection& proj) {
    std::vector<Vector3d> out;
    out.reserve(c.points.size());
    for (const auto& p : c.points) {
        const double denom = 1.0 - proj.pole.dot(p);
        const Vector4d q = p - proj.pole.dot(p) * proj.pole;
        out.push_back(Vector3d(proj.basis.col(0).dot(q), proj.basis.col(1).dot(q),
                               proj.basis.col(2).dot(q)) /
                      denom);
    }
    if (c.orientation < 0) std::reverse(out.begin(), out.end());
    return out;
}

/// Midpoint-rule Gauss kernel over one segment pair, subdividing the longer
/// segment while the pair distance is under five segment lengths.
inline double gauss_pair(const Vector3d& a0, const Vector3d& a1, const Vector3d& b0,
                         const Vector3d& b1, int depth) {
    const Vector3d da = a1 - a0, db = b1 - b0;
    const Vector3d r = 0.5 * (a0 + a1) - 0.5 * (b0 + b1);
    const double la = da.norm(), lb = db.norm();
    const double d = r.norm();
    if (depth < 12 && d < 5.0 * std::max(la, lb)) {
        if (la >= lb) {
            const Vector3d am = 0.5 * (a0 + a1);
            return gauss_pair(a0, am, b0, b1, depth + 1) +
                   gauss_pair(am, a1, b0, b1, depth + 1);
        }
        const Vector3d bm = 0.5 * (b0 + b1);
        return gauss_pair(a0, a1, b0, bm, depth + 1) +
               gauss_pair(a0, a1, bm, b1, depth + 1);
    }
    const double d3 = d * d * d;
    if (d3 < 1e-30) return 0.0;
    return da.cross(db).dot(r) / d3;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Gauss linking integral
// ---------------------------------------------------------------------------

/// Discretized Gauss double integral after stereographic projection; the
/// linking number is invariant under the projection, and the pole is chosen
/// away from both curves.
inline LinkingResult gauss_linking(const FiberCurve& k1, const FiberCurve& k2,
                                   const LinkingConfig& cfg = {}) {
    if (!k1.closed || !k2.closed)
        throw std::invalid_argument("gauss_linking: curves must be closed");
    const double step = std::max(k1.step, k2.step);
    if (step > 0.0 && detail::min_curve_separation(k1, k2) <= 10.0 * step)
        throw LinkError(LinkErrorKind::CurvesTooClose,
                        "curves are closer than ten tracing steps");

    const auto proj = detail::choose_projection(k1, k2, cfg);
    const auto a = detail::stereographic(k1, proj);
    const auto b = detail::stereographic(k2, proj);
    const std::size_t na = a.size(), nb = b.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
        const Vector3d& a0 = a[i];
        const Vector3d& a1 = a[(i + 1) % na];
        for (std::size_t j = 0; j < nb; ++j)
            sum += detail::gauss_pair(a0, a1, b[j], b[(j + 1) % nb], 0);
    }
    LinkingResult res;
    res.raw = sum / (4.0 * kPi);
    res.rounded = std::lround(res.raw);
    res.gap = std::abs(res.raw - static_cast<double>(res.rounded));
    return res;
}

// ---------------------------------------------------------------------------
// Signed-crossing oracle
// ---------------------------------------------------------------------------

/// Independent check: half the signed sum over inter-curve crossings of a
/// generic planar projection. Directions with tangencies or endpoint hits
/// are rejected and re-drawn.
inline long crossing_linking(const FiberCurve& k1, const FiberCurve& k2,
                             const LinkingConfig& cfg = {}) {
    if (!k1.closed || !k2.closed)
        throw std::invalid_argument("crossing_linking: curves must be closed");
    const auto proj = detail::choose_projection(k1, k2, cfg);
    const auto a = detail::stereographic(k1, proj);
    const auto b = detail::stereographic(k2, proj);
    const std::size_t na = a.size(), nb = b.size();

    Rng rng(cfg.projection_seed);
    for (int attempt = 0; attempt < cfg.projection_attempts; ++attempt) {
        const Vec dir = rng.unit_vec(3);
        const Vector3d d(dir[0], dir[1], dir[2]);
        // plane basis
        Vector3d u = std::abs(d[0]) < 0.9 ? Vector3d(1, 0, 0) : Vector3d(0, 1, 0);
        u -= d.dot(u) * d;
        u.normalize();
        const Vector3d v = d.cross(u);

        bool generic = true;
        long signed_sum = 0;
        const double margin = 1e-7;
        for (std::size_t i = 0; i < na && generic; ++i) {
            const Vector3d& a0 = a[i];
            const Vector3d& a1 = a[(i + 1) % na];
            const Eigen::Vector2d pa0(a0.dot(u), a0.dot(v));
            const Eigen::Vector2d pa1(a1.dot(u), a1.dot(v));
            const Eigen::Vector2d da = pa1 - pa0;
            for (std::size_t j = 0; j < nb && generic; ++j) {
                const Vector3d& b0 = b[j];
                const Vector3d& b1 = b[(j + 1) % nb];
                const Eigen::Vector2d pb0(b0.dot(u), b0.dot(v));
                const Eigen::Vector2d pb1(b1.dot(u), b1.dot(v));
                const Eigen::Vector2d db = pb1 - pb0;
                const double denom = da.x() * db.y() - da.y() * db.x();
                const Eigen::Vector2d w = pb0 - pa0;
                if (std::abs(denom) <
                    1e-12 * std::max(1.0, da.norm() * db.norm())) {
                    // parallel in projection: reject only if they could meet
                    const double crossw = da.x() * w.y() - da.y() * w.x();
                    if (std::abs(crossw) < margin * std::max(1.0, da.norm()))
                        generic = false;
                    continue;
                }
                const double s = (w.x() * db.y() - w.y() * db.x()) / denom;
                const double t = (w.x() * da.y() - w.y() * da.x()) / denom;
                if (s < -margin || s > 1.0 + margin || t < -margin ||
                    t > 1.0 + margin)
                    continue;
                if (s < margin || s > 1.0 - margin || t < margin ||
                    t > 1.0 - margin) {
                    generic = false;  // endpoint-adjacent: ambiguous
                    continue;
                }
                const Vector3d pa = a0 + s * (a1 - a0);
                const Vector3d pb = b0 + t * (b1 - b0);
                const double eps = (a1 - a0).cross(b1 - b0).dot(pa - pb);
                if (std::abs(eps) < 1e-14) {
                    generic = false;
                    continue;
                }
                signed_sum += eps > 0.0 ? 1 : -1;
            }
        }
        if (!generic) continue;
        if (signed_sum % 2 != 0) continue;  // inconsistent count: retry
        return signed_sum / 2;
    }
    throw LinkError(LinkErrorKind::NoGenericProjection,
                    "no generic projection direction found");
}

// ---------------------------------------------------------------------------
// Hopf invariant
// ---------------------------------------------------------------------------

struct HopfConfig {
    fibers::TraceConfig trace;
    LinkingConfig linking;
    double gap_threshold = 0.1;
    int max_refinements = 3;
    int max_jitters = 5;        // regular-value retries on RankDeficient
    double jitter_radius = 1e-3;
};

struct HopfInvariantResult {
    long value = 0;
    double gauss_raw_total = 0.0;
    long crossing_total = 0;
    double max_gap = 0.0;
    int refinement_rounds = 0;
    std::vector<FiberCurve> fibers_y;
    std::vector<FiberCurve> fibers_yprime;
};

namespace detail {

inline std::vector<FiberCurve> trace_with_jitter(const maps::MapDescriptor& m,
                                                 manifolds::SpherePoint y,
                                                 const HopfConfig& cfg,
                                                 Rng& jitter_rng) {
    for (int attempt = 0;; ++attempt) {
        try {
            return fibers::trace_fiber(m, y, cfg.trace);
        } catch (const fibers::TraceError& e) {
            if (e.kind == fibers::TraceErrorKind::NoPreimage) return {};
            if (e.kind != fibers::TraceErrorKind::RankDeficient ||
                attempt >= cfg.max_jitters)
                throw;
            // Sard: regular values are dense; nudge the target and retry
            Vec delta = jitter_rng.gaussian_vec(3);
            delta *= cfg.jitter_radius / delta.norm();
            y = manifolds::project_to_sphere(y.coords + delta, 0.5);
        }
    }
}

}  // namespace detail

/// Total linking number of all components of f^{-1}(y) with all components
/// of f^{-1}(y'), both oriented by the paper's disk-then-fiber recipe.
/// gauss_linking and crossing_linking must agree; disagreement aborts.
inline HopfInvariantResult hopf_invariant(const maps::MapDescriptor& m,
                                          const manifolds::SpherePoint& y,
                                          const manifolds::SpherePoint& yprime,
                                          const HopfConfig& cfg = {}) {
    if (manifolds::sphere_distance(y, yprime) <= 0.1)
        throw std::invalid_argument("hopf_invariant: base points closer than 0.1");

    HopfConfig working = cfg;
    Rng jitter_rng(cfg.trace.rng_seed ^ 0x9e3779b97f4a7c15ULL);
    HopfInvariantResult res;

    for (int round = 0;; ++round) {
        res.refinement_rounds = round;
        res.fibers_y = detail::trace_with_jitter(m, y, working, jitter_rng);
        res.fibers_yprime = detail::trace_with_jitter(m, yprime, working, jitter_rng);
        for (auto& c : res.fibers_y) c = fibers::orient_fiber(m, c);
        for (auto& c : res.fibers_yprime) c = fibers::orient_fiber(m, c);

        if (res.fibers_y.empty() || res.fibers_yprime.empty()) {
            res.value = 0;
            res.gauss_raw_total = 0.0;
            res.crossing_total = 0;
            res.max_gap = 0.0;
            return res;
        }

        double raw_total = 0.0;
        long rounded_total = 0;
        double max_gap = 0.0;
        bool needs_refinement = false;
        for (const auto& ka : res.fibers_y) {
            for (const auto& kb : res.fibers_yprime) {
                const LinkingResult lr = gauss_linking(ka, kb, working.linking);
                raw_total += lr.raw;
                rounded_total += lr.rounded;
                max_gap = std::max(max_gap, lr.gap);
                if (lr.gap >= working.gap_threshold) needs_refinement = true;
            }
        }
        if (needs_refinement) {
            if (round >= working.max_refinements)
                throw LinkError(LinkErrorKind::GapNotConverged,
                                "gauss integral gap exceeded the threshold after "
                                "refinement");
            working.trace.step *= 0.5;
            continue;
        }

        long crossing_total = 0;
        for (const auto& ka : res.fibers_y)
            for (const auto& kb : res.fibers_yprime)
                crossing_total += crossing_linking(ka, kb, working.linking);

        if (crossing_total != rounded_total)
            throw LinkError(LinkErrorKind::OracleDisagreement,
                            "gauss integral and crossing count disagree: " +
                                std::to_string(rounded_total) + " vs " +
                                std::to_string(crossing_total));

        res.value = rounded_total;
        res.gauss_raw_total = raw_total;
        res.crossing_total = crossing_total;
        res.max_gap = max_gap;
        return res;
    }
}

}  // namespace hopftk::linking
