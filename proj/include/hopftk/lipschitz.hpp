#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hopftk/core.hpp"
#include "hopftk/manifolds.hpp"
#include "hopftk/maps.hpp"

namespace hopftk::lipschitz {

using manifolds::Space;
using manifolds::SphereSpace;

struct LipschitzReport {
    double pair_lower = 0.0;
    double spectral_sup = std::numeric_limits<double>::quiet_NaN();
    Vec witness_x;
    Vec witness_xprime;
    double witness_ratio = 0.0;
    int samples = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline double pair_ratio(const maps::MapDescriptor& m, const Space& dom,
                         const Space& cod, const Vec& x, const Vec& xp) {
    const double dd = manifolds::space_distance(dom, x, xp);
    if (dd < 1e-7) return -1.0;
    return manifolds::space_distance(cod, maps::detail::eval_impl(m, x),
                                     maps::detail::eval_impl(m, xp)) /
           dd;
}

}  // namespace detail

/// Sampled lower bound for the Lipschitz constant: max distance ratio over
/// random global and local pairs, then geodesic coordinate ascent from the
/// best pair (50 sweeps with step halving).
///
/// For the Stiefel domain only local pairs are used (separation capped at
/// 0.01): its intrinsic metric is the induced one, and the ambient product
/// distance of far pairs undershoots it, which would inflate the ratios
/// past the true Lipschitz constant. At local scale the two metrics agree
/// to second order.
inline LipschitzReport pair_lower_bound(const maps::MapDescriptor& m, int samples,
                                        std::uint64_t seed) {
    if (samples < 2) throw std::invalid_argument("pair_lower_bound: samples >= 2");
    const Space dom = maps::domain(m);
    const Space cod = maps::codomain(m);
    const bool local_only = std::holds_alternative<manifolds::StiefelSpace>(dom);
    const double max_separation =
        local_only ? 0.01 : std::numeric_limits<double>::infinity();
    Rng rng(seed);

    LipschitzReport report;
    report.samples = samples;
    report.seed = seed;

    Vec bx, bxp;
    double best = -1.0;
    for (int i = 0; i < samples; ++i) {
        const Vec x = manifolds::space_sample(dom, rng);
        Vec xp;
        if (i % 2 == 0 && !local_only) {
            xp = manifolds::space_sample(dom, rng);
        } else {
            const Mat frame = manifolds::space_tangent_frame(dom, x);
            Vec dir = frame * rng.gaussian_vec(static_cast<int>(frame.cols()));
            if (dir.norm() < 1e-12) continue;
            dir.normalize();
            xp = manifolds::space_retract(dom, x + 1e-3 * dir);
        }
        const double r = detail::pair_ratio(m, dom, cod, x, xp);
        if (r > best) {
            best = r;
            bx = x;
            bxp = xp;
        }
    }

    double eta = local_only ? 0.002 : 0.02;
    for (int sweep = 0; sweep < 50; ++sweep) {
        bool improved = false;
        for (Vec* pt : {&bx, &bxp}) {
            const Mat frame = manifolds::space_tangent_frame(dom, *pt);
            for (int i = 0; i < frame.cols(); ++i) {
                for (double sign : {1.0, -1.0}) {
                    const Vec cand =
                        manifolds::space_retract(dom, *pt + sign * eta * frame.col(i));
                    const Vec& ox = pt == &bx ? cand : bx;
                    const Vec& oxp = pt == &bx ? bxp : cand;
                    if (manifolds::space_distance(dom, ox, oxp) > max_separation)
                        continue;
                    const double r = detail::pair_ratio(m, dom, cod, ox, oxp);
                    if (r > best) {
                        best = r;
                        *pt = cand;
                        improved = true;
                    }
                }
            }
        }
        if (!improved) eta *= 0.5;
    }

    report.pair_lower = best;
    report.witness_x = bx;
    report.witness_xprime = bxp;
    report.witness_ratio = best;
    return report;
}

/// Sup over seeded samples of the top singular value of the differential,
/// plus 20 rounds of coordinate ascent from the best point.
inline double spectral_estimate(const maps::MapDescriptor& m, int samples,
                                std::uint64_t seed, double h = 1e-5) {
    if (samples < 1) throw std::invalid_argument("spectral_estimate: samples >= 1");
    const Space dom = maps::domain(m);
    Rng rng(seed);
    auto top_sv = [&](const Vec& x) {
        return maps::differential(m, x, h).jac.jacobiSvd().singularValues()[0];
    };
    Vec best_x;
    double best = -1.0;
    for (int i = 0; i < samples; ++i) {
        const Vec x = manifolds::space_sample(dom, rng);
        const double s = top_sv(x);
        if (s > best) {
            best = s;
            best_x = x;
        }
    }
    double eta = 0.05;
    for (int sweep = 0; sweep < 20; ++sweep) {
        bool improved = false;
        const Mat frame = manifolds::space_tangent_frame(dom, best_x);
        for (int i = 0; i < frame.cols(); ++i) {
            for (double sign : {1.0, -1.0}) {
                const Vec cand =
                    manifolds::space_retract(dom, best_x + sign * eta * frame.col(i));
                const double s = top_sv(cand);
                if (s > best) {
                    best = s;
                    best_x = cand;
                    improved = true;
                }
            }
        }
        if (!improved) eta *= 0.5;
    }
    return best;
}

/// Convenience: fill both halves of the report.
inline LipschitzReport lipschitz_report(const maps::MapDescriptor& m, int samples,
                                        std::uint64_t seed) {
    LipschitzReport report = pair_lower_bound(m, samples, seed);
    report.spectral_sup = spectral_estimate(m, std::max(samples / 10, 20), seed + 1);
    return report;
}

struct EnergyEstimate {
    double value = 0.0;
    double std_error = 0.0;
    int samples = 0;
};

/// Closed-form volume of S^n(r).
inline double sphere_volume(int n, double r) {
    return 2.0 * std::pow(kPi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1)) *
           std::pow(r, n);
}

/// Monte Carlo energy E(f) = 1/2 int ||df||^2 dvol over a sphere domain.
inline EnergyEstimate energy(const maps::MapDescriptor& m, int samples,
                             std::uint64_t seed) {
    if (samples < 1000) throw std::invalid_argument("energy: samples >= 1000");
    const Space dom_space = maps::domain(m);
    const auto* dom = std::get_if<SphereSpace>(&dom_space);
    if (dom == nullptr) throw std::invalid_argument("energy: sphere domains only");
    const double vol = sphere_volume(dom->dim, dom->radius);
    Rng rng(seed);
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < samples; ++i) {
        const Vec x = manifolds::space_sample(dom_space, rng);
        const double g = 0.5 * maps::differential(m, x).jac.squaredNorm();
        sum += g;
        sumsq += g * g;
    }
    const double mean = sum / samples;
    const double var = std::max(0.0, sumsq / samples - mean * mean);
    EnergyEstimate est;
    est.value = vol * mean;
    est.std_error = vol * std::sqrt(var / samples);
    est.samples = samples;
    return est;
}

// ---------------------------------------------------------------------------
// Curve lengths in the unit tangent bundle
// ---------------------------------------------------------------------------

enum class BundleMetric { Product, Sasaki };

/// Length of a discrete curve (x_i, v_i) in US^n. The product metric sums
/// sqrt(|dx|^2 + |dv|^2); the Sasaki metric replaces dv by its projection
/// onto the tangent space at the segment-midpoint base point (the discrete
/// covariant derivative, second-order accurate).
inline double curve_length(const std::vector<std::pair<Vec, Vec>>& curve,
                           BundleMetric metric, bool closed = true) {
    if (curve.size() < 2) throw std::invalid_argument("curve_length: too few points");
    const double r = curve.front().first.norm();
    for (const auto& [x, v] : curve) {
        if (std::abs(x.norm() - r) > 1e-9)
            throw std::invalid_argument("curve_length: base points off the sphere");
        if (std::abs(v.norm() - 1.0) > 1e-9 || std::abs(v.dot(x)) / r > 1e-9)
            throw std::invalid_argument("curve_length: field not unit-tangent");
    }
    const std::size_t n = curve.size();
    const std::size_t segments = closed ? n : n - 1;
    double total = 0.0;
    for (std::size_t i = 0; i < segments; ++i) {
        const auto& [x0, v0] = curve[i];
        const auto& [x1, v1] = curve[(i + 1) % n];
        const Vec dx = x1 - x0;
        if (dx.norm() > 0.1)
            throw std::invalid_argument("curve_length: consecutive gap exceeds 0.1");
        Vec dv = v1 - v0;
        if (metric == BundleMetric::Sasaki) {
            Vec mid = x0 + x1;
            const double mn = mid.norm();
            if (mn < 1e-12)
                throw std::invalid_argument("curve_length: midpoint degenerate");
            mid /= mn;
            dv -= dv.dot(mid) * mid;
        }
        total += std::sqrt(dx.squaredNorm() + dv.squaredNorm());
    }
    return total;
}

}  // namespace hopftk::lipschitz
