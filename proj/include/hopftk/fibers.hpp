#pragma once

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hopftk/core.hpp"
#include "hopftk/manifolds.hpp"
#include "hopftk/maps.hpp"

namespace hopftk::fibers {

using Eigen::Matrix3d;
using Eigen::Vector3d;
using Eigen::Vector4d;

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Oriented closed polyline approximating one connected component of a
/// point-preimage in S^3. `orientation` multiplies the traversal order.
struct FiberCurve {
    std::vector<Vector4d> points;
    bool closed = false;
    int orientation = +1;
    double residual = 0.0;  // max |f(p) - y| over the points
    double step = 0.0;      // tracing step the curve was built with
};

struct GreatCircleFit {
    Eigen::Matrix<double, 4, 2> plane;  // orthonormal 2-frame
    double max_residual = 0.0;          // max orthogonal distance to the plane
};

struct TraceConfig {
    int seeds = 64;
    double step = 5e-3;
    double residual_tol = 1e-8;
    double min_singular_value = 1e-4;  // regular-value guard on sigma_2
    std::uint64_t rng_seed = 1;
    int max_corrector_iters = 200;
    int max_steps = 0;  // 0 = automatic from the step size
};

enum class TraceErrorKind { RankDeficient, NoPreimage, StepCollapse };

struct TraceError : std::runtime_error {
    TraceErrorKind kind;
    TraceError(TraceErrorKind k, const std::string& msg)
        : std::runtime_error(msg), kind(k) {}
};

struct DegenerateCloud : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_s3_to_s2(const maps::MapDescriptor& m) {
    const auto dom = maps::domain(m);
    const auto cod = maps::codomain(m);
    const auto* ds = std::get_if<manifolds::SphereSpace>(&dom);
    const auto* cs = std::get_if<manifolds::SphereSpace>(&cod);
    if (ds == nullptr || cs == nullptr || ds->dim != 3 ||
        std::abs(ds->radius - 1.0) > 1e-12 || cs->dim != 2 ||
        std::abs(cs->radius - 0.5) > 1e-12)
        throw std::invalid_argument("fiber tracing needs a map S^3 -> S^2(1/2)");
}

inline Vector3d eval3(const maps::MapDescriptor& m, const Vector4d& p) {
    Vec x(4);
    x << p[0], p[1], p[2], p[3];
    const Vec y = maps::detail::eval_impl(m, x);
    return {y[0], y[1], y[2]};
}

/// Orthonormal tangent frame of S^3 at unit p (3 columns).
inline Eigen::Matrix<double, 4, 3> s3_frame(const Vector4d& p) {
    Eigen::Matrix<double, 4, 3> frame;
    int have = 0;
    for (int axis = 0; axis < 4 && have < 3; ++axis) {
        Vector4d u = Vector4d::Zero();
        u[axis] = 1.0;
        u -= p.dot(u) * p;
        for (int k = 0; k < have; ++k) u -= frame.col(k).dot(u) * frame.col(k);
        const double n = u.norm();
        if (n < 1e-3) continue;
        frame.col(have++) = u / n;
    }
    if (have != 3) throw std::runtime_error("s3_frame: construction failed");
    return frame;
}

/// 3x3 Jacobian of f along the given tangent frame (central differences).
inline Matrix3d frame_jacobian(const maps::MapDescriptor& m, const Vector4d& p,
                               const Eigen::Matrix<double, 4, 3>& frame,
                               double h = 1e-6) {
    Matrix3d jac;
    for (int i = 0; i < 3; ++i) {
        const Vector4d xp = (p + h * frame.col(i)).normalized();
        const Vector4d xm = (p - h * frame.col(i)).normalized();
        jac.col(i) = (eval3(m, xp) - eval3(m, xm)) / (2.0 * h);
    }
    return jac;
}

struct CorrectorResult {
    Vector4d point = Vector4d::Zero();
    double residual = 0.0;
    bool converged = false;
};

/// Gauss-Newton onto {f = y} on S^3 via the SVD pseudo-inverse; the kernel
/// direction receives no update, so the corrector does not slide along the
/// fiber.
inline CorrectorResult correct(const maps::MapDescriptor& m, const Vector3d& y,
                               Vector4d p, double tol, int max_iters) {
    CorrectorResult out;
    for (int iter = 0; iter < max_iters; ++iter) {
        const Vector3d r = eval3(m, p) - y;
        if (r.norm() < tol) {
            out.point = p;
            out.residual = r.norm();
            out.converged = true;
            return out;
        }
        const auto frame = s3_frame(p);
        const Matrix3d jac = frame_jacobian(m, p, frame);
        Eigen::JacobiSVD<Matrix3d> svd(jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Vector3d& sv = svd.singularValues();
        Vector3d rhs = svd.matrixU().transpose() * (-r);
        for (int i = 0; i < 3; ++i)
            rhs[i] = sv[i] > 1e-9 * std::max(1.0, sv[0]) ? rhs[i] / sv[i] : 0.0;
        Vector3d u = svd.matrixV() * rhs;
        if (u.norm() > 0.25) u *= 0.25 / u.norm();  // keep steps on-manifold
        p = (p + frame * u).normalized();
    }
    out.point = p;
    out.residual = (eval3(m, p) - y).norm();
    out.converged = false;
    return out;
}

/// Unit kernel direction of df|_{T_p S^3}; throws RankDeficient when the
/// regular-value guard fails.
inline Vector4d kernel_direction(const maps::MapDescriptor& m, const Vector4d& p,
                                 double min_sv) {
    const auto frame = s3_frame(p);
    const Matrix3d jac = frame_jacobian(m, p, frame);
    Eigen::JacobiSVD<Matrix3d> svd(jac, Eigen::ComputeFullV);
    const Vector3d& sv = svd.singularValues();
    if (sv[1] <= min_sv)
        throw TraceError(TraceErrorKind::RankDeficient,
                         "regular-value guard: sigma_2 = " + std::to_string(sv[1]));
    const Vector3d k = svd.matrixV().col(2);
    Vector4d t = frame * k;
    return t.normalized();
}

inline double point_to_curve(const Vector4d& p, const FiberCurve& curve) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : curve.points) best = std::min(best, (p - q).norm());
    return best;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Tracing
// ---------------------------------------------------------------------------

/// Trace the connected components of f^{-1}(y) for f : S^3 -> S^2(1/2).
/// Predictor: unit kernel vector of df restricted to T_p S^3.
/// Corrector: Gauss-Newton back onto {f = y} on the sphere.
/// Components found from the seeded starts are deduplicated.
inline std::vector<FiberCurve> trace_fiber(const maps::MapDescriptor& m,
                                           const manifolds::SpherePoint& y,
                                           const TraceConfig& cfg = {}) {
    detail::require_s3_to_s2(m);
    if (y.coords.size() != 3 || std::abs(y.radius - 0.5) > 1e-12 ||
        std::abs(y.coords.norm() - 0.5) > 1e-9)
        throw std::invalid_argument("trace_fiber: target must lie on S^2(1/2)");
    if (cfg.step < 1e-4 || cfg.step > 1e-1)
        throw std::invalid_argument("trace_fiber: step must lie in [1e-4, 1e-1]");

    const Vector3d target(y.coords[0], y.coords[1], y.coords[2]);
    const int max_steps =
        cfg.max_steps > 0 ? cfg.max_steps : static_cast<int>(std::ceil(64.0 / cfg.step));

    Rng rng(cfg.rng_seed);
    std::vector<FiberCurve> curves;
    bool any_converged = false;

    for (int s = 0; s < cfg.seeds; ++s) {
        const Vec seed = rng.unit_vec(4);
        const Vector4d start(seed[0], seed[1], seed[2], seed[3]);
        const auto conv = detail::correct(m, target, start, cfg.residual_tol,
                                          cfg.max_corrector_iters);
        if (!conv.converged) continue;
        any_converged = true;

        bool duplicate = false;
        for (const auto& c : curves)
            if (detail::point_to_curve(conv.point, c) < 2.0 * cfg.step) {
                duplicate = true;
                break;
            }
        if (duplicate) continue;

        // continuation around the component
        FiberCurve curve;
        curve.step = cfg.step;
        const Vector4d p0 = conv.point;
        const Vector4d t0 = detail::kernel_direction(m, p0, cfg.min_singular_value);
        Vector4d p = p0;
        Vector4d t = t0;
        curve.points.push_back(p0);
        double max_resid = conv.residual;
        for (int n = 0; n < max_steps; ++n) {
            double local = cfg.step;
            detail::CorrectorResult next;
            while (true) {
                const Vector4d pred = (p + local * t).normalized();
                next = detail::correct(m, target, pred, cfg.residual_tol, 30);
                if (next.converged && (next.point - p).norm() > 0.25 * local) break;
                local *= 0.5;
                if (local < cfg.step / 64.0)
                    throw TraceError(TraceErrorKind::StepCollapse,
                                     "corrector stalled during continuation");
            }
            Vector4d tn =
                detail::kernel_direction(m, next.point, cfg.min_singular_value);
            if (tn.dot(next.point - p) < 0.0) tn = -tn;
            p = next.point;
            t = tn;
            max_resid = std::max(max_resid, next.residual);
            if (curve.points.size() >= 10 && (p - p0).norm() < 0.9 * cfg.step &&
                t.dot(t0) > 0.9) {
                // close the loop, keeping the final stored gap inside one step
                // without duplicating the start point
                if ((p - p0).norm() > 0.35 * cfg.step) {
                    curve.points.push_back(p);
                } else if ((curve.points.back() - p0).norm() >= cfg.step) {
                    const Vector4d mid =
                        (0.5 * (curve.points.back() + p0)).normalized();
                    const auto fix =
                        detail::correct(m, target, mid, cfg.residual_tol, 30);
                    if (fix.converged) curve.points.push_back(fix.point);
                }
                curve.closed = true;
                break;
            }
            curve.points.push_back(p);
        }
        if (!curve.closed)
            throw TraceError(TraceErrorKind::StepCollapse,
                             "curve failed to close within the step budget");
        curve.residual = max_resid;
        curves.push_back(std::move(curve));
    }

    if (curves.empty())
        throw TraceError(TraceErrorKind::NoPreimage,
                         any_converged ? "converged points were all duplicates"
                                       : "no seed converged onto the fiber");
    return curves;
}

/// Hausdorff distance between the vertex sets of two curves.
inline double hausdorff_distance(const FiberCurve& a, const FiberCurve& b) {
    double d = 0.0;
    for (const auto& p : a.points) d = std::max(d, detail::point_to_curve(p, b));
    for (const auto& q : b.points) d = std::max(d, detail::point_to_curve(q, a));
    return d;
}

// ---------------------------------------------------------------------------
// Orientation
// ---------------------------------------------------------------------------

/// Fix the traversal direction so that (e1, e2, t) is positively oriented in
/// T_p S^3 (outward-normal convention on both spheres), where (e1, e2) push
/// forward to a positively oriented frame at y and t is the curve tangent.
/// The returned curve is canonicalized: points run positively, orientation = +1.
inline FiberCurve orient_fiber(const maps::MapDescriptor& m, FiberCurve curve) {
    detail::require_s3_to_s2(m);
    const std::size_t n = curve.points.size();
    if (n < 8) throw std::invalid_argument("orient_fiber: too few points");

    const Vector3d y = detail::eval3(m, curve.points[0]);
    const Vector3d yhat = y.normalized();

    int vote = 0;
    const std::size_t samples = 7;
    for (std::size_t k = 0; k < samples; ++k) {
        const std::size_t i = (k * n) / samples;
        const Vector4d& p = curve.points[i];
        const Vector4d& prev = curve.points[(i + n - 1) % n];
        const Vector4d& next = curve.points[(i + 1) % n];
        Vector4d t = next - prev;
        t -= p.dot(t) * p;
        if (t.norm() < 1e-12) continue;
        t.normalize();

        // complete {p, t} to an orthonormal basis of R^4
        Eigen::Matrix<double, 4, 2> e;
        int have = 0;
        for (int axis = 0; axis < 4 && have < 2; ++axis) {
            Vector4d u = Vector4d::Zero();
            u[axis] = 1.0;
            u -= p.dot(u) * p;
            u -= t.dot(u) * t;
            for (int j = 0; j < have; ++j) u -= e.col(j).dot(u) * e.col(j);
            if (u.norm() < 1e-3) continue;
            e.col(have++) = u.normalized();
        }
        if (have != 2) continue;

        const double h = 1e-6;
        const Vector3d w1 =
            (detail::eval3(m, (p + h * e.col(0)).normalized()) -
             detail::eval3(m, (p - h * e.col(0)).normalized())) /
            (2.0 * h);
        const Vector3d w2 =
            (detail::eval3(m, (p + h * e.col(1)).normalized()) -
             detail::eval3(m, (p - h * e.col(1)).normalized())) /
            (2.0 * h);
        Matrix3d cod;
        cod.col(0) = yhat;
        cod.col(1) = w1;
        cod.col(2) = w2;
        const double det_cod = cod.determinant();
        if (std::abs(det_cod) < 1e-10)
            throw TraceError(TraceErrorKind::RankDeficient,
                             "orient_fiber: pushforward frame is degenerate");
        Eigen::Matrix4d dom;
        dom.col(0) = p;
        dom.col(1) = e.col(0);
        dom.col(2) = e.col(1);
        dom.col(3) = t;
        vote += (det_cod > 0.0 ? 1 : -1) * (dom.determinant() > 0.0 ? 1 : -1);
    }
    if (vote == 0)
        throw TraceError(TraceErrorKind::RankDeficient,
                         "orient_fiber: orientation vote inconclusive");
    if (vote < 0) std::reverse(curve.points.begin(), curve.points.end());
    curve.orientation = +1;
    return curve;
}

// ---------------------------------------------------------------------------
// Great-circle fitting
// ---------------------------------------------------------------------------

/// Best 2-plane through the origin by SVD; the residual is the maximum
/// orthogonal distance from the samples to that plane.
inline GreatCircleFit fit_great_circle(const std::vector<Vector4d>& points) {
    if (points.size() < 8)
        throw std::invalid_argument("fit_great_circle: need at least 8 points");
    Mat cloud(static_cast<int>(points.size()), 4);
    for (std::size_t i = 0; i < points.size(); ++i)
        cloud.row(static_cast<int>(i)) = points[i].transpose();
    Eigen::JacobiSVD<Mat> svd(cloud, Eigen::ComputeThinV);
    const Vec sv = svd.singularValues();
    if (sv[1] - sv[2] < 1e-12 * std::max(1.0, sv[0]))
        throw DegenerateCloud("fit_great_circle: best 2-plane is not unique");
    GreatCircleFit fit;
    fit.plane.col(0) = svd.matrixV().col(0);
    fit.plane.col(1) = svd.matrixV().col(1);
    double worst = 0.0;
    for (const auto& p : points) {
        const Eigen::Vector2d c = fit.plane.transpose() * p;
        worst = std::max(worst, (p - fit.plane * c).norm());
    }
    fit.max_residual = worst;
    return fit;
}

inline GreatCircleFit fit_great_circle(const FiberCurve& curve) {
    return fit_great_circle(curve.points);
}

// ---------------------------------------------------------------------------
// Curve-to-curve distance statistics
// ---------------------------------------------------------------------------

namespace detail {

/// Point on the closed polyline at fractional parameter t (vertex units),
/// cubic Lagrange through the four surrounding vertices, pulled back to S^3.
inline Vector4d curve_position(const FiberCurve& c, double t) {
    const int n = static_cast<int>(c.points.size());
    const double tn = t - std::floor(t / n) * n;
    const int i = static_cast<int>(std::floor(tn));
    const double u = tn - i;
    const Vector4d& p0 = c.points[(i + n - 1) % n];
    const Vector4d& p1 = c.points[i % n];
    const Vector4d& p2 = c.points[(i + 1) % n];
    const Vector4d& p3 = c.points[(i + 2) % n];
    // Lagrange basis on nodes -1, 0, 1, 2
    const double l0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
    const double l1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
    const double l2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
    const double l3 = (u + 1.0) * u * (u - 1.0) / 6.0;
    Vector4d q = l0 * p0 + l1 * p1 + l2 * p2 + l3 * p3;
    return q.normalized();
}

inline double geodesic(const Vector4d& a, const Vector4d& b) {
    if (a.dot(b) >= 0.0) return 2.0 * std::asin(clamp_unit(0.5 * (a - b).norm()));
    return kPi - 2.0 * std::asin(clamp_unit(0.5 * (a + b).norm()));
}

/// min over the refined arc of K2 of the geodesic distance to p.
inline double min_distance_to_curve(const Vector4d& p, const FiberCurve& k2) {
    const int n = static_cast<int>(k2.points.size());
    int best = 0;
    double bestdot = -2.0;
    for (int i = 0; i < n; ++i) {
        const double d = p.dot(k2.points[i]);
        if (d > bestdot) {
            bestdot = d;
            best = i;
        }
    }
    // golden-section refinement on the polyline parameter around the best vertex
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = best - 1.0, hi = best + 1.0;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = geodesic(p, curve_position(k2, x1));
    double f2 = geodesic(p, curve_position(k2, x2));
    for (int iter = 0; iter < 80; ++iter) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = geodesic(p, curve_position(k2, x1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = geodesic(p, curve_position(k2, x2));
        }
    }
    return std::min(f1, f2);
}

}  // namespace detail

struct DistanceStats {
    double min = 0.0;
    double max = 0.0;
};

/// min and max over K1 vertices of the geodesic distance to the refined K2
/// arc. Parallel curves show max - min at the interpolation error scale.
inline DistanceStats fiber_distance_stats(const FiberCurve& k1, const FiberCurve& k2) {
    if (!k1.closed || !k2.closed)
        throw std::invalid_argument("fiber_distance_stats: curves must be closed");
    DistanceStats stats;
    stats.min = std::numeric_limits<double>::infinity();
    stats.max = 0.0;
    for (const auto& p : k1.points) {
        const double d = detail::min_distance_to_curve(p, k2);
        stats.min = std::min(stats.min, d);
        stats.max = std::max(stats.max, d);
    }
    return stats;
}

// ---------------------------------------------------------------------------
// CSV import / export
// ---------------------------------------------------------------------------

inline void write_fiber_csv(std::ostream& os, const FiberCurve& c) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "# closed=%d orientation=%d residual=%.17g step=%.17g\n",
                  c.closed ? 1 : 0, c.orientation, c.residual, c.step);
    os << buf << "x0,x1,x2,x3,index\n";
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%zu\n", c.points[i][0],
                      c.points[i][1], c.points[i][2], c.points[i][3], i);
        os << buf;
    }
}

inline FiberCurve read_fiber_csv(std::istream& is) {
    FiberCurve c;
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
        throw std::runtime_error("read_fiber_csv: missing metadata line");
    {
        int closed = 0, orient = 1;
        double resid = 0.0, step = 0.0;
        if (std::sscanf(line.c_str(), "# closed=%d orientation=%d residual=%lg step=%lg",
                        &closed, &orient, &resid, &step) != 4)
            throw std::runtime_error("read_fiber_csv: bad metadata line");
        c.closed = closed != 0;
        c.orientation = orient;
        c.residual = resid;
        c.step = step;
    }
    if (!std::getline(is, line))  // header
        throw std::runtime_error("read_fiber_csv: missing header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        Vector4d p;
        std::size_t idx = 0;
        if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg,%zu", &p[0], &p[1], &p[2], &p[3],
                        &idx) != 5)
            throw std::runtime_error("read_fiber_csv: bad row");
        c.points.push_back(p);
    }
    return c;
}

}  // namespace hopftk::fibers
