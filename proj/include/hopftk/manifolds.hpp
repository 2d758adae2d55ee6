#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hopftk/algebra.hpp"
#include "hopftk/core.hpp"

namespace hopftk::manifolds {

// ---------------------------------------------------------------------------
// Points
// ---------------------------------------------------------------------------

struct SpherePoint {
    Vec coords;     // ambient coordinates, length dim + 1
    double radius = 1.0;

    int dim() const { return static_cast<int>(coords.size()) - 1; }
};

inline SpherePoint make_sphere_point(Vec coords, double radius = 1.0) {
    if (radius <= 0.0) throw std::invalid_argument("sphere radius must be positive");
    if (std::abs(coords.norm() - radius) > 1e-12 * std::max(1.0, radius))
        throw std::invalid_argument("sphere point is off the sphere");
    return {std::move(coords), radius};
}

/// Nearest point on the sphere (rescale to the radius).
inline SpherePoint project_to_sphere(Vec coords, double radius = 1.0) {
    const double n = coords.norm();
    if (n < 1e-14) throw std::invalid_argument("cannot project the origin to a sphere");
    return {coords * (radius / n), radius};
}

/// Geodesic distance r * angle. Uses the chord form, which stays accurate
/// for nearly equal and nearly antipodal points.
inline double sphere_distance(const SpherePoint& a, const SpherePoint& b) {
    if (a.coords.size() != b.coords.size())
        throw std::invalid_argument("sphere_distance: dimension mismatch");
    if (std::abs(a.radius - b.radius) > 1e-12)
        throw std::invalid_argument("sphere_distance: radius mismatch");
    const double r = a.radius;
    const Vec u = a.coords / r;
    const Vec v = b.coords / r;
    double angle = 0.0;
    if (u.dot(v) >= 0.0) {
        angle = 2.0 * std::asin(clamp_unit(0.5 * (u - v).norm()));
    } else {
        angle = kPi - 2.0 * std::asin(clamp_unit(0.5 * (u + v).norm()));
    }
    return r * angle;
}

struct ProductPoint {
    SpherePoint first;
    SpherePoint second;
};

inline double product_distance(const ProductPoint& p, const ProductPoint& q) {
    const double d1 = sphere_distance(p.first, q.first);
    const double d2 = sphere_distance(p.second, q.second);
    return std::hypot(d1, d2);
}

// ---------------------------------------------------------------------------
// Projective points (CP^n and HP^n via unit representatives)
// ---------------------------------------------------------------------------

enum class Field { Complex, Quaternionic };

struct ProjectivePoint {
    Vec rep;        // unit vector in F^{n+1}, stored as 2(n+1) or 4(n+1) reals
    Field field = Field::Complex;

    int n() const {
        const int per = field == Field::Complex ? 2 : 4;
        return static_cast<int>(rep.size()) / per - 1;
    }
};

inline ProjectivePoint make_projective_point(Vec rep, Field field) {
    const int per = field == Field::Complex ? 2 : 4;
    if (rep.size() % per != 0 || rep.size() < 2 * per)
        throw std::invalid_argument("projective representative has wrong length");
    if (std::abs(rep.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("projective representative must be unit");
    return {std::move(rep), field};
}

/// Hermitian inner product sum conj(a_i) b_i. Complex entries are (re, im)
/// pairs; quaternionic entries are (w, x, y, z) blocks with right scalar
/// multiplication understood, so |<a,b>| is scale-invariant.
inline Vec projective_inner(const ProjectivePoint& a, const ProjectivePoint& b) {
    if (a.field != b.field || a.rep.size() != b.rep.size())
        throw std::invalid_argument("projective_inner: mismatched points");
    if (a.field == Field::Complex) {
        double re = 0.0, im = 0.0;
        for (int i = 0; i < a.rep.size(); i += 2) {
            const double ar = a.rep[i], ai = a.rep[i + 1];
            const double br = b.rep[i], bi = b.rep[i + 1];
            re += ar * br + ai * bi;
            im += ar * bi - ai * br;
        }
        Vec q(2);
        q << re, im;
        return q;
    }
    algebra::Quaternion acc;
    for (int i = 0; i < a.rep.size(); i += 4) {
        const algebra::Quaternion ai{a.rep[i], a.rep[i + 1], a.rep[i + 2], a.rep[i + 3]};
        const algebra::Quaternion bi{b.rep[i], b.rep[i + 1], b.rep[i + 2], b.rep[i + 3]};
        acc = acc + ai.conjugate() * bi;
    }
    Vec q(4);
    q << acc.w, acc.x, acc.y, acc.z;
    return q;
}

/// Fubini-Study distance arccos |<a, b>|, range [0, pi/2].
inline double projective_distance(const ProjectivePoint& a, const ProjectivePoint& b) {
    const double c = clamp_unit(projective_inner(a, b).norm());
    if (c > 0.5) return 2.0 * std::asin(std::sqrt(std::max(0.0, 0.5 * (1.0 - c))));
    return std::acos(c);
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// i.i.d. uniform points on S^dim (normalized Gaussians), deterministic per seed.
inline std::vector<SpherePoint> uniform_sample(int dim, int count, std::uint64_t seed,
                                               double radius = 1.0) {
    if (count < 1) throw std::invalid_argument("uniform_sample: count must be >= 1");
    Rng rng(seed);
    std::vector<SpherePoint> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out.push_back({rng.unit_vec(dim + 1) * radius, radius});
    return out;
}

// ---------------------------------------------------------------------------
// Inner-product function on S^n x S^n and its level-set classifier
// ---------------------------------------------------------------------------

enum class IpClass { D, U, A, Generic };

struct IpResult {
    double value = 0.0;
    IpClass cls = IpClass::Generic;
};

/// IP(x, y) = x . y on unit spheres; D/U/A at +1/0/-1 within tol.
inline IpResult ip(const SpherePoint& x, const SpherePoint& y, double tol = 1e-9) {
    if (x.coords.size() != y.coords.size())
        throw std::invalid_argument("ip: dimension mismatch");
    if (std::abs(x.radius - 1.0) > 1e-9 || std::abs(y.radius - 1.0) > 1e-9)
        throw std::invalid_argument("ip: defined on unit spheres");
    const double v = x.coords.dot(y.coords);
    IpClass cls = IpClass::Generic;
    if (std::abs(v - 1.0) < tol) cls = IpClass::D;
    else if (std::abs(v + 1.0) < tol) cls = IpClass::A;
    else if (std::abs(v) < tol) cls = IpClass::U;
    return {v, cls};
}

/// v minus its component along x: the tangential part at x.
inline Vec tangent_project(const SpherePoint& x, const Vec& v) {
    if (v.size() != x.coords.size())
        throw std::invalid_argument("tangent_project: dimension mismatch");
    const double r2 = x.radius * x.radius;
    return v - (v.dot(x.coords) / r2) * x.coords;
}

// ---------------------------------------------------------------------------
// Spaces: the domains and codomains of the map algebra
// ---------------------------------------------------------------------------

struct SphereSpace {
    int dim = 2;
    double radius = 1.0;

    bool operator==(const SphereSpace&) const = default;
};

struct ProductSpace {
    SphereSpace first;
    SphereSpace second;

    bool operator==(const ProductSpace&) const = default;
};

struct ProjectiveSpace {
    Field field = Field::Complex;
    int n = 1;

    bool operator==(const ProjectiveSpace&) const = default;
};

/// V_2 R^4 = {(x, y) : x, y in S^3, x . y = 0} inside S^3 x S^3,
/// with the restricted product metric. Points are stored as [x; y].
struct StiefelSpace {
    bool operator==(const StiefelSpace&) const = default;
};

using Space = std::variant<SphereSpace, ProductSpace, ProjectiveSpace, StiefelSpace>;

inline int ambient_dim(const Space& s) {
    if (const auto* sp = std::get_if<SphereSpace>(&s)) return sp->dim + 1;
    if (const auto* pr = std::get_if<ProductSpace>(&s))
        return pr->first.dim + pr->second.dim + 2;
    if (const auto* pj = std::get_if<ProjectiveSpace>(&s))
        return (pj->field == Field::Complex ? 2 : 4) * (pj->n + 1);
    return 8;
}

inline int intrinsic_dim(const Space& s) {
    if (const auto* sp = std::get_if<SphereSpace>(&s)) return sp->dim;
    if (const auto* pr = std::get_if<ProductSpace>(&s))
        return pr->first.dim + pr->second.dim;
    if (const auto* pj = std::get_if<ProjectiveSpace>(&s))
        return (pj->field == Field::Complex ? 2 : 4) * pj->n;
    return 5;
}

inline std::string space_name(const Space& s) {
    if (const auto* sp = std::get_if<SphereSpace>(&s))
        return "S^" + std::to_string(sp->dim) + "(" + std::to_string(sp->radius) + ")";
    if (const auto* pr = std::get_if<ProductSpace>(&s))
        return space_name(pr->first) + " x " + space_name(pr->second);
    if (const auto* pj = std::get_if<ProjectiveSpace>(&s))
        return (pj->field == Field::Complex ? "CP^" : "HP^") + std::to_string(pj->n);
    return "V_2R^4";
}

inline bool space_contains(const Space& s, const Vec& p, double tol) {
    if (p.size() != ambient_dim(s)) return false;
    if (const auto* sp = std::get_if<SphereSpace>(&s))
        return std::abs(p.norm() - sp->radius) <= tol;
    if (const auto* pr = std::get_if<ProductSpace>(&s)) {
        const int a1 = pr->first.dim + 1;
        return std::abs(p.head(a1).norm() - pr->first.radius) <= tol &&
               std::abs(p.tail(p.size() - a1).norm() - pr->second.radius) <= tol;
    }
    if (std::get_if<ProjectiveSpace>(&s)) return std::abs(p.norm() - 1.0) <= tol;
    return std::abs(p.head(4).norm() - 1.0) <= tol &&
           std::abs(p.tail(4).norm() - 1.0) <= tol &&
           std::abs(p.head(4).dot(p.tail(4))) <= tol;
}

/// Distance between ambient representatives in the space's own metric.
inline double space_distance(const Space& s, const Vec& p, const Vec& q) {
    if (const auto* sp = std::get_if<SphereSpace>(&s)) {
        return sphere_distance({p, sp->radius}, {q, sp->radius});
    }
    if (const auto* pr = std::get_if<ProductSpace>(&s)) {
        const int a1 = pr->first.dim + 1;
        const double d1 = sphere_distance({p.head(a1), pr->first.radius},
                                          {q.head(a1), pr->first.radius});
        const double d2 =
            sphere_distance({p.tail(p.size() - a1), pr->second.radius},
                            {q.tail(q.size() - a1), pr->second.radius});
        return std::hypot(d1, d2);
    }
    if (const auto* pj = std::get_if<ProjectiveSpace>(&s)) {
        return projective_distance({p, pj->field}, {q, pj->field});
    }
    const double d1 = sphere_distance({p.head(4), 1.0}, {q.head(4), 1.0});
    const double d2 = sphere_distance({p.tail(4), 1.0}, {q.tail(4), 1.0});
    return std::hypot(d1, d2);
}

/// Nearest-point style retraction onto the space.
inline Vec space_retract(const Space& s, Vec p) {
    if (const auto* sp = std::get_if<SphereSpace>(&s)) {
        return p * (sp->radius / p.norm());
    }
    if (const auto* pr = std::get_if<ProductSpace>(&s)) {
        const int a1 = pr->first.dim + 1;
        p.head(a1) *= pr->first.radius / p.head(a1).norm();
        p.tail(p.size() - a1) *= pr->second.radius / p.tail(p.size() - a1).norm();
        return p;
    }
    if (std::get_if<ProjectiveSpace>(&s)) return p / p.norm();
    Vec x = p.head(4), y = p.tail(4);
    x.normalize();
    y -= y.dot(x) * x;
    y.normalize();
    Vec out(8);
    out << x, y;
    return out;
}

namespace detail {

/// Gram-Schmidt the ambient axes against `kill` (columns assumed orthonormal),
/// keeping the first `want` survivors. Deterministic by construction.
inline Mat complete_frame(const Mat& kill, int want) {
    const int amb = static_cast<int>(kill.rows());
    Mat frame(amb, want);
    int have = 0;
    for (int axis = 0; axis < amb && have < want; ++axis) {
        Vec u = Vec::Zero(amb);
        u[axis] = 1.0;
        u -= kill * (kill.transpose() * u);
        for (int k = 0; k < have; ++k) u -= frame.col(k).dot(u) * frame.col(k);
        const double n = u.norm();
        if (n < 1e-3) continue;
        frame.col(have++) = u / n;
    }
    if (have != want) throw std::runtime_error("tangent frame construction failed");
    return frame;
}

}  // namespace detail

/// Orthonormal tangent frame at p: ambient_dim x intrinsic_dim columns.
/// Built by Gram-Schmidt on the ambient axes; the normal directions
/// (and for projective spaces the scalar-orbit directions) are removed.
inline Mat space_tangent_frame(const Space& s, const Vec& p) {
    if (const auto* sp = std::get_if<SphereSpace>(&s)) {
        Mat kill = p / p.norm();
        return detail::complete_frame(kill, sp->dim);
    }
    if (const auto* pr = std::get_if<ProductSpace>(&s)) {
        const int a1 = pr->first.dim + 1;
        const int a2 = pr->second.dim + 1;
        Mat kill = Mat::Zero(a1 + a2, 2);
        kill.col(0).head(a1) = p.head(a1) / p.head(a1).norm();
        kill.col(1).tail(a2) = p.tail(a2) / p.tail(a2).norm();
        return detail::complete_frame(kill, pr->first.dim + pr->second.dim);
    }
    if (const auto* pj = std::get_if<ProjectiveSpace>(&s)) {
        // Horizontal frame: orthogonal complement of the scalar orbit of
        // the representative.
        const int amb = static_cast<int>(p.size());
        const int per = pj->field == Field::Complex ? 2 : 4;
        Mat kill(amb, per);
        kill.col(0) = p / p.norm();
        for (int u = 1; u < per; ++u) {
            Vec v = Vec::Zero(amb);
            for (int i = 0; i < amb; i += per) {
                const algebra::Quaternion unit{0.0, u == 1 ? 1.0 : 0.0,
                                               u == 2 ? 1.0 : 0.0, u == 3 ? 1.0 : 0.0};
                if (per == 2) {
                    // multiplication by i on the complex entry
                    v[i] = -p[i + 1];
                    v[i + 1] = p[i];
                } else {
                    const algebra::Quaternion e{p[i], p[i + 1], p[i + 2], p[i + 3]};
                    const algebra::Quaternion w = e * unit;  // right multiplication
                    v[i] = w.w;
                    v[i + 1] = w.x;
                    v[i + 2] = w.y;
                    v[i + 3] = w.z;
                }
            }
            for (int k = 0; k < u; ++k) v -= kill.col(k).dot(v) * kill.col(k);
            kill.col(u) = v / v.norm();
        }
        return detail::complete_frame(kill, intrinsic_dim(s));
    }
    // Stiefel: constraint gradients at (x, y) are (x,0), (0,y), (y,x)/sqrt(2);
    // they are already orthonormal for a point on the manifold.
    const Vec x = p.head(4), y = p.tail(4);
    Mat kill = Mat::Zero(8, 3);
    kill.col(0).head(4) = x;
    kill.col(1).tail(4) = y;
    kill.col(2).head(4) = y / std::sqrt(2.0);
    kill.col(2).tail(4) = x / std::sqrt(2.0);
    return detail::complete_frame(kill, 5);
}

/// Uniform-style sample of the space (Haar for spheres and the Stiefel
/// manifold, lift of the sphere sample for projective spaces).
inline Vec space_sample(const Space& s, Rng& rng) {
    if (const auto* sp = std::get_if<SphereSpace>(&s))
        return rng.unit_vec(sp->dim + 1) * sp->radius;
    if (const auto* pr = std::get_if<ProductSpace>(&s)) {
        Vec out(ambient_dim(s));
        out.head(pr->first.dim + 1) = rng.unit_vec(pr->first.dim + 1) * pr->first.radius;
        out.tail(pr->second.dim + 1) =
            rng.unit_vec(pr->second.dim + 1) * pr->second.radius;
        return out;
    }
    if (std::get_if<ProjectiveSpace>(&s)) return rng.unit_vec(ambient_dim(s));
    const Vec x = rng.unit_vec(4);
    Vec y = rng.gaussian_vec(4);
    y -= y.dot(x) * x;
    while (y.norm() < 1e-9) {
        y = rng.gaussian_vec(4);
        y -= y.dot(x) * x;
    }
    y.normalize();
    Vec out(8);
    out << x, y;
    return out;
}

}  // namespace hopftk::manifolds
