#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hopftk/algebra.hpp"
#include "hopftk/core.hpp"
#include "hopftk/manifolds.hpp"

namespace hopftk::maps {

using manifolds::Field;
using manifolds::ProductSpace;
using manifolds::ProjectiveSpace;
using manifolds::Space;
using manifolds::SphereSpace;
using manifolds::StiefelSpace;

struct MapDescriptor;
using MapPtr = std::shared_ptr<const MapDescriptor>;

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

/// S^{2n+1} -> CP^n. For n = 1 the codomain is exposed as S^2(1/2) through
/// the quadratic formula; for n >= 2 points of CP^n are unit representatives.
struct HopfComplexFamily {
    int n = 1;
};

/// S^{4n+3} -> HP^n via unit quaternionic representatives.
struct HopfQuaternionicFamily {
    int n = 1;
};

/// S^15 -> S^8(1/2), (u, v) |-> (  (|u|^2 - |v|^2)/2,  u vbar  ).
struct HopfOctonionicFamily {};

/// Delta S^n -> S^n x S^n. The domain is the round n-sphere of radius
/// sqrt(2), the intrinsic model of the diagonal; p |-> (p, p)/sqrt(2).
struct DiagonalInclusionFamily {
    int n = 1;
};

/// x |-> (x, Jx) into S^{d-1} x S^{d-1} for an orthogonal complex structure J.
struct HopfVectorFieldFamily {
    Mat structure;
};

/// V_2 R^4 -> G_2 R^4 = S^2(1/sqrt2) x S^2(1/sqrt2), (x, y) |-> x ^ y split
/// into the +-1 eigenspaces of the Hodge star.
struct StiefelPlueckerFamily {};

/// V_2 R^4 -> S^2 x S^2, (x, y) |-> (y x^{-1}, x^{-1} y) over unit quaternions.
struct StiefelQuatFamily {};

/// Precompose a Hopf map with g_d(z1, z2) = (z1, z2^d)/||.||. Negative d is
/// realized as (z1, conj(z2)^{|d|})/||.||, the polynomial model of the same
/// degree; the literal negative power degenerates on the circle z2 = 0.
struct PowerPrecomposeFamily {
    MapPtr inner;
    int d = 1;
};

/// Sigma phi (x cos t, sin t) = (phi(x) cos t, sin t); componentwise on
/// product codomains.
struct SuspensionFamily {
    MapPtr inner;
};

/// g_cod o m o g_dom for orthogonal block isometries of domain and codomain.
struct IsometryConjugateFamily {
    MapPtr inner;
    std::vector<Mat> dom_blocks;
    std::vector<Mat> cod_blocks;
};

/// Renormalized tangential bump: f(x) + amplitude * bump(x) * T(f(x)) pushed
/// back to the codomain sphere. bump is a C^1 cosine cap of the given
/// geodesic width around `center`; T is the tangential part of a fixed
/// ambient axis.
struct BumpPerturbFamily {
    MapPtr inner;
    Vec center;
    double amplitude = 0.0;
    double width = 0.5;
};

struct IdentityFamily {
    SphereSpace sphere;
};

struct ConstantFamily {
    SphereSpace domain;
    SphereSpace codomain;
    Vec value;
};

/// S^n -> S^n moving points along great semicircles of longitude by a
/// piecewise-linear reparameterization of colatitude (poles fixed).
struct LongitudeReparamFamily {
    std::vector<double> xs;
    std::vector<double> ys;
    int n = 2;
};

using Family =
    std::variant<HopfComplexFamily, HopfQuaternionicFamily, HopfOctonionicFamily,
                 DiagonalInclusionFamily, HopfVectorFieldFamily,
                 StiefelPlueckerFamily, StiefelQuatFamily, PowerPrecomposeFamily,
                 SuspensionFamily, IsometryConjugateFamily, BumpPerturbFamily,
                 IdentityFamily, ConstantFamily, LongitudeReparamFamily>;

struct MapDescriptor {
    Family family;
};

// ---------------------------------------------------------------------------
// Domain / codomain
// ---------------------------------------------------------------------------

inline Space domain(const MapDescriptor& m);
inline Space codomain(const MapDescriptor& m);

namespace detail {

inline Space suspend_space(const Space& s) {
    if (const auto* sp = std::get_if<SphereSpace>(&s))
        return SphereSpace{sp->dim + 1, sp->radius};
    if (const auto* pr = std::get_if<ProductSpace>(&s))
        return ProductSpace{{pr->first.dim + 1, pr->first.radius},
                            {pr->second.dim + 1, pr->second.radius}};
    throw std::invalid_argument("suspension needs sphere or product-of-spheres");
}

}  // namespace detail

inline Space domain(const MapDescriptor& m) {
    return std::visit(
        [](const auto& f) -> Space {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, HopfComplexFamily>)
                return SphereSpace{2 * f.n + 1, 1.0};
            else if constexpr (std::is_same_v<T, HopfQuaternionicFamily>)
                return SphereSpace{4 * f.n + 3, 1.0};
            else if constexpr (std::is_same_v<T, HopfOctonionicFamily>)
                return SphereSpace{15, 1.0};
            else if constexpr (std::is_same_v<T, DiagonalInclusionFamily>)
                return SphereSpace{f.n, std::sqrt(2.0)};
            else if constexpr (std::is_same_v<T, HopfVectorFieldFamily>)
                return SphereSpace{static_cast<int>(f.structure.rows()) - 1, 1.0};
            else if constexpr (std::is_same_v<T, StiefelPlueckerFamily> ||
                               std::is_same_v<T, StiefelQuatFamily>)
                return StiefelSpace{};
            else if constexpr (std::is_same_v<T, PowerPrecomposeFamily>)
                return SphereSpace{3, 1.0};
            else if constexpr (std::is_same_v<T, SuspensionFamily>)
                return detail::suspend_space(domain(*f.inner));
            else if constexpr (std::is_same_v<T, IsometryConjugateFamily>)
                return domain(*f.inner);
            else if constexpr (std::is_same_v<T, BumpPerturbFamily>)
                return domain(*f.inner);
            else if constexpr (std::is_same_v<T, IdentityFamily>)
                return f.sphere;
            else if constexpr (std::is_same_v<T, ConstantFamily>)
                return f.domain;
            else
                return SphereSpace{f.n, 1.0};
        },
        m.family);
}

inline Space codomain(const MapDescriptor& m) {
    return std::visit(
        [](const auto& f) -> Space {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, HopfComplexFamily>) {
                if (f.n == 1) return SphereSpace{2, 0.5};
                return ProjectiveSpace{Field::Complex, f.n};
            } else if constexpr (std::is_same_v<T, HopfQuaternionicFamily>)
                return ProjectiveSpace{Field::Quaternionic, f.n};
            else if constexpr (std::is_same_v<T, HopfOctonionicFamily>)
                return SphereSpace{8, 0.5};
            else if constexpr (std::is_same_v<T, DiagonalInclusionFamily>)
                return ProductSpace{{f.n, 1.0}, {f.n, 1.0}};
            else if constexpr (std::is_same_v<T, HopfVectorFieldFamily>) {
                const int d = static_cast<int>(f.structure.rows()) - 1;
                return ProductSpace{{d, 1.0}, {d, 1.0}};
            } else if constexpr (std::is_same_v<T, StiefelPlueckerFamily>) {
                const double r = 1.0 / std::sqrt(2.0);
                return ProductSpace{{2, r}, {2, r}};
            } else if constexpr (std::is_same_v<T, StiefelQuatFamily>)
                return ProductSpace{{2, 1.0}, {2, 1.0}};
            else if constexpr (std::is_same_v<T, PowerPrecomposeFamily>)
                return codomain(*f.inner);
            else if constexpr (std::is_same_v<T, SuspensionFamily>)
                return detail::suspend_space(codomain(*f.inner));
            else if constexpr (std::is_same_v<T, IsometryConjugateFamily>)
                return codomain(*f.inner);
            else if constexpr (std::is_same_v<T, BumpPerturbFamily>)
                return codomain(*f.inner);
            else if constexpr (std::is_same_v<T, IdentityFamily>)
                return f.sphere;
            else if constexpr (std::is_same_v<T, ConstantFamily>)
                return f.codomain;
            else
                return SphereSpace{f.n, 1.0};
        },
        m.family);
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

inline MapDescriptor hopf_complex(int n = 1) {
    if (n < 1) throw std::invalid_argument("hopf_complex: n >= 1");
    return {HopfComplexFamily{n}};
}

inline MapDescriptor hopf_quaternionic(int n = 1) {
    if (n < 1) throw std::invalid_argument("hopf_quaternionic: n >= 1");
    return {HopfQuaternionicFamily{n}};
}

inline MapDescriptor hopf_octonionic() { return {HopfOctonionicFamily{}}; }

inline MapDescriptor diagonal_inclusion(int n) {
    if (n < 1) throw std::invalid_argument("diagonal_inclusion: n >= 1");
    return {DiagonalInclusionFamily{n}};
}

inline MapDescriptor hopf_vector_field(const algebra::OrthogonalComplexStructure& j) {
    if (!algebra::ocs_is_valid(j, 1e-9))
        throw std::invalid_argument("hopf_vector_field: invalid structure");
    return {HopfVectorFieldFamily{j.matrix}};
}

inline MapDescriptor stiefel_pluecker() { return {StiefelPlueckerFamily{}}; }
inline MapDescriptor stiefel_quat() { return {StiefelQuatFamily{}}; }

inline MapDescriptor power_precompose(MapDescriptor m, int d) {
    const auto* h = std::get_if<HopfComplexFamily>(&m.family);
    if (h == nullptr || h->n != 1)
        throw std::invalid_argument("power_precompose: base map must be the S^3 Hopf map");
    return {PowerPrecomposeFamily{std::make_shared<MapDescriptor>(std::move(m)), d}};
}

inline MapDescriptor suspend(MapDescriptor m) {
    detail::suspend_space(codomain(m));  // validates shape
    if (!std::holds_alternative<SphereSpace>(domain(m)))
        throw std::invalid_argument("suspend: domain must be a sphere");
    return {SuspensionFamily{std::make_shared<MapDescriptor>(std::move(m))}};
}

namespace detail {

inline int block_count(const Space& s) {
    if (std::holds_alternative<ProductSpace>(s)) return 2;
    return 1;
}

inline void check_blocks(const Space& s, const std::vector<Mat>& blocks,
                         const char* what) {
    if (blocks.empty()) return;  // identity
    if (static_cast<int>(blocks.size()) != block_count(s))
        throw std::invalid_argument(std::string(what) + ": wrong block count");
    std::vector<int> sizes;
    if (const auto* pr = std::get_if<ProductSpace>(&s)) {
        sizes = {pr->first.dim + 1, pr->second.dim + 1};
    } else if (std::holds_alternative<StiefelSpace>(s)) {
        sizes = {4};  // diagonal action on both frame vectors
    } else {
        sizes = {manifolds::ambient_dim(s)};
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const Mat& b = blocks[i];
        if (b.rows() != sizes[i] || b.cols() != sizes[i])
            throw std::invalid_argument(std::string(what) + ": bad block shape");
        const Mat err = b.transpose() * b - Mat::Identity(b.rows(), b.cols());
        if (err.cwiseAbs().maxCoeff() > 1e-9)
            throw std::invalid_argument(std::string(what) + ": block not orthogonal");
    }
}

inline Vec apply_blocks(const std::vector<Mat>& blocks, const Space& s, Vec p) {
    if (blocks.empty()) return p;
    if (const auto* pr = std::get_if<ProductSpace>(&s)) {
        const int a1 = pr->first.dim + 1;
        Vec out(p.size());
        out.head(a1) = blocks[0] * p.head(a1);
        out.tail(p.size() - a1) = blocks[1] * p.tail(p.size() - a1);
        return out;
    }
    if (std::holds_alternative<StiefelSpace>(s)) {
        Vec out(8);
        out.head(4) = blocks[0] * p.head(4);
        out.tail(4) = blocks[0] * p.tail(4);
        return out;
    }
    return blocks[0] * p;
}

}  // namespace detail

inline MapDescriptor isometry_conjugate(MapDescriptor m, std::vector<Mat> dom_blocks,
                                        std::vector<Mat> cod_blocks) {
    detail::check_blocks(domain(m), dom_blocks, "isometry_conjugate domain");
    detail::check_blocks(codomain(m), cod_blocks, "isometry_conjugate codomain");
    return {IsometryConjugateFamily{std::make_shared<MapDescriptor>(std::move(m)),
                                    std::move(dom_blocks), std::move(cod_blocks)}};
}

inline MapDescriptor bump_perturb(MapDescriptor m, Vec center, double amplitude,
                                  double width) {
    const Space dom_space = domain(m);
    const Space cod_space = codomain(m);
    const auto* dom = std::get_if<SphereSpace>(&dom_space);
    const auto* cod = std::get_if<SphereSpace>(&cod_space);
    if (dom == nullptr || cod == nullptr)
        throw std::invalid_argument("bump_perturb: needs sphere domain and codomain");
    if (width <= 0.0) throw std::invalid_argument("bump_perturb: width must be positive");
    if (center.size() != dom->dim + 1 ||
        std::abs(center.norm() - dom->radius) > 1e-9)
        throw std::invalid_argument("bump_perturb: center not on the domain sphere");
    return {BumpPerturbFamily{std::make_shared<MapDescriptor>(std::move(m)),
                              std::move(center), amplitude, width}};
}

inline MapDescriptor identity_map(SphereSpace s) { return {IdentityFamily{s}}; }

inline MapDescriptor constant_map(SphereSpace dom, SphereSpace cod, Vec value) {
    if (value.size() != cod.dim + 1 || std::abs(value.norm() - cod.radius) > 1e-9)
        throw std::invalid_argument("constant_map: value not on the codomain sphere");
    return {ConstantFamily{dom, cod, std::move(value)}};
}

inline MapDescriptor longitude_reparam(std::vector<double> xs, std::vector<double> ys,
                                       int n) {
    if (xs.size() != ys.size() || xs.size() < 2 || xs.front() != 0.0 ||
        xs.back() != 1.0 || ys.front() != 0.0 || ys.back() != 1.0)
        throw std::invalid_argument("longitude_reparam: bad profile data");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (xs[i] <= xs[i - 1] || ys[i] <= ys[i - 1])
            throw std::invalid_argument("longitude_reparam: profile must increase");
    return {LongitudeReparamFamily{std::move(xs), std::move(ys), n}};
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct RenormalizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline double piecewise_linear(const std::vector<double>& xs,
                               const std::vector<double>& ys, double t) {
    if (t <= xs.front()) return ys.front();
    if (t >= xs.back()) return ys.back();
    std::size_t hi = 1;
    while (xs[hi] < t) ++hi;
    const double w = (t - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
    return ys[hi - 1] + w * (ys[hi] - ys[hi - 1]);
}

inline Vec eval_impl(const MapDescriptor& m, const Vec& x);

inline Vec eval_hopf1(double x0, double x1, double x2, double x3) {
    Vec out(3);
    out << x0 * x2 + x1 * x3, x1 * x2 - x0 * x3,
        0.5 * (x0 * x0 + x1 * x1 - x2 * x2 - x3 * x3);
    return out;
}

inline Vec eval_impl(const MapDescriptor& m, const Vec& x) {
    return std::visit(
        [&](const auto& f) -> Vec {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, HopfComplexFamily>) {
                if (f.n == 1) return eval_hopf1(x[0], x[1], x[2], x[3]);
                return x;
            } else if constexpr (std::is_same_v<T, HopfQuaternionicFamily>) {
                return x;
            } else if constexpr (std::is_same_v<T, HopfOctonionicFamily>) {
                algebra::Octonion u, v;
                for (int i = 0; i < 8; ++i) {
                    u.c[i] = x[i];
                    v.c[i] = x[8 + i];
                }
                const algebra::Octonion w = algebra::oct_mul(u, v.conjugate());
                Vec out(9);
                out[0] = 0.5 * (u.norm_sq() - v.norm_sq());
                for (int i = 0; i < 8; ++i) out[1 + i] = w.c[i];
                return out;
            } else if constexpr (std::is_same_v<T, DiagonalInclusionFamily>) {
                const double s = 1.0 / std::sqrt(2.0);
                Vec out(2 * (f.n + 1));
                out.head(f.n + 1) = x * s;
                out.tail(f.n + 1) = x * s;
                return out;
            } else if constexpr (std::is_same_v<T, HopfVectorFieldFamily>) {
                Vec out(2 * x.size());
                out.head(x.size()) = x;
                out.tail(x.size()) = f.structure * x;
                return out;
            } else if constexpr (std::is_same_v<T, StiefelPlueckerFamily>) {
                const Vec a = x.head(4), b = x.tail(4);
                const double p01 = a[0] * b[1] - a[1] * b[0];
                const double p02 = a[0] * b[2] - a[2] * b[0];
                const double p03 = a[0] * b[3] - a[3] * b[0];
                const double p12 = a[1] * b[2] - a[2] * b[1];
                const double p13 = a[1] * b[3] - a[3] * b[1];
                const double p23 = a[2] * b[3] - a[3] * b[2];
                const double s = 1.0 / std::sqrt(2.0);
                Vec out(6);
                out << s * (p01 + p23), s * (p02 - p13), s * (p03 + p12),
                    s * (p01 - p23), s * (p02 + p13), s * (p03 - p12);
                const double n = out.norm();
                return out / n;
            } else if constexpr (std::is_same_v<T, StiefelQuatFamily>) {
                const algebra::Quaternion qx{x[0], x[1], x[2], x[3]};
                const algebra::Quaternion qy{x[4], x[5], x[6], x[7]};
                const algebra::Quaternion q1 = qy * qx.conjugate();
                const algebra::Quaternion q2 = qx.conjugate() * qy;
                Vec out(6);
                out << q1.x, q1.y, q1.z, q2.x, q2.y, q2.z;
                return out;
            } else if constexpr (std::is_same_v<T, PowerPrecomposeFamily>) {
                const std::complex<double> z1{x[0], x[1]};
                std::complex<double> z2{x[2], x[3]};
                const int k = f.d >= 0 ? f.d : -f.d;
                if (f.d < 0) z2 = std::conj(z2);
                std::complex<double> w2{1.0, 0.0};
                for (int i = 0; i < k; ++i) w2 *= z2;
                const double n =
                    std::sqrt(std::norm(z1) + std::norm(w2));
                return eval_hopf1(z1.real() / n, z1.imag() / n, w2.real() / n,
                                  w2.imag() / n);
            } else if constexpr (std::is_same_v<T, SuspensionFamily>) {
                const auto dom = std::get<SphereSpace>(domain(m));
                const Vec u = x / dom.radius;
                const double s = clamp_unit(u[u.size() - 1]);
                const double c = std::sqrt(std::max(0.0, 1.0 - s * s));
                const Space cod_inner = codomain(*f.inner);
                auto pole_factor = [&](const SphereSpace& sp) {
                    Vec out = Vec::Zero(sp.dim + 2);
                    out[sp.dim + 1] = s * sp.radius;
                    return out;
                };
                auto lift_factor = [&](const SphereSpace& sp, const Vec& phi) {
                    Vec out(sp.dim + 2);
                    out.head(sp.dim + 1) = phi * c;
                    out[sp.dim + 1] = s * sp.radius;
                    return out;
                };
                if (const auto* cs = std::get_if<SphereSpace>(&cod_inner)) {
                    if (c < 1e-14) return pole_factor(*cs);
                    Vec xi(u.size() - 1);
                    xi = u.head(u.size() - 1) * (dom.radius / c);
                    const Vec phi = eval_impl(*f.inner, xi);
                    return lift_factor(*cs, phi);
                }
                const auto pr = std::get<ProductSpace>(cod_inner);
                const int a1 = pr.first.dim + 1;
                Vec out(a1 + pr.second.dim + 1 + 2);
                if (c < 1e-14) {
                    out << pole_factor(pr.first), pole_factor(pr.second);
                    return out;
                }
                Vec xi(u.size() - 1);
                xi = u.head(u.size() - 1) * (dom.radius / c);
                const Vec phi = eval_impl(*f.inner, xi);
                out << lift_factor(pr.first, phi.head(a1)),
                    lift_factor(pr.second, phi.tail(phi.size() - a1));
                return out;
            } else if constexpr (std::is_same_v<T, IsometryConjugateFamily>) {
                const Vec xd = apply_blocks(f.dom_blocks, domain(*f.inner), x);
                const Vec y = eval_impl(*f.inner, xd);
                return apply_blocks(f.cod_blocks, codomain(*f.inner), y);
            } else if constexpr (std::is_same_v<T, BumpPerturbFamily>) {
                const Vec base = eval_impl(*f.inner, x);
                const auto dom = std::get<SphereSpace>(domain(*f.inner));
                const auto cod = std::get<SphereSpace>(codomain(*f.inner));
                const double angle =
                    manifolds::sphere_distance({x, dom.radius}, {f.center, dom.radius}) /
                    dom.radius;
                double b = 0.0;
                if (angle < f.width)
                    b = 0.5 * (1.0 + std::cos(kPi * angle / f.width));
                const Vec qhat = base / cod.radius;
                Vec axis = Vec::Zero(base.size());
                axis[0] = 1.0;
                const Vec tangent = axis - axis.dot(qhat) * qhat;
                const Vec raw = base + f.amplitude * b * tangent;
                const double n = raw.norm();
                if (n < 0.5 * cod.radius)
                    throw RenormalizationError("bump_perturb: amplitude too large");
                return raw * (cod.radius / n);
            } else if constexpr (std::is_same_v<T, IdentityFamily>) {
                return x;
            } else if constexpr (std::is_same_v<T, ConstantFamily>) {
                return f.value;
            } else {
                const int n = f.n;
                const double ct = clamp_unit(x[n]);
                const double st = x.head(n).norm();
                const double theta = std::atan2(st, ct);
                const double tp = piecewise_linear(f.xs, f.ys, theta / kPi);
                const double thetap = kPi * tp;
                Vec out(n + 1);
                if (st < 1e-14) {
                    out = x;  // poles are fixed points of the profile
                    return out;
                }
                out.head(n) = x.head(n) * (std::sin(thetap) / st);
                out[n] = std::cos(thetap);
                return out;
            }
        },
        m.family);
}

}  // namespace detail

/// Evaluate the map at x. The point is checked against the domain (1e-9).
inline Vec evaluate(const MapDescriptor& m, const Vec& x) {
    if (!manifolds::space_contains(domain(m), x, 1e-9))
        throw DomainError("evaluate: point not in the declared domain");
    return detail::eval_impl(m, x);
}

// ---------------------------------------------------------------------------
// Finite-difference differential in tangent frames
// ---------------------------------------------------------------------------

struct Differential {
    Mat jac;             // codomain-frame rows x domain-frame columns
    Mat dom_frame;       // ambient x intrinsic
    Mat cod_frame;       // ambient x intrinsic
    double richardson_gap = 0.0;
};

namespace detail {

inline Mat jacobian_at_step(const MapDescriptor& m, const Vec& x, const Space& dom,
                            const Mat& dom_frame, const Mat& cod_frame, double h) {
    Mat jac(cod_frame.cols(), dom_frame.cols());
    for (int i = 0; i < dom_frame.cols(); ++i) {
        const Vec xp = manifolds::space_retract(dom, x + h * dom_frame.col(i));
        const Vec xm = manifolds::space_retract(dom, x - h * dom_frame.col(i));
        const Vec w = (eval_impl(m, xp) - eval_impl(m, xm)) / (2.0 * h);
        jac.col(i) = cod_frame.transpose() * w;
    }
    return jac;
}

}  // namespace detail

/// Central differences along a tangent frame at x, projected to a tangent
/// frame at f(x). The step is repeated at h/2 as a consistency check; the
/// h/2 Jacobian is returned together with the disagreement.
inline Differential differential(const MapDescriptor& m, const Vec& x,
                                 double h = 1e-5) {
    if (h < 1e-7 || h > 1e-3)
        throw std::invalid_argument("differential: h must lie in [1e-7, 1e-3]");
    const Space dom = domain(m);
    const Space cod = codomain(m);
    if (!manifolds::space_contains(dom, x, 1e-9))
        throw DomainError("differential: point not in the declared domain");
    const Mat dom_frame = manifolds::space_tangent_frame(dom, x);
    const Vec y = detail::eval_impl(m, x);
    const Mat cod_frame = manifolds::space_tangent_frame(cod, y);
    const Mat coarse = detail::jacobian_at_step(m, x, dom, dom_frame, cod_frame, h);
    const Mat fine = detail::jacobian_at_step(m, x, dom, dom_frame, cod_frame, 0.5 * h);
    return {fine, dom_frame, cod_frame, (coarse - fine).cwiseAbs().maxCoeff()};
}

/// Singular values of the pushforward, listed per domain tangent direction
/// (padded with zeros when the codomain has lower dimension).
inline Vec singular_values(const MapDescriptor& m, const Vec& x, double h = 1e-5) {
    const Differential d = differential(m, x, h);
    const Vec sv = d.jac.jacobiSvd().singularValues();
    Vec out = Vec::Zero(d.jac.cols());
    out.head(sv.size()) = sv;
    return out;
}

inline std::string map_name(const MapDescriptor& m) {
    return std::visit(
        [](const auto& f) -> std::string {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, HopfComplexFamily>)
                return "hopf-complex(" + std::to_string(f.n) + ")";
            else if constexpr (std::is_same_v<T, HopfQuaternionicFamily>)
                return "hopf-quaternionic(" + std::to_string(f.n) + ")";
            else if constexpr (std::is_same_v<T, HopfOctonionicFamily>)
                return "hopf-octonionic";
            else if constexpr (std::is_same_v<T, DiagonalInclusionFamily>)
                return "diagonal-inclusion(" + std::to_string(f.n) + ")";
            else if constexpr (std::is_same_v<T, HopfVectorFieldFamily>)
                return "hopf-vector-field(dim " +
                       std::to_string(f.structure.rows()) + ")";
            else if constexpr (std::is_same_v<T, StiefelPlueckerFamily>)
                return "stiefel-pluecker";
            else if constexpr (std::is_same_v<T, StiefelQuatFamily>)
                return "stiefel-quat";
            else if constexpr (std::is_same_v<T, PowerPrecomposeFamily>)
                return "power(" + std::to_string(f.d) + ")";
            else if constexpr (std::is_same_v<T, SuspensionFamily>)
                return "suspend(" + map_name(*f.inner) + ")";
            else if constexpr (std::is_same_v<T, IsometryConjugateFamily>)
                return "isometry-conjugate(" + map_name(*f.inner) + ")";
            else if constexpr (std::is_same_v<T, BumpPerturbFamily>)
                return "bump(" + map_name(*f.inner) + ", amp " +
                       std::to_string(f.amplitude) + ")";
            else if constexpr (std::is_same_v<T, IdentityFamily>)
                return "identity(S^" + std::to_string(f.sphere.dim) + ")";
            else if constexpr (std::is_same_v<T, ConstantFamily>)
                return "constant";
            else
                return "longitude-reparam(S^" + std::to_string(f.n) + ")";
        },
        m.family);
}

}  // namespace hopftk::maps
