#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>

#include "hopftk/core.hpp"

namespace hopftk::algebra {

// ---------------------------------------------------------------------------
// Quaternions
// ---------------------------------------------------------------------------

struct Quaternion {
    double w = 0.0, x = 0.0, y = 0.0, z = 0.0;

    constexpr Quaternion() = default;
    constexpr Quaternion(double w_, double x_, double y_, double z_)
        : w(w_), x(x_), y(y_), z(z_) {}

    static constexpr Quaternion identity() { return {1.0, 0.0, 0.0, 0.0}; }

    constexpr Quaternion conjugate() const { return {w, -x, -y, -z}; }

    constexpr double norm_sq() const { return w * w + x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm_sq()); }

    constexpr double real() const { return w; }

    Quaternion normalized() const {
        const double n = norm();
        return {w / n, x / n, y / n, z / n};
    }

    Quaternion inverse() const {
        const double n2 = norm_sq();
        if (n2 == 0.0) throw std::domain_error("inverse of zero quaternion");
        return {w / n2, -x / n2, -y / n2, -z / n2};
    }

    constexpr Quaternion operator+(const Quaternion& o) const {
        return {w + o.w, x + o.x, y + o.y, z + o.z};
    }
    constexpr Quaternion operator-(const Quaternion& o) const {
        return {w - o.w, x - o.x, y - o.y, z - o.z};
    }
    constexpr Quaternion operator-() const { return {-w, -x, -y, -z}; }
    constexpr Quaternion operator*(double s) const {
        return {w * s, x * s, y * s, z * s};
    }

    // Hamilton product
    constexpr Quaternion operator*(const Quaternion& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z,
                w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w};
    }
};

inline constexpr Quaternion quat_mul(const Quaternion& a, const Quaternion& b) {
    return a * b;
}

inline constexpr double quat_dot(const Quaternion& a, const Quaternion& b) {
    return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Quaternion quat_from_vec(const Eigen::Vector4d& v) {
    return {v[0], v[1], v[2], v[3]};
}

inline Eigen::Vector4d quat_to_vec(const Quaternion& q) {
    return {q.w, q.x, q.y, q.z};
}

inline std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
    return os << "(" << q.w << ", " << q.x << ", " << q.y << ", " << q.z << ")";
}

// ---------------------------------------------------------------------------
// Octonions (Cayley-Dickson doubling of the Hamilton quaternions)
// ---------------------------------------------------------------------------

struct Octonion {
    std::array<double, 8> c = {};

    Octonion() = default;
    explicit Octonion(const std::array<double, 8>& comps) : c(comps) {}
    Octonion(const Quaternion& a, const Quaternion& b)
        : c{a.w, a.x, a.y, a.z, b.w, b.x, b.y, b.z} {}

    static Octonion identity() {
        Octonion o;
        o.c[0] = 1.0;
        return o;
    }

    /// Basis element e_i, i in 0..7 (e_0 = 1).
    static Octonion basis(int i) {
        Octonion o;
        o.c.at(static_cast<std::size_t>(i)) = 1.0;
        return o;
    }

    Quaternion first() const { return {c[0], c[1], c[2], c[3]}; }
    Quaternion second() const { return {c[4], c[5], c[6], c[7]}; }

    Octonion conjugate() const {
        Octonion o = *this;
        for (int i = 1; i < 8; ++i) o.c[i] = -o.c[i];
        return o;
    }

    double norm_sq() const {
        double s = 0.0;
        for (double v : c) s += v * v;
        return s;
    }
    double norm() const { return std::sqrt(norm_sq()); }

    Octonion operator+(const Octonion& o) const {
        Octonion r;
        for (int i = 0; i < 8; ++i) r.c[i] = c[i] + o.c[i];
        return r;
    }
    Octonion operator-(const Octonion& o) const {
        Octonion r;
        for (int i = 0; i < 8; ++i) r.c[i] = c[i] - o.c[i];
        return r;
    }
    Octonion operator*(double s) const {
        Octonion r;
        for (int i = 0; i < 8; ++i) r.c[i] = c[i] * s;
        return r;
    }
};

/// Cayley-Dickson product: (a, b)(c, d) = (ac - d*b, da + bc*),
/// with * the quaternion conjugate.
inline Octonion oct_mul(const Octonion& p, const Octonion& q) {
    const Quaternion a = p.first(), b = p.second();
    const Quaternion c = q.first(), d = q.second();
    return {a * c - d.conjugate() * b, d * a + b * c.conjugate()};
}

inline Octonion operator*(const Octonion& a, const Octonion& b) {
    return oct_mul(a, b);
}

/// Basis multiplication table. Entry (i, j) encodes e_i * e_j = s * e_k
/// as the signed 1-based index s * (k + 1).
inline std::array<std::array<int, 8>, 8> octonion_table() {
    std::array<std::array<int, 8>, 8> table{};
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            const Octonion p = oct_mul(Octonion::basis(i), Octonion::basis(j));
            int k = -1;
            for (int m = 0; m < 8; ++m) {
                if (std::abs(p.c[m]) > 0.5) {
                    k = m;
                    break;
                }
            }
            table[i][j] = (p.c[k] > 0.0 ? 1 : -1) * (k + 1);
        }
    }
    return table;
}

/// Write the 8x8 signed-index table as CSV (golden-file format).
inline void write_octonion_table(std::ostream& os) {
    const auto table = octonion_table();
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            os << table[i][j] << (j + 1 < 8 ? "," : "\n");
        }
    }
}

// ---------------------------------------------------------------------------
// Orthogonal complex structures J in SO(2m) with J^2 = -I
// ---------------------------------------------------------------------------

struct OrthogonalComplexStructure {
    Mat matrix;

    int dim() const { return static_cast<int>(matrix.rows()); }
};

/// Block-diagonal standard structure: J0 e_{2k} = e_{2k+1}, J0 e_{2k+1} = -e_{2k}.
inline OrthogonalComplexStructure standard_ocs(int dim) {
    if (dim < 2 || dim % 2 != 0)
        throw std::invalid_argument("orthogonal complex structure needs even dim >= 2");
    Mat j = Mat::Zero(dim, dim);
    for (int k = 0; k + 1 < dim; k += 2) {
        j(k + 1, k) = 1.0;
        j(k, k + 1) = -1.0;
    }
    return {j};
}

/// Seeded rotation: QR of a Gaussian matrix with the R-diagonal sign fix,
/// then determinant forced to +1.
inline Mat random_rotation(int dim, Rng& rng) {
    Mat g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = rng.gaussian();
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < dim; ++i)
        if (r(i, i) < 0.0) q.col(i) = -q.col(i);
    if (q.determinant() < 0.0) q.col(dim - 1) = -q.col(dim - 1);
    return q;
}

inline Mat random_rotation(int dim, std::uint64_t seed) {
    Rng rng(seed);
    return random_rotation(dim, rng);
}

/// R J0 R^T for a seeded rotation R.
inline OrthogonalComplexStructure random_ocs(int dim, std::uint64_t seed) {
    const OrthogonalComplexStructure j0 = standard_ocs(dim);
    const Mat r = random_rotation(dim, seed);
    return {r * j0.matrix * r.transpose()};
}

inline Vec apply_ocs(const OrthogonalComplexStructure& j, const Vec& x) {
    if (x.size() != j.dim())
        throw std::invalid_argument("apply_ocs: dimension mismatch");
    return j.matrix * x;
}

/// Invariant check: orthogonal, squares to -I, x . Jx = 0.
inline bool ocs_is_valid(const OrthogonalComplexStructure& j, double tol = 1e-12) {
    const int n = j.dim();
    if (n < 2 || n % 2 != 0) return false;
    const Mat id = Mat::Identity(n, n);
    if (((j.matrix.transpose() * j.matrix) - id).cwiseAbs().maxCoeff() > tol)
        return false;
    if (((j.matrix * j.matrix) + id).cwiseAbs().maxCoeff() > tol) return false;
    return true;
}

/// Orthonormal basis (u_1, J u_1, ..., u_m, J u_m) adapted to J,
/// grown deterministically from the ambient axes.
inline Mat adapted_basis(const OrthogonalComplexStructure& j) {
    const int n = j.dim();
    Mat basis(n, n);
    int have = 0;
    for (int axis = 0; axis < n && have < n; ++axis) {
        Vec u = Vec::Zero(n);
        u[axis] = 1.0;
        for (int k = 0; k < have; ++k) u -= basis.col(k).dot(u) * basis.col(k);
        if (u.norm() < 1e-6) continue;
        u.normalize();
        basis.col(have++) = u;
        Vec ju = j.matrix * u;
        for (int k = 0; k < have; ++k) ju -= basis.col(k).dot(ju) * basis.col(k);
        ju.normalize();
        basis.col(have++) = ju;
    }
    if (have != n) throw std::runtime_error("adapted_basis: construction failed");
    return basis;
}

/// Orthogonal g with g J = J' g, built by aligning adapted bases.
inline Mat conjugator_between(const OrthogonalComplexStructure& j,
                              const OrthogonalComplexStructure& jp) {
    if (j.dim() != jp.dim())
        throw std::invalid_argument("conjugator_between: dimension mismatch");
    const Mat a = adapted_basis(j);
    const Mat b = adapted_basis(jp);
    return b * a.transpose();
}

}  // namespace hopftk::algebra
