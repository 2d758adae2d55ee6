#include "hopftk/fibers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <sstream>

using namespace hopftk;
using namespace hopftk::fibers;

namespace {

manifolds::SpherePoint s2_point(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return manifolds::make_sphere_point(v, 0.5);
}

manifolds::SpherePoint random_base_point(Rng& rng) {
    return {rng.unit_vec(3) * 0.5, 0.5};
}

// Analytic parameterization of the fiber of hopf o g_d through a generic
// base point; independent oracle for the continuation tracer.
std::vector<Vector4d> power_fiber_oracle(int d, const Vec& y, int count) {
    const double u1 = 2.0 * y[0], u2 = 2.0 * y[1], u3 = 2.0 * y[2];
    const double anorm = std::sqrt((1.0 + u3) / 2.0);
    const std::complex<double> b{u1 / std::sqrt(2.0 * (1.0 + u3)),
                                 -u2 / std::sqrt(2.0 * (1.0 + u3))};
    const double bnorm = std::abs(b);
    const double beta = std::arg(b);
    const int k = std::abs(d);

    // t solves t^2 |a|^2 + (t |b|)^{2/k} = 1, increasing in t
    double lo = 0.0, hi = 2.0 / std::max(anorm, 1e-9);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double g = mid * mid * anorm * anorm +
                         std::pow(mid * bnorm, 2.0 / k);
        (g < 1.0 ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    const double rho = std::pow(t * bnorm, 1.0 / k);

    std::vector<Vector4d> pts;
    pts.reserve(count);
    for (int i = 0; i < count; ++i) {
        const double s = 2.0 * kPi * k * i / count;
        const std::complex<double> z1 = t * anorm * std::exp(std::complex<double>(0, s));
        std::complex<double> z2 =
            rho * std::exp(std::complex<double>(0, (s + beta) / k));
        if (d < 0) z2 = std::conj(z2);
        pts.push_back({z1.real(), z1.imag(), z2.real(), z2.imag()});
    }
    return pts;
}

double hausdorff_points(const std::vector<Vector4d>& a, const std::vector<Vector4d>& b) {
    auto directed = [](const std::vector<Vector4d>& s, const std::vector<Vector4d>& t) {
        double worst = 0.0;
        for (const auto& p : s) {
            double best = 1e300;
            for (const auto& q : t) best = std::min(best, (p - q).norm());
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

}  // namespace

TEST(TraceFiber, HopfNorthPoleFiberIsTheExplicitCircle) {
    const auto m = maps::hopf_complex(1);
    const auto curves = trace_fiber(m, s2_point(0, 0, 0.5));
    ASSERT_EQ(curves.size(), 1u);
    const auto& c = curves[0];
    EXPECT_TRUE(c.closed);
    EXPECT_LT(c.residual, 1e-8);
    // the fiber is {(e^{i theta}, 0)}: last two coordinates vanish
    for (const auto& p : c.points) {
        EXPECT_NEAR(p[2], 0.0, 1e-8);
        EXPECT_NEAR(p[3], 0.0, 1e-8);
        EXPECT_NEAR(p.norm(), 1.0, 1e-12);
    }
    EXPECT_LT(fit_great_circle(c).max_residual, 1e-9);

    // consecutive-gap and closure invariants
    const auto& pts = c.points;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        EXPECT_LT((pts[i + 1] - pts[i]).norm(), 2.0 * c.step);
    EXPECT_LT((pts.front() - pts.back()).norm(), c.step);
}

TEST(TraceFiber, SingleComponentAndGreatCirclesForRandomValues) {
    const auto m = maps::hopf_complex(1);
    Rng rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        const auto y = random_base_point(rng);
        const auto curves = trace_fiber(m, y);
        ASSERT_EQ(curves.size(), 1u);
        EXPECT_LT(curves[0].residual, 1e-8);
        EXPECT_LT(fit_great_circle(curves[0]).max_residual, 1e-8);
    }
}

TEST(TraceFiber, PowerTwoFiberMatchesAnalyticOracle) {
    const auto m = maps::power_precompose(maps::hopf_complex(1), 2);
    Vec y(3);
    y << 0.15, 0.1, std::sqrt(0.25 - 0.15 * 0.15 - 0.1 * 0.1);
    const auto curves = trace_fiber(m, manifolds::make_sphere_point(y, 0.5));
    ASSERT_EQ(curves.size(), 1u);
    const auto& c = curves[0];
    EXPECT_TRUE(c.closed);

    const auto oracle = power_fiber_oracle(2, y, 4000);
    EXPECT_LT(hausdorff_points(c.points, oracle), 2.0 * c.step);

    // winding in the two complex coordinates: the z1 phase advances d times,
    // the z2 phase once, per the analytic parameterization
    double w1 = 0.0, w2 = 0.0;
    const auto& pts = c.points;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        const auto& q = pts[(i + 1) % pts.size()];
        w1 += std::arg(std::complex<double>(q[0], q[1]) /
                       std::complex<double>(p[0], p[1]));
        w2 += std::arg(std::complex<double>(q[2], q[3]) /
                       std::complex<double>(p[2], p[3]));
    }
    EXPECT_NEAR(std::abs(w1) / (2.0 * kPi), 2.0, 1e-6);
    EXPECT_NEAR(std::abs(w2) / (2.0 * kPi), 1.0, 1e-6);
}

TEST(TraceFiber, NegativePowerFiberMatchesAnalyticOracle) {
    const auto m = maps::power_precompose(maps::hopf_complex(1), -2);
    Vec y(3);
    y << -0.2, 0.05, -std::sqrt(0.25 - 0.2 * 0.2 - 0.05 * 0.05);
    const auto curves = trace_fiber(m, manifolds::make_sphere_point(y, 0.5));
    ASSERT_EQ(curves.size(), 1u);
    const auto oracle = power_fiber_oracle(-2, y, 4000);
    EXPECT_LT(hausdorff_points(curves[0].points, oracle), 2.0 * curves[0].step);
}

TEST(TraceFiber, PowerZeroMissedValueHasNoPreimage) {
    const auto m = maps::power_precompose(maps::hopf_complex(1), 0);
    try {
        trace_fiber(m, s2_point(0, 0, 0.5));
        FAIL() << "expected NoPreimage";
    } catch (const TraceError& e) {
        EXPECT_EQ(e.kind, TraceErrorKind::NoPreimage);
    }
}

TEST(TraceFiber, RotationEquivariance) {
    const auto m = maps::hopf_complex(1);
    Rng rng(7);
    const auto y = random_base_point(rng);
    const auto base = trace_fiber(m, y);
    ASSERT_EQ(base.size(), 1u);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const Mat r = algebra::random_rotation(4, seed);
        const auto conj = maps::isometry_conjugate(m, {r.transpose()}, {});
        const auto rotated = trace_fiber(conj, y);
        ASSERT_EQ(rotated.size(), 1u);
        std::vector<Vector4d> mapped;
        for (const auto& p : base[0].points) {
            const Vec q = r * Vec(p);
            mapped.push_back({q[0], q[1], q[2], q[3]});
        }
        EXPECT_LT(hausdorff_points(rotated[0].points, mapped),
                  2.0 * base[0].step);
    }
}

TEST(OrientFiber, CanonicalizesPointOrder) {
    const auto m = maps::hopf_complex(1);
    Rng rng(9);
    const auto y = random_base_point(rng);
    auto curves = trace_fiber(m, y);
    ASSERT_EQ(curves.size(), 1u);

    const FiberCurve oriented = orient_fiber(m, curves[0]);
    FiberCurve reversed = curves[0];
    std::reverse(reversed.points.begin(), reversed.points.end());
    const FiberCurve oriented2 = orient_fiber(m, reversed);

    // same traversal direction regardless of the input order
    ASSERT_EQ(oriented.points.size(), oriented2.points.size());
    const Vector4d t1 =
        (oriented.points[1] - oriented.points[0]).normalized();
    double best = 1e300;
    std::size_t match = 0;
    for (std::size_t i = 0; i < oriented2.points.size(); ++i) {
        const double d = (oriented2.points[i] - oriented.points[0]).norm();
        if (d < best) {
            best = d;
            match = i;
        }
    }
    const Vector4d t2 = (oriented2.points[(match + 1) % oriented2.points.size()] -
                         oriented2.points[match])
                            .normalized();
    EXPECT_GT(t1.dot(t2), 0.9);
    EXPECT_EQ(oriented.orientation, +1);
    EXPECT_EQ(oriented2.orientation, +1);
}

TEST(OrientFiber, RotationTransportsOrientation) {
    const auto m = maps::hopf_complex(1);
    Rng rng(11);
    const auto y = random_base_point(rng);
    const auto base = orient_fiber(m, trace_fiber(m, y)[0]);
    for (std::uint64_t seed = 21; seed < 31; ++seed) {
        const Mat r = algebra::random_rotation(4, seed);
        const auto conj = maps::isometry_conjugate(m, {r.transpose()}, {});
        const auto rotated = orient_fiber(conj, trace_fiber(conj, y)[0]);

        // transport the base tangent by r and compare at the nearest point
        const Vector4d p0 = base.points[0];
        const Vector4d t0 = (base.points[1] - base.points[0]).normalized();
        const Vec rp = r * Vec(p0);
        const Vec rt = r * Vec(t0);
        double bestd = 1e300;
        std::size_t match = 0;
        for (std::size_t i = 0; i < rotated.points.size(); ++i) {
            const double d = (rotated.points[i] - Vector4d(rp[0], rp[1], rp[2], rp[3]))
                                 .norm();
            if (d < bestd) {
                bestd = d;
                match = i;
            }
        }
        const Vector4d tr =
            (rotated.points[(match + 1) % rotated.points.size()] -
             rotated.points[match])
                .normalized();
        EXPECT_GT(tr.dot(Vector4d(rt[0], rt[1], rt[2], rt[3])), 0.9);
    }
}

TEST(FitGreatCircle, SmallCircleResidualMatchesBruteForce) {
    // circle of radius 0.9 at height sqrt(1 - 0.81)
    const double h = std::sqrt(1.0 - 0.81);
    std::vector<Vector4d> pts;
    for (int i = 0; i < 256; ++i) {
        const double t = 2.0 * kPi * i / 256;
        pts.push_back({0.9 * std::cos(t), 0.9 * std::sin(t), h, 0.0});
    }
    const auto fit = fit_great_circle(pts);
    EXPECT_NEAR(fit.max_residual, h, 1e-9);  // analytic optimum 0.43589...
    EXPECT_NEAR(fit.max_residual, 0.436, 1e-3);

    // brute force over random 2-planes never beats the fitted one
    Rng rng(13);
    double brute = 1e300;
    for (int trial = 0; trial < 20000; ++trial) {
        Mat g(4, 2);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 2; ++j) g(i, j) = rng.gaussian();
        const Eigen::HouseholderQR<Mat> qr(g);
        Mat q = qr.householderQ();
        const Mat plane = q.leftCols(2);
        double worst = 0.0;
        for (const auto& p : pts) {
            const Vec c = plane.transpose() * Vec(p);
            worst = std::max(worst, (Vec(p) - plane * c).norm());
        }
        brute = std::min(brute, worst);
    }
    EXPECT_GE(brute, fit.max_residual - 1e-9);
}

TEST(FitGreatCircle, DegenerateCloudThrows) {
    std::vector<Vector4d> pts(8, Vector4d(1, 0, 0, 0));
    EXPECT_THROW(fit_great_circle(pts), DegenerateCloud);
    std::vector<Vector4d> few(5, Vector4d(1, 0, 0, 0));
    EXPECT_THROW(fit_great_circle(few), std::invalid_argument);
}

TEST(FiberDistance, ParallelHopfFibersSitAtTheBaseDistance) {
    const auto m = maps::hopf_complex(1);
    Rng rng(15);
    const auto y = random_base_point(rng);
    const auto z = random_base_point(rng);
    const double alpha = manifolds::sphere_distance(y, z);
    const auto k1 = trace_fiber(m, y)[0];
    const auto k2 = trace_fiber(m, z)[0];
    const auto stats = fiber_distance_stats(k1, k2);
    EXPECT_LT(stats.max - stats.min, 1e-6);
    EXPECT_NEAR(stats.min, alpha, 1e-6);

    const auto self = fiber_distance_stats(k1, k1);
    EXPECT_NEAR(self.min, 0.0, 1e-12);
    EXPECT_NEAR(self.max, 0.0, 1e-9);
}

TEST(FiberDistance, AntipodalFibersAreOrthogonal) {
    const auto m = maps::hopf_complex(1);
    Rng rng(17);
    const auto y = random_base_point(rng);
    const manifolds::SpherePoint ybar{-y.coords, 0.5};
    const auto k1 = trace_fiber(m, y)[0];
    const auto k2 = trace_fiber(m, ybar)[0];
    const auto stats = fiber_distance_stats(k1, k2);
    EXPECT_NEAR(stats.min, kPi / 2.0, 1e-6);
    EXPECT_NEAR(stats.max, kPi / 2.0, 1e-6);
}

TEST(FiberDistance, TorusMembership) {
    // K over y, K' over -y, K'' over z at distance alpha from y: every K''
    // sample sits at distance alpha from K and pi/2 - alpha from K'.
    const auto m = maps::hopf_complex(1);
    Rng rng(19);
    const auto y = random_base_point(rng);
    const manifolds::SpherePoint ybar{-y.coords, 0.5};
    const auto z = random_base_point(rng);
    const double alpha = manifolds::sphere_distance(y, z);
    const auto k = trace_fiber(m, y)[0];
    const auto kp = trace_fiber(m, ybar)[0];
    const auto kpp = trace_fiber(m, z)[0];
    for (const auto& s : kpp.points) {
        EXPECT_NEAR(detail::min_distance_to_curve(s, k), alpha, 1e-6);
        EXPECT_NEAR(detail::min_distance_to_curve(s, kp), kPi / 2.0 - alpha, 1e-6);
    }
}

TEST(FiberCsv, RoundTrip) {
    const auto m = maps::hopf_complex(1);
    const auto c = trace_fiber(m, s2_point(0, 0, 0.5))[0];
    std::stringstream ss;
    write_fiber_csv(ss, c);
    const FiberCurve back = read_fiber_csv(ss);
    ASSERT_EQ(back.points.size(), c.points.size());
    EXPECT_EQ(back.closed, c.closed);
    EXPECT_EQ(back.orientation, c.orientation);
    for (std::size_t i = 0; i < c.points.size(); ++i)
        EXPECT_EQ((back.points[i] - c.points[i]).norm(), 0.0);
}
