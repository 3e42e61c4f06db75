#include <gtest/gtest.h>

#include <random>

#include "orisurf/kinematics.hpp"

namespace orisurf {
namespace {

// Leg closure written directly in theta:
//   r*k - r0/2 + l*k*cos(theta) + l*cos(psi/2)*sin(theta) = 0
// solved by scanning for the first sign change and bisecting.
double closure(const PlatePose& p, const CanfieldGeometry& g, int leg, double theta)
{
    const double k = std::sin(0.5 * p.psi) * std::cos(p.delta - g.leg_azimuths[leg]);
    const double r0 = p.height / std::cos(0.5 * p.psi);
    return g.joint_circle_radius * k - 0.5 * r0 + g.link_length * k * std::cos(theta)
         + g.link_length * std::cos(0.5 * p.psi) * std::sin(theta);
}

std::optional<double> bisection_oracle(const PlatePose& p, const CanfieldGeometry& g, int leg)
{
    const int n = 4000;
    double lo = g.theta_min;
    double f_lo = closure(p, g, leg, lo);
    if (f_lo == 0.0)
        return lo;
    for (int i = 1; i <= n; ++i) {
        const double hi = g.theta_min + (g.theta_max - g.theta_min) * i / n;
        const double f_hi = closure(p, g, leg, hi);
        if ((f_lo < 0.0) != (f_hi < 0.0) || f_hi == 0.0) {
            double a = lo, b = hi;
            for (int it = 0; it < 200; ++it) {
                const double m = 0.5 * (a + b);
                if ((closure(p, g, leg, m) < 0.0) == (f_lo < 0.0))
                    a = m;
                else
                    b = m;
            }
            return 0.5 * (a + b);
        }
        lo = hi;
        f_lo = f_hi;
    }
    return std::nullopt;
}

struct FrozenCase {
    PlatePose pose;
    std::array<double, 3> theta;
};

// Values produced by the bisection oracle above (30-digit arithmetic) and frozen.
const FrozenCase kFrozen[] = {
    {{0.3, 0.2, 0.035}, {0.45391279264070715, 0.6708105561558124, 0.76416072626342823}},
    {{0.0, 0.0, 0.03}, {0.52359877559829885, 0.52359877559829885, 0.52359877559829885}},
    {{1.0, 0.5, 0.04}, {0.52073419585484452, 0.56108744587339061, 1.2745075226055312}},
    {{2.0, 0.35, 0.025}, {0.57178523884934044, 0.13717419028601969, 0.62119782769386768}},
};

TEST(InverseKinematics, MatchesFrozenOracleValues)
{
    const CanfieldGeometry g;
    for (const auto& c : kFrozen) {
        const IkResult ik = inverse_kinematics(c.pose, g);
        ASSERT_TRUE(ik.ok());
        for (int i = 0; i < 3; ++i) {
            EXPECT_NEAR(ik.angles.theta[i], c.theta[i], 1e-12);
            const auto oracle = bisection_oracle(c.pose, g, i);
            ASSERT_TRUE(oracle.has_value());
            EXPECT_NEAR(*oracle, c.theta[i], 1e-12);
        }
    }
}

TEST(InverseKinematics, LevelPoseAtHalfReach)
{
    // H = 0.03 with l = 0.03: sin(theta) = H / 2l = 1/2.
    const IkResult ik = inverse_kinematics({0.0, 0.0, 0.03}, CanfieldGeometry{});
    ASSERT_TRUE(ik.ok());
    for (double t : ik.angles.theta)
        EXPECT_NEAR(t, kPi / 6.0, 1e-12);
}

TEST(InverseKinematics, FullExtensionAndBeyond)
{
    const CanfieldGeometry g;
    const IkResult full = inverse_kinematics({0.0, 0.0, 2.0 * g.link_length}, g);
    ASSERT_TRUE(full.ok());
    for (double t : full.angles.theta)
        EXPECT_NEAR(t, kPi / 2.0, 1e-6);
    EXPECT_FALSE(inverse_kinematics({0.0, 0.0, 0.07}, g).ok());
    EXPECT_FALSE(inverse_kinematics({0.0, 0.0, -0.01}, g).ok());
}

TEST(InverseKinematics, SymmetricClosedForm)
{
    const CanfieldGeometry g;
    for (double theta = 0.05; theta <= kPi / 2.0 - 0.05; theta += 0.01) {
        const double h = 2.0 * g.link_length * std::sin(theta);
        const IkResult ik = inverse_kinematics({0.0, 0.0, h}, g);
        ASSERT_TRUE(ik.ok());
        for (double t : ik.angles.theta)
            EXPECT_NEAR(t, theta, 1e-12);
    }
}

TEST(InverseKinematics, RandomPosesSatisfyLegQuadratic)
{
    const CanfieldGeometry g;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(0.0, kTwoPi), p(0.0, 0.79), h(0.005, 0.06);
    int feasible = 0;
    while (feasible < 1000) {
        const PlatePose pose{d(rng), p(rng), h(rng)};
        const IkResult ik = inverse_kinematics(pose, g);
        if (!ik.ok())
            continue;
        ++feasible;
        const auto quads = leg_quadratics(pose, g);
        for (int i = 0; i < 3; ++i) {
            const double t = std::tan(0.5 * ik.angles.theta[i]);
            const auto& q = quads[i];
            const double scale = std::abs(q.a) + std::abs(q.b) + std::abs(q.c);
            EXPECT_LT(std::abs(q(t)) / scale, 1e-9);
            EXPECT_GE(ik.angles.theta[i], g.theta_min);
            EXPECT_LE(ik.angles.theta[i], g.theta_max);
        }
    }
}

TEST(InverseKinematics, AzimuthPeriodicity)
{
    const CanfieldGeometry g;
    const PlatePose a{0.4, 0.3, 0.035};
    const PlatePose b{0.4 + 2.0 * kPi / 3.0, 0.3, 0.035};
    const IkResult ia = inverse_kinematics(a, g), ib = inverse_kinematics(b, g);
    ASSERT_TRUE(ia.ok() && ib.ok());
    // Rotating the pose by one leg spacing permutes the legs.
    EXPECT_NEAR(ia.angles.theta[0], ib.angles.theta[1], 1e-12);
    EXPECT_NEAR(ia.angles.theta[1], ib.angles.theta[2], 1e-12);
    EXPECT_NEAR(ia.angles.theta[2], ib.angles.theta[0], 1e-12);
}

TEST(ForwardKinematics, RoundTrip)
{
    const CanfieldGeometry g;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(0.0, kTwoPi), p(0.0, 0.6), h(0.015, 0.055);
    int n = 0;
    while (n < 200) {
        const PlatePose pose{d(rng), p(rng), h(rng)};
        const IkResult ik = inverse_kinematics(pose, g);
        if (!ik.ok())
            continue;
        ++n;
        const PlatePose seed{0.0, 0.0, 0.03};
        const FkResult fk = forward_kinematics(ik.angles, g, seed);
        ASSERT_TRUE(fk.converged);
        const Vec2 dt = fk.pose.tilt_vector() - pose.tilt_vector();
        EXPECT_LT(dt.norm(), 1e-6);
        EXPECT_NEAR(fk.pose.height, pose.height, 1e-6);
    }
}

TEST(ForwardKinematics, LevelPlateReportsZeroAzimuth)
{
    const CanfieldGeometry g;
    JointAngles a;
    a.theta = {kPi / 6.0, kPi / 6.0, kPi / 6.0};
    const FkResult fk = forward_kinematics(a, g, {1.0, 0.1, 0.03});
    ASSERT_TRUE(fk.converged);
    EXPECT_NEAR(fk.pose.psi, 0.0, 1e-9);
    EXPECT_EQ(fk.pose.delta, 0.0);
    EXPECT_NEAR(fk.pose.height, 0.03, 1e-9);
}

TEST(Workspace, MidBandIsLargest)
{
    const CanfieldGeometry g;
    const auto low = workspace_area(0.010, 0.025, g);
    const auto mid = workspace_area(0.025, 0.040, g);
    const auto high = workspace_area(0.040, 0.055, g);
    EXPECT_GT(mid.feasible_area, low.feasible_area);
    EXPECT_GT(mid.feasible_area, high.feasible_area);
    EXPECT_GT(low.feasible_area, 0.0);
    EXPECT_GT(high.feasible_area, 0.0);
}

TEST(Workspace, MirrorSymmetricButNotPointSymmetric)
{
    const auto band = workspace_area(0.025, 0.040, CanfieldGeometry{});
    const double cell = band.cell_size() * band.cell_size();
    // Leg layout is symmetric under delta -> -delta.
    EXPECT_NEAR(band.sector_area(0.0, kPi), band.sector_area(kPi, kTwoPi), 1e-9 + 2.0 * cell);
    // Three legs: tilting toward a leg and away from it differ.
    const auto [front, back] = band.half_areas(0.0);
    EXPECT_GT(std::abs(front - back), 10.0 * cell);
}

TEST(Workspace, RejectsBadBand)
{
    const CanfieldGeometry g;
    EXPECT_THROW(workspace_area(0.03, 0.02, g), Error);
    EXPECT_THROW(workspace_area(0.0, 0.02, g), Error);
    EXPECT_THROW(workspace_area(0.03, 0.07, g), Error);
}

TEST(PlateGeometry, PositivePsiRaisesFacingEdge)
{
    const CanfieldGeometry g;
    for (double delta : {0.0, 0.5 * kPi, 1.0, 4.0}) {
        const PlatePose pose{delta, 0.2, 0.03};
        const Vec3 n = plate_rotation(pose).col(2);
        const Vec2 e = azimuth_direction(delta);
        // Surface rises along +e: the normal leans toward -e.
        EXPECT_NEAR(n.x(), -std::sin(0.2) * e.x(), 1e-12);
        EXPECT_NEAR(n.y(), -std::sin(0.2) * e.y(), 1e-12);
        EXPECT_NEAR(n.z(), std::cos(0.2), 1e-12);
    }
    const auto corners = plate_polygon({0.0, 0.0, 0.03}, {0.5, 0.5}, g);
    for (const auto& c : corners)
        EXPECT_NEAR(c.z(), 0.03, 1e-15);
    EXPECT_NEAR(corners[0].x(), 0.45, 1e-15);
    EXPECT_NEAR(corners[2].y(), 0.55, 1e-15);
}

TEST(PlateGeometry, ClampReturnsFeasiblePose)
{
    const CanfieldGeometry g;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> d(0.0, kTwoPi), p(0.0, 1.2), h(0.0, 0.08);
    for (int i = 0; i < 300; ++i) {
        const PlatePose pose{d(rng), p(rng), h(rng)};
        const PlatePose c = clamp_to_feasible(pose, g);
        EXPECT_TRUE(is_feasible(c, g));
        if (is_feasible(pose, g)) {
            EXPECT_EQ(c.height, pose.height);
            EXPECT_EQ(c.psi, pose.psi);
        }
    }
}

} // namespace
} // namespace orisurf
