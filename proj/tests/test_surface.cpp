#include <gtest/gtest.h>

#include <random>

#include "orisurf/surface.hpp"

namespace orisurf {
namespace {

Polygon rect(Vec2 lo, Vec2 hi) { return {lo, {hi.x(), lo.y()}, hi, {lo.x(), hi.y()}}; }

ModuleGrid grid5() { return ModuleGrid::make(5, 5, 0.12); }

TEST(Grid, RegularOrigins)
{
    const ModuleGrid g = grid5();
    ASSERT_EQ(g.size(), 25u);
    EXPECT_NEAR(g.at(2, 3).origin.x(), 0.36, 1e-15);
    EXPECT_NEAR(g.at(2, 3).origin.y(), 0.24, 1e-15);
    EXPECT_NEAR(g.center().x(), 0.24, 1e-15);
    const auto [lo, hi] = g.bounds(0.1);
    EXPECT_NEAR(lo.x(), -0.05, 1e-15);
    EXPECT_NEAR(hi.y(), 0.53, 1e-15);
    EXPECT_THROW(ModuleGrid::make(0, 3, 0.12), GridTooSmall);
}

TEST(Translation, CheckerboardGroups)
{
    const ModuleGrid g = assign_translation(grid5(), TranslationDirection::y(1));
    EXPECT_EQ(g.at(0, 0).group, 1);
    EXPECT_EQ(g.at(0, 1).group, 2);
    EXPECT_EQ(g.at(1, 0).group, 2);
    int ones = 0, twos = 0;
    for (const auto& m : g.modules) {
        ones += m.group == 1;
        twos += m.group == 2;
    }
    EXPECT_EQ(ones, 13);
    EXPECT_EQ(twos, 12);
}

TEST(Translation, AxisAndHalfRange)
{
    const ModuleGrid yp = assign_translation(grid5(), TranslationDirection::y(1));
    for (const auto& m : yp.modules) {
        EXPECT_EQ(m.direction.delta_cmd, 0.0);
        EXPECT_EQ(m.direction.half_range, HalfRange::Positive);
    }
    const ModuleGrid xn = assign_translation(grid5(), TranslationDirection::x(-1));
    for (const auto& m : xn.modules) {
        EXPECT_DOUBLE_EQ(m.direction.delta_cmd, 0.5 * kPi);
        EXPECT_EQ(m.direction.half_range, HalfRange::Negative);
    }
}

TEST(Mode, ParseAndPrint)
{
    const auto a = ManipulationMode::parse("fast:+y");
    EXPECT_EQ(a.kind, ManipulationMode::Kind::Translate);
    EXPECT_EQ(a.profile, Profile::Fast);
    EXPECT_EQ(a.direction.sign, 1);
    EXPECT_EQ(a.to_string(), "translate:+y:fast");
    EXPECT_EQ(ManipulationMode::parse("translate:-x:smooth").to_string(), "translate:-x:smooth");
    EXPECT_EQ(ManipulationMode::parse("rotate:ccw").sense, RotationSense::CCW);
    EXPECT_THROW(ManipulationMode::parse("fast:+z"), Error);
    EXPECT_THROW(ManipulationMode::parse("rotate"), Error);
    EXPECT_THROW(ManipulationMode::parse("hover:+x"), Error);
}

TEST(Rotation, QuadrantLayoutClockwise)
{
    const ModuleGrid g = assign_rotation(grid5(), RotationSense::CW);
    // +Y is the top edge: row 4 is the top row.
    const auto& tl = g.at(4, 0);
    EXPECT_EQ(tl.group, 1);
    EXPECT_DOUBLE_EQ(tl.direction.delta_cmd, 0.5 * kPi);
    EXPECT_EQ(tl.direction.half_range, HalfRange::Positive);
    const auto& br = g.at(0, 4);
    EXPECT_EQ(br.group, 1);
    EXPECT_EQ(br.direction.half_range, HalfRange::Negative);
    const auto& tr = g.at(4, 4);
    EXPECT_EQ(tr.group, 2);
    EXPECT_EQ(tr.direction.delta_cmd, 0.0);
    EXPECT_EQ(tr.direction.half_range, HalfRange::Negative);
    const auto& bl = g.at(0, 0);
    EXPECT_EQ(bl.group, 2);
    EXPECT_EQ(bl.direction.half_range, HalfRange::Positive);
    EXPECT_EQ(g.at(2, 2).group, 0);
    // Center-row and center-column ties go to group 1.
    EXPECT_EQ(g.at(4, 2).group, 1);
    EXPECT_EQ(g.at(2, 0).group, 1);
}

TEST(Rotation, ClockwiseTorqueIsNegative)
{
    for (int n : {2, 3, 4, 5, 6}) {
        const ModuleGrid g = assign_rotation(ModuleGrid::make(n, n, 0.12), RotationSense::CW);
        double torque = 0.0;
        for (const auto& m : g.modules) {
            if (m.group == 0)
                continue;
            const Vec2 r = m.origin - g.center();
            const double sign = m.direction.half_range == HalfRange::Positive ? 1.0 : -1.0;
            const Vec2 push = sign * azimuth_direction(m.direction.delta_cmd);
            const double tz = r.x() * push.y() - r.y() * push.x();
            EXPECT_LE(tz, 1e-12);
            torque += tz;
        }
        EXPECT_LT(torque, 0.0) << n << "x" << n;
    }
}

TEST(Rotation, CounterClockwiseFlipsEverySign)
{
    const ModuleGrid cw = assign_rotation(grid5(), RotationSense::CW);
    const ModuleGrid ccw = assign_rotation(grid5(), RotationSense::CCW);
    for (size_t i = 0; i < cw.size(); ++i) {
        EXPECT_EQ(cw.modules[i].group, ccw.modules[i].group);
        if (cw.modules[i].group == 0)
            continue;
        EXPECT_EQ(cw.modules[i].direction.delta_cmd, ccw.modules[i].direction.delta_cmd);
        EXPECT_NE(cw.modules[i].direction.half_range, ccw.modules[i].direction.half_range);
    }
}

TEST(Rotation, MinimalAndTooSmallGrids)
{
    const ModuleGrid g = assign_rotation(ModuleGrid::make(2, 2, 0.12), RotationSense::CW);
    std::vector<int> groups;
    for (const auto& m : g.modules)
        groups.push_back(m.group);
    EXPECT_EQ(std::count(groups.begin(), groups.end(), 1), 2);
    EXPECT_EQ(std::count(groups.begin(), groups.end(), 2), 2);
    EXPECT_EQ(distinct_directions(g).size(), 4u);
    EXPECT_THROW(assign_rotation(ModuleGrid::make(1, 5, 0.12), RotationSense::CW), GridTooSmall);
}

TEST(ContactRatio, Examples)
{
    const Polygon plate = square({0.0, 0.0}, 0.1);
    EXPECT_DOUBLE_EQ(contact_ratio(plate, square({0.0, 0.0}, 0.3)), 1.0);
    EXPECT_DOUBLE_EQ(contact_ratio(plate, square({1.0, 0.0}, 0.3)), 0.0);
    // Object edge along x = 0 bisects the plate.
    EXPECT_NEAR(contact_ratio(plate, rect({0.0, -1.0}, {1.0, 1.0})), 0.5, 1e-12);
    EXPECT_NEAR(contact_ratio(plate, rect({0.03, -1.0}, {1.0, 1.0})), 0.2, 1e-12);
    EXPECT_THROW(contact_ratio(Polygon{{0, 0}, {1, 0}, {2, 0}}, plate), DegeneratePolygon);
}

TEST(Controller, NoObjectMeansRest)
{
    const ModuleGrid g = assign_translation(grid5(), TranslationDirection::y(1));
    CpgParams p;
    const auto out = controller_step(0.37, Polygon{}, g, p, CanfieldGeometry{});
    for (size_t i = 0; i < g.size(); ++i) {
        EXPECT_EQ(out.active[i], 0);
        EXPECT_EQ(out.commands[i].height, p.h0);
        EXPECT_EQ(out.commands[i].psi, p.psi0);
    }
}

TEST(Controller, CenterBlockActivation)
{
    const ModuleGrid g = assign_translation(grid5(), TranslationDirection::y(1));
    CpgParams p;
    p.epsilon = 0.3;
    // Covers the plates of rows/cols 1..3 completely and nothing else.
    const Polygon foot = rect({0.12 - 0.06, 0.12 - 0.06}, {0.36 + 0.06, 0.36 + 0.06});
    const auto out = controller_step(0.2, foot, g, p, CanfieldGeometry{});
    for (const auto& m : g.modules) {
        const bool inside = m.row >= 1 && m.row <= 3 && m.col >= 1 && m.col <= 3;
        EXPECT_EQ(out.active[m.row * 5 + m.col] != 0, inside) << m.row << "," << m.col;
    }
}

TEST(Controller, ThresholdGate)
{
    const ModuleGrid g = assign_translation(ModuleGrid::make(1, 1, 0.12), TranslationDirection::y(1));
    CpgParams p;
    p.epsilon = 0.25;
    const Polygon foot = rect({0.03, -1.0}, {1.0, 1.0}); // ratio 0.2
    EXPECT_EQ(controller_step(0.1, foot, g, p, CanfieldGeometry{}).active[0], 0);
    p.epsilon = 0.15;
    EXPECT_EQ(controller_step(0.1, foot, g, p, CanfieldGeometry{}).active[0], 1);
}

TEST(Controller, GroupTwoRunsWithPhaseOffset)
{
    const ModuleGrid g = assign_translation(ModuleGrid::make(1, 2, 0.12), TranslationDirection::x(1));
    CpgParams p;
    const Polygon foot = rect({-1.0, -1.0}, {1.0, 1.0});
    const auto out = controller_step(0.4, foot, g, p, CanfieldGeometry{});
    EXPECT_DOUBLE_EQ(out.commands[0].height, cpg_height(0.4, p, 0.0));
    EXPECT_DOUBLE_EQ(out.commands[1].height, cpg_height(0.4, p, p.phi));
    EXPECT_DOUBLE_EQ(out.commands[1].psi, cpg_inclination(0.4, p, p.phi));
}

TEST(Controller, SaturationIsClampedAndFlagged)
{
    const ModuleGrid g = assign_translation(ModuleGrid::make(1, 1, 0.12), TranslationDirection::y(1));
    CpgParams p;
    p.h0 = 0.04;
    p.h_amp = 0.03;
    const Polygon foot = rect({-1.0, -1.0}, {1.0, 1.0});
    const double t_peak = 0.25 / p.freq;
    const auto out = controller_step(t_peak, foot, g, p, CanfieldGeometry{});
    EXPECT_EQ(out.saturated[0], 1);
    EXPECT_TRUE(is_feasible(out.commands[0], CanfieldGeometry{}));
}

TEST(Controller, ActivationIsMonotoneInFootprint)
{
    const ModuleGrid g = assign_translation(grid5(), TranslationDirection::y(1));
    CpgParams p;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> c(0.0, 0.48), s(0.02, 0.3), grow(0.0, 0.1), eps(0.1, 0.5);
    for (int trial = 0; trial < 200; ++trial) {
        p.epsilon = eps(rng);
        const Vec2 center(c(rng), c(rng));
        const Vec2 half(s(rng), s(rng));
        const Vec2 extra(grow(rng), grow(rng));
        const auto small = controller_step(0.0, rect(center - half, center + half), g, p, CanfieldGeometry{});
        const auto big =
            controller_step(0.0, rect(center - half - extra, center + half + extra), g, p, CanfieldGeometry{});
        for (size_t i = 0; i < g.size(); ++i)
            if (small.active[i])
                EXPECT_TRUE(big.active[i]);
    }
}

TEST(Controller, QuantizeToTick)
{
    EXPECT_DOUBLE_EQ(quantize_to_tick(0.0, 0.05), 0.0);
    EXPECT_DOUBLE_EQ(quantize_to_tick(0.0749, 0.05), 0.05);
    EXPECT_NEAR(quantize_to_tick(0.15, 0.05), 0.15, 1e-15);
    EXPECT_NEAR(quantize_to_tick(1.0 - 1e-12, 0.05), 1.0, 1e-9);
}

} // namespace
} // namespace orisurf
