#include "orisurf/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace orisurf {

NetMotion net_motion(std::span<const PoseRow> rows)
{
    if (rows.empty())
        throw EmptyLog("trajectory has no samples");
    const PoseRow& a = rows.front();
    const PoseRow& b = rows.back();
    return {Vec2(b.position.x() - a.position.x(), b.position.y() - a.position.y()), b.euler.yaw - a.euler.yaw};
}

ManipulationMetrics compute_metrics(std::span<const PoseRow> rows)
{
    const NetMotion net = net_motion(rows);
    const double duration = rows.back().t - rows.front().t;
    ManipulationMetrics m;
    if (duration > 0.0) {
        m.v = net.displacement.norm() / duration;
        m.omega = std::abs(net.yaw) / duration;
    }
    const double z0 = rows.front().position.z();
    for (const auto& r : rows) {
        m.max_roll = std::max(m.max_roll, std::abs(r.euler.roll));
        m.max_pitch = std::max(m.max_pitch, std::abs(r.euler.pitch));
        m.max_z = std::max(m.max_z, std::abs(r.position.z() - z0));
    }
    return m;
}

ManipulationMetrics compute_metrics(const TrajectoryLog& log)
{
    const auto rows = pose_rows(log);
    return compute_metrics(std::span<const PoseRow>(rows));
}

double cost(const ManipulationMetrics& m, const CostWeights& w)
{
    return w.alpha * m.v + w.beta * m.omega + w.gamma * (m.max_roll + m.max_pitch) + w.varsigma * m.max_z;
}

SpreadStats spread_stats(std::span<const PoseRow> rows)
{
    if (rows.empty())
        throw EmptyLog("trajectory has no samples");
    const double n = static_cast<double>(rows.size());
    auto stdev = [&](auto get) {
        double mean = 0.0;
        for (const auto& r : rows)
            mean += get(r);
        mean /= n;
        double var = 0.0;
        for (const auto& r : rows)
            var += (get(r) - mean) * (get(r) - mean);
        return std::sqrt(var / n);
    };
    return {stdev([](const PoseRow& r) { return r.position.z(); }), stdev([](const PoseRow& r) { return r.euler.roll; }),
            stdev([](const PoseRow& r) { return r.euler.pitch; })};
}

} // namespace orisurf
