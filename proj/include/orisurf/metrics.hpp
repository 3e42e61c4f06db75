#pragma once

#include <span>

#include "orisurf/trajectory.hpp"

namespace orisurf {

class EmptyLog : public Error {
public:
    using Error::Error;
};

struct ManipulationMetrics {
    /// Planar net displacement over duration (m/s).
    double v = 0.0;
    /// Net unwrapped yaw over duration (rad/s).
    double omega = 0.0;
    double max_roll = 0.0;
    double max_pitch = 0.0;
    /// Largest |z(t) - z(0)| (m).
    double max_z = 0.0;
};

struct CostWeights {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double varsigma = 0.0;

    static CostWeights fast() { return {-1.0, 0.0, 0.0, 0.0}; }
    static CostWeights smooth() { return {-0.2, 0.3, 0.3, 0.3}; }
    static CostWeights rotation() { return {1.0, -1.0, 0.0, 0.0}; }

    CostWeights operator+(const CostWeights& o) const
    {
        return {alpha + o.alpha, beta + o.beta, gamma + o.gamma, varsigma + o.varsigma};
    }
    CostWeights operator*(double c) const { return {alpha * c, beta * c, gamma * c, varsigma * c}; }
};

ManipulationMetrics compute_metrics(std::span<const PoseRow> rows);
ManipulationMetrics compute_metrics(const TrajectoryLog& log);

double cost(const ManipulationMetrics& m, const CostWeights& w);

/// Displacement and yaw of the last sample relative to the first.
struct NetMotion {
    Vec2 displacement = Vec2::Zero();
    double yaw = 0.0;
};

NetMotion net_motion(std::span<const PoseRow> rows);

/// Standard deviations over the samples, used for smoothness reports.
struct SpreadStats {
    double z_std = 0.0;
    double roll_std = 0.0;
    double pitch_std = 0.0;
};

SpreadStats spread_stats(std::span<const PoseRow> rows);

} // namespace orisurf
