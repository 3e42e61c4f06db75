#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "orisurf/types.hpp"

namespace orisurf {

/// Z-Y-X (yaw, pitch, roll) Euler angles of a world-frame orientation.
struct EulerZYX {
    double roll = 0.0;
    double pitch = 0.0;
    double yaw = 0.0;
};

EulerZYX euler_zyx(const Quat& q);

struct TrajectorySample {
    double t = 0.0;
    Vec3 position = Vec3::Zero();
    Quat orientation = Quat::Identity();
    Vec3 linear_velocity = Vec3::Zero();
    Vec3 angular_velocity = Vec3::Zero();
};

/// Contact statistics aggregated over one controller tick.
struct TickSummary {
    double t = 0.0;
    int active_modules = 0;
    int max_contacts = 0;
    double max_depth = 0.0;
    double mean_normal_force = 0.0;
    double max_cone_excess = -1.0;
};

struct SaturationEvent {
    double t = 0.0;
    int module = 0;
};

struct EpisodeStats {
    long long steps = 0;
    int max_contacts = 0;
    double max_depth = 0.0;
    /// max over all contacts and steps of |F_t| - mu_slide * N.
    double max_cone_excess = -1.0;
    long long command_saturations = 0;
    long long actual_clamps = 0;
    int max_solver_iterations = 0;
    double initial_height = 0.0;
};

struct TrajectoryLog {
    double controller_period = 0.05;
    double duration = 0.0;
    std::vector<TrajectorySample> samples;
    std::vector<TickSummary> ticks;
    std::vector<SaturationEvent> saturation;
    EpisodeStats stats;
};

/// Pose row as stored in trajectory CSV files; yaw is unwrapped over time.
struct PoseRow {
    double t = 0.0;
    Vec3 position = Vec3::Zero();
    EulerZYX euler;
    Vec3 linear_velocity = Vec3::Zero();
    Vec3 angular_velocity = Vec3::Zero();
};

std::vector<PoseRow> pose_rows(const TrajectoryLog& log);

/// Columns: t,x,y,z,roll,pitch,yaw,vx,vy,vz,wx,wy,wz; 9 significant digits.
void write_trajectory_csv(std::ostream& os, const std::vector<PoseRow>& rows);
std::vector<PoseRow> read_trajectory_csv(std::istream& is);

/// Formats a double with 9 significant digits.
std::string format_number(double v);

} // namespace orisurf
