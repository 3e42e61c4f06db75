#pragma once

#include <array>
#include <optional>
#include <vector>

#include "orisurf/types.hpp"

namespace orisurf {

/// Dimensions of one Canfield origami module. Lengths in meters.
struct CanfieldGeometry {
    double link_length = 0.030;
    double joint_circle_radius = 0.02021;
    std::array<double, 3> leg_azimuths{0.0, kTwoPi / 3.0, 2.0 * kTwoPi / 3.0};
    double theta_min = 0.0;
    double theta_max = kPi / 2.0;
    double plate_side = 0.10;

    /// Maximum plate-center height, reached with all legs straight.
    double max_height() const { return 2.0 * link_length; }
    void validate() const;
};

/// Top-plate pose: tilt azimuth `delta`, tilt magnitude `psi`, center height.
///
/// Positive psi raises the plate edge facing azimuth_direction(delta). A
/// negative psi is the same pose as (delta + pi, -psi).
struct PlatePose {
    double delta = 0.0;
    double psi = 0.0;
    double height = 0.0;

    /// Tilt expressed as a planar vector psi * azimuth_direction(delta). This
    /// is singularity free at psi = 0.
    Vec2 tilt_vector() const { return psi * azimuth_direction(delta); }
    static PlatePose from_tilt_vector(const Vec2& tilt, double height);
};

struct JointAngles {
    std::array<double, 3> theta{};
};

enum class IkStatus { Ok, Infeasible };

struct IkResult {
    IkStatus status = IkStatus::Infeasible;
    JointAngles angles;
    /// Legs whose quadratic coefficient vanished and were solved linearly.
    std::array<bool, 3> degenerate_leg{};

    bool ok() const { return status == IkStatus::Ok; }
};

/// Coefficients of the per-leg quadratic a*t^2 + b*t + c = 0 in t = tan(theta/2).
struct LegQuadratic {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    double operator()(double t) const { return (a * t + b) * t + c; }
};

std::array<LegQuadratic, 3> leg_quadratics(const PlatePose& pose, const CanfieldGeometry& geom);

IkResult inverse_kinematics(const PlatePose& pose, const CanfieldGeometry& geom);

inline bool is_feasible(const PlatePose& pose, const CanfieldGeometry& geom)
{
    return inverse_kinematics(pose, geom).ok();
}

struct FkResult {
    PlatePose pose;
    /// Max per-leg angle mismatch of the returned pose, radians.
    double residual = 0.0;
    bool converged = false;
    int iterations = 0;
};

struct FkOptions {
    double tolerance = 1e-10;
    int max_iterations = 100;
    int starts = 8;
};

/// Numerical forward kinematics by damped Newton on the IK mismatch, run from
/// several starting poses. Returned poses use psi >= 0 and delta in [0, 2pi);
/// delta is reported as 0 when the plate is level.
FkResult forward_kinematics(const JointAngles& angles, const CanfieldGeometry& geom,
                            const PlatePose& seed_pose, const FkOptions& options = {});

/// Feasibility raster over the polar tilt disk (psi*cos(delta), psi*sin(delta)).
struct WorkspaceBand {
    double h_low = 0.0;
    double h_high = 0.0;
    int resolution = 0;
    int height_samples = 0;
    double psi_extent = 0.0;
    /// Row-major mask, index = iy * resolution + ix.
    std::vector<unsigned char> feasible;
    double feasible_area = 0.0;
    double total_area = 0.0;

    double cell_size() const { return 2.0 * psi_extent / resolution; }
    /// Center of raster cell (ix, iy) in tilt-disk coordinates.
    Vec2 cell_center(int ix, int iy) const;
    bool at(int ix, int iy) const { return feasible[static_cast<size_t>(iy) * resolution + ix] != 0; }

    /// Feasible area of cells whose tilt direction lies within pi/2 of
    /// `axis_delta` (front) and of the remaining cells (back).
    std::pair<double, double> half_areas(double axis_delta) const;
    /// Feasible area restricted to cells with delta in [lo, hi).
    double sector_area(double lo, double hi) const;
};

struct WorkspaceOptions {
    int resolution = 64;
    int height_samples = 16;
    double psi_extent = kPi / 2.0;
};

WorkspaceBand workspace_area(double h_low, double h_high, const CanfieldGeometry& geom,
                             const WorkspaceOptions& options = {});

/// World-frame rotation of a plate with the given pose.
Mat3 plate_rotation(const PlatePose& pose);

/// Corners of the top plate in world frame, counter-clockwise seen from above
/// when level.
std::array<Vec3, 4> plate_polygon(const PlatePose& pose, const Vec2& module_origin,
                                  const CanfieldGeometry& geom);

/// Projects an infeasible pose back along the straight line (in tilt-vector and
/// height coordinates) towards a level anchor pose, using bisection. Returns the
/// feasible pose closest to `pose` on that line.
PlatePose clamp_to_feasible(const PlatePose& pose, const CanfieldGeometry& geom,
                            int iterations = 30);

} // namespace orisurf
