#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "orisurf/cpg.hpp"
#include "orisurf/kinematics.hpp"
#include "orisurf/surface.hpp"
#include "orisurf/trajectory.hpp"

namespace orisurf {

class EnergyBlowup : public Error {
public:
    using Error::Error;
};

class InvalidPlacement : public Error {
public:
    using Error::Error;
};

/// Object left the surface or the state went non-finite.
class SimulationAbort : public Error {
public:
    using Error::Error;
};

/// Box object description: full extents in meters and mass in kg.
struct ObjectSpec {
    Vec3 size{0.3, 0.3, 0.01};
    double mass = 0.254;

    void validate() const;
    /// "box:0.3x0.3x0.01:0.254"
    static ObjectSpec parse(const std::string& text);
    std::string to_string() const;
};

struct RigidObject {
    Vec3 half_extents{0.15, 0.15, 0.005};
    double mass = 0.254;
    Mat3 inertia_body = Mat3::Identity();

    Vec3 position = Vec3::Zero();
    Quat orientation = Quat::Identity();
    Vec3 linear_velocity = Vec3::Zero();
    Vec3 angular_velocity = Vec3::Zero();

    static RigidObject box(const ObjectSpec& spec);

    Mat3 rotation() const { return orientation.toRotationMatrix(); }
    Mat3 inertia_world() const;
    /// All eight corners in world frame.
    std::array<Vec3, 8> corners() const;
    /// Convex hull of the object projected onto the XY plane.
    Polygon footprint() const;
    double kinetic_energy() const;
};

struct ContactParams {
    double mu_slide = 0.5;
    double mu_roll = 0.01;
    double mu_torsion = 0.005;
    double k_n = 5000.0;
    double c_n = 5.0;
    double v_eps = 1e-3;
    double omega_eps = 1e-2;
    /// Lever arm for rolling and torsional resistance.
    double contact_radius = 0.01;

    void validate() const;
};

/// Plate pose tracked through (H, tilt vector) with rates. Commanded pose is
/// what the controller last asked for.
struct PlateState {
    PlatePose commanded;
    double height = 0.0;
    Vec2 tilt = Vec2::Zero();
    double height_rate = 0.0;
    Vec2 tilt_rate = Vec2::Zero();

    static PlateState at_rest(const PlatePose& pose);
    PlatePose actual() const { return PlatePose::from_tilt_vector(tilt, height); }
    Mat3 rotation() const;
    Vec3 angular_velocity() const;
};

/// Critically damped second-order tracking of the command, integrated exactly
/// over dt. No feasibility clamping.
PlateState plate_track(const PlateState& state, const PlatePose& command, double dt, double bandwidth);

struct SimConfig {
    double dt = 5e-4;
    double duration = 5.0;
    double controller_period = 0.05;
    double gravity = 9.81;
    int solver_iterations = 30;
    std::uint64_t seed = 0;
    double settle_time = 0.5;
    double tracking_bandwidth = 12.0;
    /// Uniform random offset (m) of the initial placement, drawn from seed.
    double placement_jitter = 0.0;
    /// Added to the controller clock; used for phase-shift experiments.
    double cpg_time_offset = 0.0;
    double energy_blowup_factor = 10.0;

    void validate() const;
    long long steps_per_tick() const;
    long long ticks() const;
};

/// Static description of the actuated surface.
struct SurfaceModel {
    CanfieldGeometry geometry;
    std::vector<Vec2> origins;

    static SurfaceModel from_grid(const ModuleGrid& grid, const CanfieldGeometry& geom);
};

struct Contact {
    int plate = 0;
    /// Sample point on the plate surface.
    Vec3 point = Vec3::Zero();
    /// Plate normal, or the normal of a box face pressed by a plate edge.
    /// Depth is measured along it.
    Vec3 normal = Vec3::UnitZ();
    double depth = 0.0;
    /// Object velocity minus plate velocity at the contact point.
    Vec3 relative_velocity = Vec3::Zero();
    Vec3 relative_angular_velocity = Vec3::Zero();
    Vec3 plate_velocity = Vec3::Zero();
};

/// Appends contacts of the object's bottom face with every plate to `out`.
void detect_contacts(const RigidObject& object, std::span<const PlateState> plates, const SurfaceModel& surface,
                     std::vector<Contact>& out);
std::vector<Contact> detect_contacts(const RigidObject& object, std::span<const PlateState> plates,
                                     const SurfaceModel& surface);

struct ContactWrench {
    double normal_force = 0.0;
    Vec3 force = Vec3::Zero();
    Vec3 friction = Vec3::Zero();
    /// Pure couple from rolling and torsional resistance.
    Vec3 torque = Vec3::Zero();
};

ContactWrench contact_force(const Contact& contact, const ContactParams& params);

struct WorldState {
    RigidObject object;
    std::vector<PlateState> plates;
    double time = 0.0;
    double max_kinetic_energy = 0.0;
};

struct StepStats {
    int contacts = 0;
    double max_depth = 0.0;
    double total_normal_force = 0.0;
    double max_cone_excess = -1.0;
    int solver_iterations = 0;
    int clamped_plates = 0;
};

/// Advances the world by cfg.dt: tracks plates, resolves contacts, updates
/// velocities and then positions. Throws EnergyBlowup / SimulationAbort.
StepStats step(WorldState& world, std::span<const PlatePose> commands, const SurfaceModel& surface,
               const SimConfig& cfg, const ContactParams& params);

struct EpisodeSpec {
    SimConfig sim;
    ContactParams contact;
    CanfieldGeometry geometry;
    int rows = 5;
    int cols = 5;
    double spacing = 0.12;
    ManipulationMode mode;
    CpgParams params;
    ObjectSpec object;

    ModuleGrid grid() const;
};

/// Initial object pose (resting on the rest-pose plates) for an episode.
RigidObject initial_placement(const EpisodeSpec& spec, const ModuleGrid& grid);

TrajectoryLog simulate_episode(const EpisodeSpec& spec);

} // namespace orisurf
