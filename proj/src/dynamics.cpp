#include "orisurf/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace orisurf {

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

Mat3 skew(const Vec3& v)
{
    Mat3 m;
    m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
    return m;
}

Quat exp_map(const Vec3& rotvec)
{
    const double angle = rotvec.norm();
    if (angle < 1e-14)
        return Quat(1.0, 0.5 * rotvec.x(), 0.5 * rotvec.y(), 0.5 * rotvec.z()).normalized();
    return Quat(Eigen::AngleAxisd(angle, rotvec / angle));
}

// Plate rotation vector for a tilt vector: axis (cos d, -sin d, 0) scaled by psi.
Vec3 plate_rotvec(const Vec2& tilt) { return {tilt.y(), -tilt.x(), 0.0}; }

// Left Jacobian of SO(3): maps rotation-vector rates to world angular velocity.
Mat3 left_jacobian(const Vec3& rho)
{
    const double th = rho.norm();
    const Mat3 k = skew(rho);
    double a, b;
    if (th < 1e-6) {
        a = 0.5 - th * th / 24.0;
        b = 1.0 / 6.0 - th * th / 120.0;
    } else {
        a = (1.0 - std::cos(th)) / (th * th);
        b = (th - std::sin(th)) / (th * th * th);
    }
    return Mat3::Identity() + a * k + b * k * k;
}

Vec3 sat(const Vec3& v, double eps)
{
    const Vec3 x = v / eps;
    const double n = x.norm();
    return n > 1.0 ? Vec3(x / n) : x;
}

double sat(double v, double eps) { return std::clamp(v / eps, -1.0, 1.0); }

bool finite(const Vec3& v) { return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z()); }

} // namespace

void ObjectSpec::validate() const
{
    if (!(size.minCoeff() > 0.0) || !finite(size))
        throw Error("object size must be positive");
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw Error("object mass must be positive");
}

ObjectSpec ObjectSpec::parse(const std::string& text)
{
    // box:<sx>x<sy>x<sz>:<mass>
    const auto bad = [&]() { return Error("bad object spec '" + text + "', expected box:SXxSYxSZ:MASS"); };
    if (text.rfind("box:", 0) != 0)
        throw bad();
    const auto colon = text.find(':', 4);
    if (colon == std::string::npos)
        throw bad();
    const std::string dims = text.substr(4, colon - 4);
    ObjectSpec spec;
    try {
        size_t pos = 0;
        for (int i = 0; i < 3; ++i) {
            size_t used = 0;
            spec.size[i] = std::stod(dims.substr(pos), &used);
            pos += used;
            if (i < 2) {
                if (pos >= dims.size() || dims[pos] != 'x')
                    throw bad();
                ++pos;
            }
        }
        if (pos != dims.size())
            throw bad();
        size_t used = 0;
        const std::string mass = text.substr(colon + 1);
        spec.mass = std::stod(mass, &used);
        if (used != mass.size())
            throw bad();
    } catch (const std::logic_error&) {
        throw bad();
    }
    spec.validate();
    return spec;
}

std::string ObjectSpec::to_string() const
{
    return "box:" + format_number(size.x()) + "x" + format_number(size.y()) + "x" + format_number(size.z()) + ":"
         + format_number(mass);
}

RigidObject RigidObject::box(const ObjectSpec& spec)
{
    spec.validate();
    RigidObject o;
    o.half_extents = 0.5 * spec.size;
    o.mass = spec.mass;
    const Vec3& s = spec.size;
    const double k = spec.mass / 12.0;
    o.inertia_body = Vec3(k * (s.y() * s.y() + s.z() * s.z()), k * (s.x() * s.x() + s.z() * s.z()),
                          k * (s.x() * s.x() + s.y() * s.y()))
                         .asDiagonal();
    return o;
}

Mat3 RigidObject::inertia_world() const
{
    const Mat3 r = rotation();
    return r * inertia_body * r.transpose();
}

std::array<Vec3, 8> RigidObject::corners() const
{
    const Mat3 r = rotation();
    std::array<Vec3, 8> out;
    size_t k = 0;
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            for (int sz : {-1, 1})
                out[k++] = position + r * Vec3(sx * half_extents.x(), sy * half_extents.y(), sz * half_extents.z());
    return out;
}

Polygon RigidObject::footprint() const
{
    std::vector<Vec2> pts;
    pts.reserve(8);
    for (const Vec3& p : corners())
        pts.emplace_back(p.x(), p.y());
    return convex_hull(std::move(pts));
}

double RigidObject::kinetic_energy() const
{
    return 0.5 * mass * linear_velocity.squaredNorm() + 0.5 * angular_velocity.dot(inertia_world() * angular_velocity);
}

void ContactParams::validate() const
{
    const double vals[] = {mu_slide, mu_roll, mu_torsion, k_n, c_n, v_eps, omega_eps, contact_radius};
    for (double v : vals)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw Error("contact parameters must be finite and non-negative");
    if (mu_roll > mu_slide)
        throw Error("mu_roll must not exceed mu_slide");
    if (!(v_eps > 0.0) || !(omega_eps > 0.0))
        throw Error("v_eps and omega_eps must be positive");
}

PlateState PlateState::at_rest(const PlatePose& pose)
{
    PlateState s;
    s.commanded = pose;
    s.height = pose.height;
    s.tilt = pose.tilt_vector();
    return s;
}

Mat3 PlateState::rotation() const
{
    const Vec3 rho = plate_rotvec(tilt);
    const double th = rho.norm();
    if (th < 1e-15)
        return Mat3::Identity();
    return Eigen::AngleAxisd(th, rho / th).toRotationMatrix();
}

Vec3 PlateState::angular_velocity() const
{
    return left_jacobian(plate_rotvec(tilt)) * plate_rotvec(tilt_rate);
}

PlateState plate_track(const PlateState& state, const PlatePose& command, double dt, double bandwidth)
{
    PlateState next = state;
    next.commanded = command;
    const double w = bandwidth;
    const double decay = std::exp(-w * dt);
    auto track = [&](double x, double rate, double target, double& x_out, double& rate_out) {
        const double e0 = x - target;
        const double b = rate + w * e0;
        x_out = target + (e0 + b * dt) * decay;
        rate_out = (rate - w * b * dt) * decay;
    };
    const Vec2 target_tilt = command.tilt_vector();
    track(state.height, state.height_rate, command.height, next.height, next.height_rate);
    track(state.tilt.x(), state.tilt_rate.x(), target_tilt.x(), next.tilt.x(), next.tilt_rate.x());
    track(state.tilt.y(), state.tilt_rate.y(), target_tilt.y(), next.tilt.y(), next.tilt_rate.y());
    return next;
}

void SimConfig::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw Error("sim.dt must be positive");
    if (!(duration > 0.0) || !std::isfinite(duration))
        throw Error("sim.duration must be positive");
    if (!(controller_period > 0.0))
        throw Error("sim.controller_period must be positive");
    const double ratio = controller_period / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
        throw Error("sim.dt must divide sim.controller_period");
    const double ticks_f = duration / controller_period;
    if (std::abs(ticks_f - std::round(ticks_f)) > 1e-9 * std::max(1.0, ticks_f))
        throw Error("sim.duration must be a multiple of sim.controller_period");
    if (solver_iterations < 1)
        throw Error("sim.solver_iterations must be at least 1");
    if (!(settle_time >= 0.0))
        throw Error("sim.settle_time must be non-negative");
    if (!(tracking_bandwidth > 0.0))
        throw Error("sim.tracking_bandwidth must be positive");
    if (!(placement_jitter >= 0.0))
        throw Error("sim.placement_jitter must be non-negative");
    if (!(energy_blowup_factor > 1.0))
        throw Error("sim.energy_blowup_factor must exceed 1");
}

long long SimConfig::steps_per_tick() const { return std::llround(controller_period / dt); }
long long SimConfig::ticks() const { return std::llround(duration / controller_period); }

SurfaceModel SurfaceModel::from_grid(const ModuleGrid& grid, const CanfieldGeometry& geom)
{
    SurfaceModel s;
    s.geometry = geom;
    s.origins.reserve(grid.size());
    for (const auto& m : grid.modules)
        s.origins.push_back(m.origin);
    return s;
}

namespace {
// Tilt (rad) between a box face and a plate below which contact keeps the plate normal.
constexpr double kFlatContact = 0.05;
const double kFlatContactCos = std::cos(kFlatContact);
} // namespace

void detect_contacts(const RigidObject& object, std::span<const PlateState> plates, const SurfaceModel& surface,
                     std::vector<Contact>& out)
{
    const auto corners = object.corners();
    const Mat3 ro = object.rotation();
    double min_x = corners[0].x(), max_x = min_x, min_y = corners[0].y(), max_y = min_y, min_z = corners[0].z();
    for (const auto& c : corners) {
        min_x = std::min(min_x, c.x());
        max_x = std::max(max_x, c.x());
        min_y = std::min(min_y, c.y());
        max_y = std::max(max_y, c.y());
        min_z = std::min(min_z, c.z());
    }

    const double half = 0.5 * surface.geometry.plate_side;
    const Polygon plate_square = square(Vec2::Zero(), surface.geometry.plate_side);

    // Depth below the plate of one downward-facing box face, linear over plate
    // coordinates: depth = a.u + b.v + c. `push` is the inward face normal in
    // plate frame and `cos` its component along the plate normal.
    struct FacePlane {
        Vec2 slope;
        double offset;
        Vec3 push;
        double cos;
    };

    for (size_t j = 0; j < plates.size(); ++j) {
        const Vec2& o = surface.origins[j];
        if (max_x < o.x() - half || min_x > o.x() + half || max_y < o.y() - half || min_y > o.y() + half)
            continue;
        const PlateState& ps = plates[j];
        const double psi = ps.tilt.norm();
        if (min_z > ps.height + half * std::sqrt(2.0) * std::sin(std::min(psi, 0.5 * kPi)))
            continue;

        const Mat3 rp = ps.rotation();
        const Vec3 center(o.x(), o.y(), ps.height);
        const Vec3 box_center = rp.transpose() * (object.position - center);

        std::vector<Vec2> projected;
        projected.reserve(8);
        for (const auto& c : corners) {
            const Vec3 q = rp.transpose() * (c - center);
            projected.emplace_back(q.x(), q.y());
        }
        Polygon region = clip_convex(convex_hull(std::move(projected)), plate_square);
        if (region.size() < 3)
            continue;

        // Within the box's shadow on the plate, the lowest box point above
        // (u, v) lies on one of the faces whose outward normal points into the
        // plate; penetration is the smallest of their depths. Nearly vertical
        // faces are left to the shadow outline.
        std::array<FacePlane, 3> faces;
        size_t nfaces = 0;
        for (int k = 0; k < 3; ++k) {
            const Vec3 axis = rp.transpose() * ro.col(k);
            const double bz = axis.z();
            if (std::abs(bz) < 0.2)
                continue;
            const double s = bz > 0.0 ? -1.0 : 1.0;
            const double e = object.half_extents[k];
            faces[nfaces++] = {Vec2(axis.x(), axis.y()) / bz, (-axis.dot(box_center) - s * e) / bz, -s * axis,
                               std::abs(bz)};
        }
        for (size_t f = 0; f < nfaces && region.size() >= 3; ++f)
            region = clip_half_plane(region, faces[f].slope, faces[f].offset);
        if (region.size() < 3 || area(region) < 1e-14)
            continue;

        // Sample each face's share of the region separately so the edges
        // where faces meet are sampled.
        std::vector<Vec2> samples;
        for (size_t f = 0; f < nfaces; ++f) {
            Polygon part = region;
            for (size_t g = 0; g < nfaces && part.size() >= 3; ++g)
                if (g != f)
                    part = clip_half_plane(part, faces[g].slope - faces[f].slope, faces[g].offset - faces[f].offset);
            if (part.size() < 3 || area(part) < 1e-14)
                continue;
            const size_t first = samples.size();
            samples.insert(samples.end(), part.begin(), part.end());
            if (part.size() <= 4)
                for (size_t k = 0; k < part.size(); ++k)
                    samples.push_back(0.5 * (part[k] + part[(k + 1) % part.size()]));
            if (samples.size() - first > 8)
                samples.resize(first + 8);
            samples.push_back(centroid(part));
        }

        // Contact normal: the separating axis of least overlap among the plate
        // normal and the pressed box faces. A plate edge pressing into a box
        // face pushes along that face's normal; anything else along the plate's.
        // Faces within kFlatContact of the plate count as face-on-face.
        const Vec3 offset = object.position - center;
        auto overlap = [&](const Vec3& a) {
            double r = half * (std::abs(a.dot(rp.col(0))) + std::abs(a.dot(rp.col(1))));
            for (int k = 0; k < 3; ++k)
                r += object.half_extents[k] * std::abs(a.dot(ro.col(k)));
            return r - std::abs(a.dot(offset));
        };
        Vec3 normal = rp.col(2);
        double scale = 1.0;
        double best = overlap(normal) - 1e-12;
        for (size_t f = 0; f < nfaces; ++f) {
            if (faces[f].cos > kFlatContactCos)
                continue;
            const Vec3 a = rp * faces[f].push;
            const double o = overlap(a);
            if (o < best) {
                best = o;
                normal = a;
                scale = faces[f].cos;
            }
        }

        const Vec3 plate_omega = ps.angular_velocity();
        const Vec3 plate_lin(0.0, 0.0, ps.height_rate);
        for (const Vec2& s : samples) {
            double depth = std::numeric_limits<double>::infinity();
            for (size_t f = 0; f < nfaces; ++f)
                depth = std::min(depth, faces[f].slope.dot(s) + faces[f].offset);
            if (!(depth > 0.0) || !std::isfinite(depth))
                continue;
            Contact c;
            c.plate = static_cast<int>(j);
            c.point = center + rp * Vec3(s.x(), s.y(), 0.0);
            c.normal = normal;
            c.depth = depth * scale;
            c.plate_velocity = plate_lin + plate_omega.cross(c.point - center);
            const Vec3 obj_vel = object.linear_velocity + object.angular_velocity.cross(c.point - object.position);
            c.relative_velocity = obj_vel - c.plate_velocity;
            c.relative_angular_velocity = object.angular_velocity - plate_omega;
            out.push_back(c);
        }
    }
}

std::vector<Contact> detect_contacts(const RigidObject& object, std::span<const PlateState> plates,
                                     const SurfaceModel& surface)
{
    std::vector<Contact> out;
    detect_contacts(object, plates, surface, out);
    return out;
}

ContactWrench contact_force(const Contact& c, const ContactParams& p)
{
    ContactWrench w;
    const Vec3& n = c.normal;
    const double vn = c.relative_velocity.dot(n);
    const double normal = std::max(0.0, p.k_n * std::max(c.depth, 0.0) - p.c_n * vn);
    if (normal <= 0.0)
        return w;
    const Vec3 vt = c.relative_velocity - vn * n;
    w.normal_force = normal;
    w.friction = -p.mu_slide * normal * sat(vt, p.v_eps);
    w.force = normal * n + w.friction;

    const double wn = c.relative_angular_velocity.dot(n);
    const Vec3 wt = c.relative_angular_velocity - wn * n;
    w.torque = -p.mu_roll * normal * p.contact_radius * sat(wt, p.omega_eps)
             - p.mu_torsion * normal * p.contact_radius * sat(wn, p.omega_eps) * n;
    return w;
}

namespace {

// Per-contact quantities of the linearly implicit velocity update.
struct ContactRow {
    Eigen::Matrix<double, 3, 6> jac;
    Vec3 normal;
    Vec3 rel_vel;
    double normal_force;
    double stick_gain;
    bool sticking;
    Vec3 friction;
};

} // namespace

StepStats step(WorldState& world, std::span<const PlatePose> commands, const SurfaceModel& surface,
               const SimConfig& cfg, const ContactParams& params)
{
    StepStats stats;
    const double h = cfg.dt;
    const auto& geom = surface.geometry;

    for (size_t j = 0; j < world.plates.size(); ++j) {
        PlateState next = plate_track(world.plates[j], commands[j], h, cfg.tracking_bandwidth);
        const PlatePose actual = next.actual();
        if (!is_feasible(actual, geom)) {
            const PlatePose clamped = clamp_to_feasible(actual, geom, cfg.solver_iterations);
            next.height = clamped.height;
            next.tilt = clamped.tilt_vector();
            ++stats.clamped_plates;
        }
        world.plates[j] = next;
    }

    RigidObject& obj = world.object;
    thread_local std::vector<Contact> contacts;
    thread_local std::vector<ContactRow> rows;
    contacts.clear();
    rows.clear();
    detect_contacts(obj, world.plates, surface, contacts);

    const Mat3 inertia = obj.inertia_world();
    Mat6 mass = Mat6::Zero();
    mass.topLeftCorner<3, 3>() = obj.mass * Mat3::Identity();
    mass.bottomRightCorner<3, 3>() = inertia;

    Vec6 nu;
    nu << obj.linear_velocity, obj.angular_velocity;

    Vec6 force = Vec6::Zero();
    force.head<3>() = Vec3(0.0, 0.0, -obj.mass * cfg.gravity);
    force.tail<3>() = -obj.angular_velocity.cross(inertia * obj.angular_velocity);

    Mat6 damping = Mat6::Zero();
    Mat6 stiffness = Mat6::Zero();

    for (const Contact& c : contacts) {
        const ContactWrench w = contact_force(c, params);
        stats.contacts += 1;
        stats.max_depth = std::max(stats.max_depth, c.depth);
        if (w.normal_force <= 0.0)
            continue;
        stats.total_normal_force += w.normal_force;

        ContactRow row;
        const Vec3 r = c.point - obj.position;
        row.jac.leftCols<3>() = Mat3::Identity();
        row.jac.rightCols<3>() = -skew(r);
        row.normal = c.normal;
        row.rel_vel = c.relative_velocity;
        row.normal_force = w.normal_force;
        row.stick_gain = params.mu_slide * w.normal_force / params.v_eps;
        row.sticking = row.stick_gain > 0.0;
        row.friction = Vec3::Zero();

        const Vec6 g = row.jac.transpose() * c.normal;
        force += g * w.normal_force;
        force.tail<3>() += w.torque;
        damping += params.c_n * g * g.transpose();
        stiffness += params.k_n * g * g.transpose();
        if (row.sticking) {
            const Vec3 vn = c.normal * c.normal.dot(c.relative_velocity);
            const Vec3 vt = c.relative_velocity - vn;
            const Eigen::Matrix<double, 3, 6> pj = row.jac - c.normal * (c.normal.transpose() * row.jac);
            damping += row.stick_gain * pj.transpose() * pj;
            force -= row.stick_gain * row.jac.transpose() * vt;
        }
        rows.push_back(row);
    }

    Vec6 dnu = Vec6::Zero();
    int iterations = 0;
    for (;;) {
        ++iterations;
        const Mat6 lhs = mass + h * damping + h * h * stiffness;
        const Vec6 rhs = h * force - h * h * (stiffness * nu);
        dnu = lhs.ldlt().solve(rhs);

        bool changed = false;
        for (auto& row : rows) {
            if (!row.sticking)
                continue;
            const Vec3 v = row.rel_vel + row.jac * dnu;
            const Vec3 vt = v - row.normal * row.normal.dot(v);
            const double speed = vt.norm();
            if (speed > params.v_eps * (1.0 + 1e-9)) {
                // Stick prediction leaves the friction cone: switch to sliding
                // along the predicted slip direction.
                const Vec3 vt0 = row.rel_vel - row.normal * row.normal.dot(row.rel_vel);
                const Eigen::Matrix<double, 3, 6> pj = row.jac - row.normal * (row.normal.transpose() * row.jac);
                damping -= row.stick_gain * pj.transpose() * pj;
                force += row.stick_gain * row.jac.transpose() * vt0;
                row.friction = -params.mu_slide * row.normal_force * vt / speed;
                force += row.jac.transpose() * row.friction;
                row.sticking = false;
                changed = true;
            }
        }
        if (!changed || iterations >= cfg.solver_iterations)
            break;
    }
    stats.solver_iterations = iterations;

    for (auto& row : rows) {
        if (row.sticking) {
            const Vec3 v = row.rel_vel + row.jac * dnu;
            const Vec3 vt = v - row.normal * row.normal.dot(v);
            row.friction = -row.stick_gain * vt;
        }
        stats.max_cone_excess = std::max(stats.max_cone_excess, row.friction.norm() - params.mu_slide * row.normal_force);
    }

    const Vec6 nu_next = nu + dnu;
    const Vec3 v_next = nu_next.head<3>();
    const Vec3 w_next = nu_next.tail<3>();
    obj.position += 0.5 * h * (obj.linear_velocity + v_next);
    obj.orientation = (exp_map(0.5 * h * (obj.angular_velocity + w_next)) * obj.orientation).normalized();
    obj.linear_velocity = v_next;
    obj.angular_velocity = w_next;
    world.time += h;

    if (!finite(obj.position) || !finite(obj.linear_velocity) || !finite(obj.angular_velocity))
        throw SimulationAbort("non-finite object state at t=" + format_number(world.time));

    const double ke = obj.kinetic_energy();
    const double floor_ke = 0.5 * obj.mass * 1.0;
    const double baseline = std::max(world.max_kinetic_energy, floor_ke);
    if (ke > cfg.energy_blowup_factor * baseline) {
        throw EnergyBlowup("kinetic energy " + format_number(ke) + " J exceeds " + format_number(cfg.energy_blowup_factor)
                           + "x running max " + format_number(baseline) + " J at t=" + format_number(world.time)
                           + " (contacts " + std::to_string(stats.contacts) + ")");
    }
    world.max_kinetic_energy = std::max(world.max_kinetic_energy, ke);
    if (obj.position.z() < -0.1)
        throw SimulationAbort("object fell off the surface at t=" + format_number(world.time));
    return stats;
}

ModuleGrid EpisodeSpec::grid() const { return assign_mode(ModuleGrid::make(rows, cols, spacing), mode); }

RigidObject initial_placement(const EpisodeSpec& spec, const ModuleGrid& grid)
{
    RigidObject obj = RigidObject::box(spec.object);
    const auto [lo, hi] = grid.bounds(spec.geometry.plate_side);
    Vec2 center = grid.center();
    if (spec.mode.kind == ManipulationMode::Kind::Translate) {
        const Vec2 u = spec.mode.direction.unit();
        const double surface_extent = std::abs(u.x()) * (hi.x() - lo.x()) + std::abs(u.y()) * (hi.y() - lo.y());
        const double object_extent = std::abs(u.x()) * spec.object.size.x() + std::abs(u.y()) * spec.object.size.y();
        center -= u * 0.5 * (surface_extent - object_extent);
    }
    if (spec.sim.placement_jitter > 0.0) {
        std::mt19937_64 rng(spec.sim.seed);
        std::uniform_real_distribution<double> jitter(-spec.sim.placement_jitter, spec.sim.placement_jitter);
        const double dx = jitter(rng);
        const double dy = jitter(rng);
        center += Vec2(dx, dy);
    }
    obj.position = Vec3(center.x(), center.y(), 0.0);

    const Polygon foot = obj.footprint();
    double top = -1.0;
    int overlapping = 0;
    std::vector<int> rows_hit, cols_hit;
    for (const auto& m : grid.modules) {
        const PlatePose rest = rest_pose(spec.params, m.direction);
        const PlatePose pose = is_feasible(rest, spec.geometry) ? rest : clamp_to_feasible(rest, spec.geometry);
        const auto corners = plate_polygon(pose, m.origin, spec.geometry);
        Polygon proj;
        for (const auto& c : corners)
            proj.emplace_back(c.x(), c.y());
        make_ccw(proj);
        const Polygon overlap = clip_convex(proj, foot);
        if (overlap.size() < 3 || area(overlap) < 1e-12)
            continue;
        ++overlapping;
        rows_hit.push_back(m.row);
        cols_hit.push_back(m.col);
        const Vec3 n = plate_rotation(pose).col(2);
        const Vec3 c(m.origin.x(), m.origin.y(), pose.height);
        for (const Vec2& p : overlap)
            top = std::max(top, c.z() - (n.x() * (p.x() - c.x()) + n.y() * (p.y() - c.y())) / n.z());
    }
    if (overlapping == 0)
        throw InvalidPlacement("object footprint overlaps no plate");
    if (spec.mode.kind == ManipulationMode::Kind::Rotate) {
        std::sort(rows_hit.begin(), rows_hit.end());
        std::sort(cols_hit.begin(), cols_hit.end());
        const auto distinct = [](std::vector<int>& v) { return std::unique(v.begin(), v.end()) - v.begin(); };
        if (distinct(rows_hit) < 2 || distinct(cols_hit) < 2)
            throw InvalidPlacement("rotation requires the object to cover at least 2x2 plates");
    }
    obj.position.z() = top + obj.half_extents.z();
    return obj;
}

TrajectoryLog simulate_episode(const EpisodeSpec& spec)
{
    spec.sim.validate();
    spec.contact.validate();
    spec.geometry.validate();
    spec.object.validate();

    CpgParams params = spec.params;
    if (spec.mode.kind == ManipulationMode::Kind::Rotate)
        params.phi = kPi;
    EpisodeSpec effective = spec;
    effective.params = params;

    const ModuleGrid grid = effective.grid();
    const SurfaceModel surface = SurfaceModel::from_grid(grid, spec.geometry);
    const SimConfig& cfg = spec.sim;

    std::vector<PlatePose> rest(grid.size());
    WorldState world;
    world.plates.reserve(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        PlatePose pose = rest_pose(params, grid.modules[i].direction);
        if (!is_feasible(pose, spec.geometry))
            pose = clamp_to_feasible(pose, spec.geometry);
        rest[i] = pose;
        world.plates.push_back(PlateState::at_rest(pose));
    }
    world.object = initial_placement(effective, grid);

    TrajectoryLog log;
    log.controller_period = cfg.controller_period;
    log.duration = cfg.duration;
    EpisodeStats& st = log.stats;
    const auto absorb = [&](const StepStats& s) {
        ++st.steps;
        st.max_contacts = std::max(st.max_contacts, s.contacts);
        st.max_depth = std::max(st.max_depth, s.max_depth);
        st.max_cone_excess = std::max(st.max_cone_excess, s.max_cone_excess);
        st.actual_clamps += s.clamped_plates;
        st.max_solver_iterations = std::max(st.max_solver_iterations, s.solver_iterations);
    };

    const long long settle_steps = std::llround(cfg.settle_time / cfg.dt);
    for (long long k = 0; k < settle_steps; ++k)
        absorb(step(world, rest, surface, cfg, spec.contact));

    world.time = 0.0;
    const auto sample = [&](double t) {
        TrajectorySample s;
        s.t = t;
        s.position = world.object.position;
        s.orientation = world.object.orientation;
        s.linear_velocity = world.object.linear_velocity;
        s.angular_velocity = world.object.angular_velocity;
        log.samples.push_back(s);
    };
    st.initial_height = world.object.position.z();

    const long long ticks = cfg.ticks();
    const long long steps_per_tick = cfg.steps_per_tick();
    log.samples.reserve(static_cast<size_t>(ticks) + 1);
    log.ticks.reserve(static_cast<size_t>(ticks));
    sample(0.0);
    for (long long k = 0; k < ticks; ++k) {
        const double t = static_cast<double>(k) * cfg.controller_period;
        const ControllerOutput out =
            controller_step(t + cfg.cpg_time_offset, world.object.footprint(), grid, params, spec.geometry);
        TickSummary tick;
        tick.t = t;
        for (size_t i = 0; i < out.active.size(); ++i) {
            tick.active_modules += out.active[i];
            if (out.saturated[i]) {
                log.saturation.push_back({t, static_cast<int>(i)});
                ++st.command_saturations;
            }
        }
        double normal_sum = 0.0;
        for (long long s = 0; s < steps_per_tick; ++s) {
            const StepStats ss = step(world, out.commands, surface, cfg, spec.contact);
            absorb(ss);
            tick.max_contacts = std::max(tick.max_contacts, ss.contacts);
            tick.max_depth = std::max(tick.max_depth, ss.max_depth);
            tick.max_cone_excess = std::max(tick.max_cone_excess, ss.max_cone_excess);
            normal_sum += ss.total_normal_force;
        }
        tick.mean_normal_force = normal_sum / static_cast<double>(steps_per_tick);
        log.ticks.push_back(tick);
        sample(static_cast<double>(k + 1) * cfg.controller_period);
    }
    return log;
}

} // namespace orisurf
