#include "orisurf/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace orisurf {

void CanfieldGeometry::validate() const
{
    if (!(link_length > 0.0) || !(joint_circle_radius > 0.0))
        throw Error("CanfieldGeometry: link length and joint circle radius must be positive");
    if (!(plate_side > 0.0))
        throw Error("CanfieldGeometry: plate side must be positive");
    if (!(theta_min < theta_max))
        throw Error("CanfieldGeometry: theta_min must be below theta_max");
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            double d = wrap_two_pi(leg_azimuths[i] - leg_azimuths[j]);
            if (d < 1e-12 || kTwoPi - d < 1e-12)
                throw Error("CanfieldGeometry: leg azimuths must be pairwise distinct");
        }
    }
}

PlatePose PlatePose::from_tilt_vector(const Vec2& tilt, double height)
{
    PlatePose p;
    p.psi = tilt.norm();
    p.delta = p.psi > 0.0 ? wrap_two_pi(std::atan2(tilt.x(), tilt.y())) : 0.0;
    p.height = height;
    return p;
}

std::array<LegQuadratic, 3> leg_quadratics(const PlatePose& pose, const CanfieldGeometry& geom)
{
    const double l = geom.link_length;
    const double r = geom.joint_circle_radius;
    const double half = 0.5 * pose.psi;
    const double s = std::sin(half);
    const double ch = std::cos(half);
    // r0 = H / sin(pi/2 - psi/2)
    const double r0 = pose.height / ch;

    std::array<LegQuadratic, 3> q;
    for (int i = 0; i < 3; ++i) {
        const double k = s * std::cos(pose.delta - geom.leg_azimuths[i]);
        q[i].a = (r - l) * k - 0.5 * r0;
        q[i].b = 2.0 * l * ch;
        q[i].c = (r + l) * k - 0.5 * r0;
    }
    return q;
}

IkResult inverse_kinematics(const PlatePose& pose, const CanfieldGeometry& geom)
{
    IkResult result;
    if (!(pose.height > 0.0) || !(std::abs(pose.psi) < 0.5 * kPi))
        return result;

    const double t_lo = std::tan(0.5 * geom.theta_min);
    const double t_hi = std::tan(0.5 * geom.theta_max);
    constexpr double kRangeTol = 1e-12;

    const auto quads = leg_quadratics(pose, geom);
    for (int i = 0; i < 3; ++i) {
        const auto& [a, b, c] = quads[i];
        double roots[2];
        int n_roots = 0;

        if (std::abs(a) <= 1e-14 * (std::abs(b) + std::abs(c))) {
            if (b == 0.0)
                return result;
            roots[n_roots++] = -c / b;
            result.degenerate_leg[i] = true;
        } else {
            double disc = b * b - 4.0 * a * c;
            if (disc < 0.0) {
                // Rounding at full extension can push a double root slightly negative.
                if (disc < -1e-12 * b * b)
                    return result;
                disc = 0.0;
            }
            const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
            roots[n_roots++] = q / a;
            if (q != 0.0)
                roots[n_roots++] = c / q;
        }

        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < n_roots; ++k) {
            const double t = roots[k];
            if (t < t_lo - kRangeTol || t > t_hi + kRangeTol)
                continue;
            const double theta = std::clamp(2.0 * std::atan(t), geom.theta_min, geom.theta_max);
            best = std::min(best, theta);
        }
        if (!std::isfinite(best))
            return result;
        result.angles.theta[i] = best;
    }
    result.status = IkStatus::Ok;
    return result;
}

namespace {

struct FkState {
    Vec3 x; // tilt vector (2) + height
    Vec3 residual;
    bool valid = false;
};

PlatePose pose_of(const Vec3& x)
{
    return PlatePose::from_tilt_vector(x.head<2>(), x.z());
}

FkState fk_eval(const Vec3& x, const JointAngles& target, const CanfieldGeometry& geom)
{
    FkState s;
    s.x = x;
    const auto ik = inverse_kinematics(pose_of(x), geom);
    if (!ik.ok())
        return s;
    for (int i = 0; i < 3; ++i)
        s.residual[i] = ik.angles.theta[i] - target.theta[i];
    s.valid = true;
    return s;
}

} // namespace

FkResult forward_kinematics(const JointAngles& angles, const CanfieldGeometry& geom,
                            const PlatePose& seed_pose, const FkOptions& options)
{
    const double mean_theta = (angles.theta[0] + angles.theta[1] + angles.theta[2]) / 3.0;
    const double level_height = geom.max_height() * std::sin(mean_theta);

    std::vector<Vec3> starts;
    {
        const Vec2 tilt = seed_pose.tilt_vector();
        starts.emplace_back(tilt.x(), tilt.y(), seed_pose.height);
    }
    starts.emplace_back(0.0, 0.0, level_height);
    for (int k = 0; static_cast<int>(starts.size()) < options.starts; ++k) {
        const Vec2 dir = azimuth_direction(k * kPi / 3.0);
        starts.emplace_back(0.3 * dir.x(), 0.3 * dir.y(), level_height);
    }

    FkResult best;
    best.residual = std::numeric_limits<double>::infinity();
    int total_iterations = 0;

    for (const Vec3& start : starts) {
        FkState cur = fk_eval(start, angles, geom);
        if (!cur.valid) {
            const PlatePose clamped = clamp_to_feasible(pose_of(start), geom);
            const Vec2 t = clamped.tilt_vector();
            cur = fk_eval(Vec3(t.x(), t.y(), clamped.height), angles, geom);
            if (!cur.valid)
                continue;
        }

        double lambda = 1e-9;
        for (int it = 0; it < options.max_iterations; ++it) {
            ++total_iterations;
            if (cur.residual.cwiseAbs().maxCoeff() < options.tolerance)
                break;

            Eigen::Matrix3d jac;
            bool jac_ok = true;
            for (int j = 0; j < 3; ++j) {
                const double h = 1e-7;
                Vec3 xp = cur.x, xm = cur.x;
                xp[j] += h;
                xm[j] -= h;
                const FkState fp = fk_eval(xp, angles, geom);
                const FkState fm = fk_eval(xm, angles, geom);
                if (fp.valid && fm.valid)
                    jac.col(j) = (fp.residual - fm.residual) / (2.0 * h);
                else if (fp.valid)
                    jac.col(j) = (fp.residual - cur.residual) / h;
                else if (fm.valid)
                    jac.col(j) = (cur.residual - fm.residual) / h;
                else
                    jac_ok = false;
            }
            if (!jac_ok)
                break;

            const double f0 = cur.residual.squaredNorm();
            bool improved = false;
            for (int attempt = 0; attempt < 60 && !improved; ++attempt) {
                const Eigen::Matrix3d jtj = jac.transpose() * jac;
                const Eigen::Matrix3d lhs = jtj + lambda * Eigen::Matrix3d(jtj.diagonal().asDiagonal())
                                          + 1e-300 * Eigen::Matrix3d::Identity();
                const Vec3 step = lhs.ldlt().solve(-jac.transpose() * cur.residual);
                for (double alpha = 1.0; alpha > 1e-6; alpha *= 0.5) {
                    const FkState trial = fk_eval(cur.x + alpha * step, angles, geom);
                    if (trial.valid && trial.residual.squaredNorm() < f0) {
                        cur = trial;
                        improved = true;
                        break;
                    }
                }
                if (improved)
                    lambda = std::max(lambda * 0.1, 1e-12);
                else
                    lambda *= 10.0;
            }
            if (!improved)
                break;
        }

        const double res = cur.residual.cwiseAbs().maxCoeff();
        if (res < best.residual) {
            best.residual = res;
            best.pose = pose_of(cur.x);
        }
        if (res < options.tolerance)
            break;
    }

    best.converged = best.residual < options.tolerance;
    best.iterations = total_iterations;
    if (best.pose.psi < 1e-9)
        best.pose.delta = 0.0;
    return best;
}

Vec2 WorkspaceBand::cell_center(int ix, int iy) const
{
    const double h = cell_size();
    return {-psi_extent + (ix + 0.5) * h, -psi_extent + (iy + 0.5) * h};
}

std::pair<double, double> WorkspaceBand::half_areas(double axis_delta) const
{
    const double cell_area = cell_size() * cell_size();
    double front = 0.0, back = 0.0;
    for (int iy = 0; iy < resolution; ++iy) {
        for (int ix = 0; ix < resolution; ++ix) {
            if (!at(ix, iy))
                continue;
            const Vec2 c = cell_center(ix, iy);
            const double side = c.x() * std::cos(axis_delta) + c.y() * std::sin(axis_delta);
            if (side > 0.0)
                front += cell_area;
            else if (side < 0.0)
                back += cell_area;
            else {
                front += 0.5 * cell_area;
                back += 0.5 * cell_area;
            }
        }
    }
    return {front, back};
}

double WorkspaceBand::sector_area(double lo, double hi) const
{
    const double cell_area = cell_size() * cell_size();
    double area = 0.0;
    for (int iy = 0; iy < resolution; ++iy) {
        for (int ix = 0; ix < resolution; ++ix) {
            if (!at(ix, iy))
                continue;
            const Vec2 c = cell_center(ix, iy);
            const double d = wrap_two_pi(std::atan2(c.y(), c.x()));
            if (d >= lo && d < hi)
                area += cell_area;
        }
    }
    return area;
}

WorkspaceBand workspace_area(double h_low, double h_high, const CanfieldGeometry& geom,
                             const WorkspaceOptions& options)
{
    if (!(h_low > 0.0 && h_low < h_high && h_high <= geom.max_height()))
        throw Error("workspace_area: band must satisfy 0 < h_low < h_high <= 2l");
    if (options.resolution < 1 || options.height_samples < 2)
        throw Error("workspace_area: resolution and height samples must be positive");

    WorkspaceBand band;
    band.h_low = h_low;
    band.h_high = h_high;
    band.resolution = options.resolution;
    band.height_samples = options.height_samples;
    band.psi_extent = options.psi_extent;
    band.feasible.assign(static_cast<size_t>(options.resolution) * options.resolution, 0);
    band.total_area = 4.0 * options.psi_extent * options.psi_extent;

    const double cell_area = band.cell_size() * band.cell_size();
    for (int iy = 0; iy < band.resolution; ++iy) {
        for (int ix = 0; ix < band.resolution; ++ix) {
            const Vec2 c = band.cell_center(ix, iy);
            PlatePose pose;
            pose.psi = c.norm();
            if (pose.psi >= 0.5 * kPi)
                continue;
            pose.delta = wrap_two_pi(std::atan2(c.y(), c.x()));
            bool ok = true;
            for (int k = 0; k < band.height_samples && ok; ++k) {
                pose.height = h_low + (h_high - h_low) * k / (band.height_samples - 1);
                ok = inverse_kinematics(pose, geom).ok();
            }
            if (ok) {
                band.feasible[static_cast<size_t>(iy) * band.resolution + ix] = 1;
                band.feasible_area += cell_area;
            }
        }
    }
    return band;
}

Mat3 plate_rotation(const PlatePose& pose)
{
    // Tilt axis lies at azimuth delta + pi/2, so positive psi lifts the edge
    // facing azimuth_direction(delta).
    const Vec3 axis(std::cos(pose.delta), -std::sin(pose.delta), 0.0);
    return Eigen::AngleAxisd(pose.psi, axis).toRotationMatrix();
}

std::array<Vec3, 4> plate_polygon(const PlatePose& pose, const Vec2& module_origin,
                                  const CanfieldGeometry& geom)
{
    const double h = 0.5 * geom.plate_side;
    const Mat3 rot = plate_rotation(pose);
    const Vec3 center(module_origin.x(), module_origin.y(), pose.height);
    const std::array<Vec3, 4> local{Vec3(-h, -h, 0.0), Vec3(h, -h, 0.0), Vec3(h, h, 0.0), Vec3(-h, h, 0.0)};
    std::array<Vec3, 4> out;
    for (int i = 0; i < 4; ++i)
        out[i] = center + rot * local[i];
    return out;
}

PlatePose clamp_to_feasible(const PlatePose& pose, const CanfieldGeometry& geom, int iterations)
{
    if (is_feasible(pose, geom))
        return pose;

    const double h_max = geom.max_height();
    const double anchor_h = std::clamp(pose.height, 0.02 * h_max, 0.98 * h_max);
    const Vec2 target_tilt = pose.tilt_vector();

    auto at = [&](double lambda) {
        return PlatePose::from_tilt_vector(lambda * target_tilt,
                                           anchor_h + lambda * (pose.height - anchor_h));
    };

    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (is_feasible(at(mid), geom))
            lo = mid;
        else
            hi = mid;
    }
    PlatePose out = at(lo);
    if (out.psi == 0.0)
        out.delta = pose.delta;
    return out;
}

} // namespace orisurf
