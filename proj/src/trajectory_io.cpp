#include "orisurf/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace orisurf {

EulerZYX euler_zyx(const Quat& q_in)
{
    const Quat q = q_in.normalized();
    const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
    EulerZYX e;
    e.roll = std::atan2(2.0 * (w * x + y * z), 1.0 - 2.0 * (x * x + y * y));
    const double sp = std::clamp(2.0 * (w * y - z * x), -1.0, 1.0);
    e.pitch = std::asin(sp);
    e.yaw = std::atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z));
    return e;
}

std::vector<PoseRow> pose_rows(const TrajectoryLog& log)
{
    std::vector<PoseRow> rows;
    rows.reserve(log.samples.size());
    double prev_raw = 0.0;
    double unwrapped = 0.0;
    for (size_t i = 0; i < log.samples.size(); ++i) {
        const auto& s = log.samples[i];
        PoseRow r;
        r.t = s.t;
        r.position = s.position;
        r.euler = euler_zyx(s.orientation);
        if (i == 0) {
            unwrapped = r.euler.yaw;
        } else {
            unwrapped += std::remainder(r.euler.yaw - prev_raw, kTwoPi);
        }
        prev_raw = r.euler.yaw;
        r.euler.yaw = unwrapped;
        r.linear_velocity = s.linear_velocity;
        r.angular_velocity = s.angular_velocity;
        rows.push_back(r);
    }
    return rows;
}

std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const std::vector<PoseRow>& rows)
{
    os << "t,x,y,z,roll,pitch,yaw,vx,vy,vz,wx,wy,wz\n";
    for (const auto& r : rows) {
        const double vals[13] = {r.t,
                                 r.position.x(),
                                 r.position.y(),
                                 r.position.z(),
                                 r.euler.roll,
                                 r.euler.pitch,
                                 r.euler.yaw,
                                 r.linear_velocity.x(),
                                 r.linear_velocity.y(),
                                 r.linear_velocity.z(),
                                 r.angular_velocity.x(),
                                 r.angular_velocity.y(),
                                 r.angular_velocity.z()};
        for (int i = 0; i < 13; ++i) {
            if (i)
                os << ',';
            os << format_number(vals[i]);
        }
        os << '\n';
    }
}

std::vector<PoseRow> read_trajectory_csv(std::istream& is)
{
    std::vector<PoseRow> rows;
    std::string line;
    if (!std::getline(is, line))
        return rows;
    if (line.rfind("t,x,y,z,roll,pitch,yaw", 0) != 0)
        throw std::runtime_error("trajectory CSV: unexpected header '" + line + "'");
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::stringstream ss(line);
        std::string cell;
        double v[13];
        int n = 0;
        while (std::getline(ss, cell, ',') && n < 13) {
            try {
                v[n++] = std::stod(cell);
            } catch (const std::exception&) {
                throw std::runtime_error("trajectory CSV: bad number on line " + std::to_string(lineno));
            }
        }
        if (n != 13)
            throw std::runtime_error("trajectory CSV: expected 13 columns on line " + std::to_string(lineno));
        PoseRow r;
        r.t = v[0];
        r.position = {v[1], v[2], v[3]};
        r.euler = {v[4], v[5], v[6]};
        r.linear_velocity = {v[7], v[8], v[9]};
        r.angular_velocity = {v[10], v[11], v[12]};
        rows.push_back(r);
    }
    return rows;
}

} // namespace orisurf
