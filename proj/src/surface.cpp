#include "orisurf/surface.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace orisurf {

ModuleGrid ModuleGrid::make(int rows, int cols, double spacing)
{
    if (rows < 1 || cols < 1)
        throw GridTooSmall("ModuleGrid: rows and cols must be positive");
    if (!(spacing > 0.0))
        throw Error("ModuleGrid: spacing must be positive");
    ModuleGrid g;
    g.rows = rows;
    g.cols = cols;
    g.spacing = spacing;
    g.modules.reserve(static_cast<size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            g.modules.push_back({i, j, Vec2(j * spacing, i * spacing), 1, {}});
    return g;
}

std::pair<Vec2, Vec2> ModuleGrid::bounds(double plate_side) const
{
    const double h = 0.5 * plate_side;
    return {Vec2(-h, -h), Vec2((cols - 1) * spacing + h, (rows - 1) * spacing + h)};
}

std::string TranslationDirection::label() const
{
    const char s = sign >= 0 ? '+' : '-';
    if (std::abs(azimuth) < 1e-12)
        return std::string(1, s) + "y";
    if (std::abs(azimuth - 0.5 * kPi) < 1e-12)
        return std::string(1, s) + "x";
    std::ostringstream os;
    os.precision(9);
    os << s << "az" << azimuth;
    return os.str();
}

namespace {

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    out.push_back(cur);
    return out;
}

TranslationDirection parse_direction(const std::string& tok)
{
    if (tok.size() < 2 || (tok[0] != '+' && tok[0] != '-'))
        throw Error("mode: direction must look like +x, -y or +az<radians>, got '" + tok + "'");
    const int sign = tok[0] == '+' ? 1 : -1;
    const std::string axis = tok.substr(1);
    if (axis == "x")
        return TranslationDirection::x(sign);
    if (axis == "y")
        return TranslationDirection::y(sign);
    if (axis.rfind("az", 0) == 0) {
        try {
            return {std::stod(axis.substr(2)), sign};
        } catch (const std::exception&) {
        }
    }
    throw Error("mode: unknown direction '" + tok + "'");
}

Profile parse_profile(const std::string& tok)
{
    if (tok == "fast")
        return Profile::Fast;
    if (tok == "smooth")
        return Profile::Smooth;
    throw Error("mode: unknown profile '" + tok + "'");
}

RotationSense parse_sense(const std::string& tok)
{
    if (tok == "cw")
        return RotationSense::CW;
    if (tok == "ccw")
        return RotationSense::CCW;
    throw Error("mode: rotation sense must be cw or ccw, got '" + tok + "'");
}

} // namespace

ManipulationMode ManipulationMode::parse(const std::string& text)
{
    const auto tok = split(text, ':');
    if (tok.empty() || tok[0].empty())
        throw Error("mode: empty mode string");
    if (tok[0] == "rotate" || tok[0] == "rotation") {
        if (tok.size() != 2)
            throw Error("mode: expected rotate:<cw|ccw>, got '" + text + "'");
        return rotate(parse_sense(tok[1]));
    }
    if (tok[0] == "translate") {
        if (tok.size() != 3)
            throw Error("mode: expected translate:<dir>:<fast|smooth>, got '" + text + "'");
        return translate(parse_direction(tok[1]), parse_profile(tok[2]));
    }
    if (tok[0] == "fast" || tok[0] == "smooth") {
        if (tok.size() != 2)
            throw Error("mode: expected <fast|smooth>:<dir>, got '" + text + "'");
        return translate(parse_direction(tok[1]), parse_profile(tok[0]));
    }
    throw Error("mode: unknown mode '" + text + "'");
}

std::string ManipulationMode::to_string() const
{
    if (kind == Kind::Rotate)
        return std::string("rotate:") + (sense == RotationSense::CW ? "cw" : "ccw");
    return "translate:" + direction.label() + ":" + (profile == Profile::Fast ? "fast" : "smooth");
}

ModuleGrid assign_translation(ModuleGrid grid, TranslationDirection dir)
{
    const ModuleDirection md{wrap_two_pi(dir.azimuth), dir.sign >= 0 ? HalfRange::Positive : HalfRange::Negative};
    for (auto& m : grid.modules) {
        m.group = 1 + (m.row + m.col) % 2;
        m.direction = md;
    }
    return grid;
}

ModuleGrid assign_rotation(ModuleGrid grid, RotationSense sense)
{
    if (grid.rows < 2 || grid.cols < 2)
        throw GridTooSmall("assign_rotation: grid must be at least 2x2");

    struct Quadrant {
        double angle; // center angle about the grid center, standard math convention
        int group;
        ModuleDirection dir;
    };
    // Clockwise layout with +Y as "top": X-pushers on the top-left/bottom-right
    // diagonal, Y-pushers on the other.
    const double x_az = 0.5 * kPi;
    const double y_az = 0.0;
    const std::array<Quadrant, 4> quadrants{{
        {0.75 * kPi, 1, {x_az, HalfRange::Positive}},  // top-left
        {-0.25 * kPi, 1, {x_az, HalfRange::Negative}}, // bottom-right
        {0.25 * kPi, 2, {y_az, HalfRange::Negative}},  // top-right
        {-0.75 * kPi, 2, {y_az, HalfRange::Positive}}, // bottom-left
    }};

    const Vec2 c = grid.center();
    for (auto& m : grid.modules) {
        const Vec2 rel = m.origin - c;
        if (rel.norm() < 1e-9 * grid.spacing) {
            m.group = 0;
            m.direction = {};
            continue;
        }
        const double ang = std::atan2(rel.y(), rel.x());
        int best = -1;
        double best_dist = 0.0;
        for (int q = 0; q < 4; ++q) {
            double d = std::abs(std::remainder(ang - quadrants[q].angle, kTwoPi));
            const bool tie = best >= 0 && std::abs(d - best_dist) < 1e-9;
            if (best < 0 || (!tie && d < best_dist) || (tie && quadrants[q].group < quadrants[best].group)) {
                best = q;
                best_dist = d;
            }
        }
        m.group = quadrants[best].group;
        m.direction = quadrants[best].dir;
        if (sense == RotationSense::CCW)
            m.direction.half_range = m.direction.half_range == HalfRange::Positive ? HalfRange::Negative
                                                                                   : HalfRange::Positive;
    }
    return grid;
}

ModuleGrid assign_mode(ModuleGrid grid, const ManipulationMode& mode)
{
    if (mode.kind == ManipulationMode::Kind::Rotate)
        return assign_rotation(std::move(grid), mode.sense);
    return assign_translation(std::move(grid), mode.direction);
}

std::vector<ModuleDirection> distinct_directions(const ModuleGrid& grid)
{
    std::vector<ModuleDirection> out;
    for (const auto& m : grid.modules) {
        if (std::find(out.begin(), out.end(), m.direction) == out.end())
            out.push_back(m.direction);
    }
    return out;
}

double contact_ratio(const Polygon& plate, const Polygon& footprint)
{
    const double plate_area = area(plate);
    if (plate_area < 1e-15)
        throw DegeneratePolygon("contact_ratio: plate polygon has zero area");
    const double covered = area(clip_convex(plate, footprint));
    return std::clamp(covered / plate_area, 0.0, 1.0);
}

double quantize_to_tick(double t, double controller_period)
{
    return std::floor(t / controller_period + 1e-9) * controller_period;
}

ControllerOutput controller_step(double t, const Polygon& footprint, const ModuleGrid& grid,
                                 const CpgParams& params, const CanfieldGeometry& geom)
{
    ControllerOutput out;
    const size_t n = grid.size();
    out.commands.resize(n);
    out.active.assign(n, 0);
    out.saturated.assign(n, 0);

    for (size_t i = 0; i < n; ++i) {
        const ModuleSlot& m = grid.modules[i];
        PlatePose cmd = rest_pose(params, m.direction);
        if (m.group != 0 && footprint.size() >= 3) {
            const double ratio = contact_ratio(square(m.origin, geom.plate_side), footprint);
            if (ratio >= params.epsilon) {
                const double group_phase = m.group == 2 ? params.phi : 0.0;
                cmd = module_command(t, params, group_phase, m.direction);
                out.active[i] = 1;
            }
        }
        if (!is_feasible(cmd, geom)) {
            cmd = clamp_to_feasible(cmd, geom);
            out.saturated[i] = 1;
        }
        out.commands[i] = cmd;
    }
    return out;
}

} // namespace orisurf
