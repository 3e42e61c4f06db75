#pragma once

#include <string>
#include <vector>

#include "orisurf/cpg.hpp"
#include "orisurf/polygon.hpp"

namespace orisurf {

class GridTooSmall : public Error {
public:
    using Error::Error;
};

class DegeneratePolygon : public Error {
public:
    using Error::Error;
};

struct ModuleSlot {
    int row = 0;
    int col = 0;
    Vec2 origin = Vec2::Zero();
    /// 1 or 2; 0 marks a module that is always held at rest.
    int group = 1;
    ModuleDirection direction;
};

/// Regular grid of modules; origin(i, j) = (j * spacing, i * spacing).
struct ModuleGrid {
    int rows = 5;
    int cols = 5;
    double spacing = 0.120;
    std::vector<ModuleSlot> modules;

    static ModuleGrid make(int rows, int cols, double spacing);

    const ModuleSlot& at(int row, int col) const { return modules[static_cast<size_t>(row) * cols + col]; }
    size_t size() const { return modules.size(); }
    Vec2 center() const { return {0.5 * (cols - 1) * spacing, 0.5 * (rows - 1) * spacing}; }
    /// Outer boundary of the plates: (min corner, max corner).
    std::pair<Vec2, Vec2> bounds(double plate_side) const;
};

enum class RotationSense { CW, CCW };
enum class Profile { Fast, Smooth };

/// Planar translation along azimuth `azimuth` (0 = Y axis, pi/2 = X axis),
/// in the direction given by `sign`.
struct TranslationDirection {
    double azimuth = 0.0;
    int sign = 1;

    static TranslationDirection x(int sign) { return {0.5 * kPi, sign}; }
    static TranslationDirection y(int sign) { return {0.0, sign}; }
    /// World-frame unit vector of the commanded motion.
    Vec2 unit() const { return static_cast<double>(sign) * azimuth_direction(azimuth); }
    std::string label() const;
};

struct ManipulationMode {
    enum class Kind { Translate, Rotate };

    Kind kind = Kind::Translate;
    TranslationDirection direction;
    RotationSense sense = RotationSense::CW;
    Profile profile = Profile::Fast;

    static ManipulationMode translate(TranslationDirection dir, Profile profile)
    {
        return {Kind::Translate, dir, RotationSense::CW, profile};
    }
    static ManipulationMode rotate(RotationSense sense) { return {Kind::Rotate, {}, sense, Profile::Fast}; }

    /// Parses "translate:+y:fast", "fast:+x", "smooth:-y", "rotate:cw", "rotation:ccw".
    static ManipulationMode parse(const std::string& text);
    std::string to_string() const;
};

ModuleGrid assign_translation(ModuleGrid grid, TranslationDirection dir);
ModuleGrid assign_rotation(ModuleGrid grid, RotationSense sense);
ModuleGrid assign_mode(ModuleGrid grid, const ManipulationMode& mode);

/// Distinct module directions used by an assigned grid.
std::vector<ModuleDirection> distinct_directions(const ModuleGrid& grid);

/// area(plate ∩ footprint) / area(plate) for convex CCW polygons.
double contact_ratio(const Polygon& plate, const Polygon& footprint);

struct ControllerOutput {
    std::vector<PlatePose> commands;
    std::vector<unsigned char> active;
    std::vector<unsigned char> saturated;
};

/// Snaps `t` down to the controller clock.
double quantize_to_tick(double t, double controller_period);

/// One tick of the activation-gated controller. Modules whose nominal plate
/// is covered by at least epsilon run the CPG; the rest (and group 0) hold the
/// rest pose. Infeasible commands are clamped and flagged.
ControllerOutput controller_step(double t, const Polygon& footprint, const ModuleGrid& grid,
                                 const CpgParams& params, const CanfieldGeometry& geom);

} // namespace orisurf
