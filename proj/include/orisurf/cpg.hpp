#pragma once

#include <array>
#include <span>
#include <string_view>

#include "orisurf/kinematics.hpp"

namespace orisurf {

/// The eight CPG parameters. Heights in meters, angles in radians, frequency in Hz.
struct CpgParams {
    double h_amp = 0.01;
    double psi_amp = 0.4;
    double freq = 0.5;
    double h0 = 0.03;
    double psi0 = 0.0;
    /// Height-to-inclination phase shift. [0, pi) pushes along the command axis,
    /// [pi, 2pi) against it.
    double sigma = 0.5 * kPi;
    /// Phase offset applied to group 2.
    double phi = kPi;
    /// Contact-ratio activation threshold.
    double epsilon = 0.3;

    static constexpr size_t kDim = 8;
    static constexpr std::array<std::string_view, kDim> kNames{
        "h_amp", "psi_amp", "freq", "h0", "psi0", "sigma", "phi", "epsilon"};

    std::array<double, kDim> to_array() const;
    static CpgParams from_array(const std::array<double, kDim>& v);

    double period() const { return 1.0 / freq; }
};

double cpg_height(double t, const CpgParams& p, double group_phase);
double cpg_inclination(double t, const CpgParams& p, double group_phase);

/// Which half of the sigma circle a module uses.
enum class HalfRange { Positive, Negative };

struct ModuleDirection {
    double delta_cmd = 0.0;
    HalfRange half_range = HalfRange::Positive;

    bool operator==(const ModuleDirection&) const = default;
};

/// Maps sigma into the half range selected for a module: [0, pi) or [pi, 2pi).
double effective_sigma(double sigma, HalfRange half_range);

PlatePose module_command(double t, const CpgParams& p, double group_phase, const ModuleDirection& dir);

/// Natural resting pose (h0, psi0) along the module's command azimuth.
PlatePose rest_pose(const CpgParams& p, const ModuleDirection& dir);

/// True when every command along one period (both group phases, `samples`
/// points each) and the rest pose pass inverse kinematics for all directions.
bool cpg_feasible(const CpgParams& p, std::span<const ModuleDirection> directions,
                  const CanfieldGeometry& geom, int samples = 64);

} // namespace orisurf
