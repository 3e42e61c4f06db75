#include "orisurf/cpg.hpp"

#include <cmath>

namespace orisurf {

std::array<double, CpgParams::kDim> CpgParams::to_array() const
{
    return {h_amp, psi_amp, freq, h0, psi0, sigma, phi, epsilon};
}

CpgParams CpgParams::from_array(const std::array<double, kDim>& v)
{
    return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
}

double cpg_height(double t, const CpgParams& p, double group_phase)
{
    return p.h_amp * std::sin(kTwoPi * p.freq * t + group_phase) + p.h0;
}

double cpg_inclination(double t, const CpgParams& p, double group_phase)
{
    return p.psi_amp * std::sin(kTwoPi * p.freq * t + group_phase + p.sigma) + p.psi0;
}

double effective_sigma(double sigma, HalfRange half_range)
{
    double s = wrap_two_pi(sigma);
    if (s >= kPi)
        s -= kPi;
    return half_range == HalfRange::Positive ? s : s + kPi;
}

PlatePose module_command(double t, const CpgParams& p, double group_phase, const ModuleDirection& dir)
{
    CpgParams q = p;
    q.sigma = effective_sigma(p.sigma, dir.half_range);
    return {dir.delta_cmd, cpg_inclination(t, q, group_phase), cpg_height(t, q, group_phase)};
}

PlatePose rest_pose(const CpgParams& p, const ModuleDirection& dir)
{
    return {dir.delta_cmd, p.psi0, p.h0};
}

bool cpg_feasible(const CpgParams& p, std::span<const ModuleDirection> directions,
                  const CanfieldGeometry& geom, int samples)
{
    if (!(p.freq > 0.0) || samples < 1)
        return false;
    const double period = p.period();
    for (const auto& dir : directions) {
        if (!is_feasible(rest_pose(p, dir), geom))
            return false;
        for (double group_phase : {0.0, p.phi}) {
            for (int k = 0; k < samples; ++k) {
                const double t = period * k / samples;
                if (!is_feasible(module_command(t, p, group_phase, dir), geom))
                    return false;
            }
        }
    }
    return true;
}

} // namespace orisurf
