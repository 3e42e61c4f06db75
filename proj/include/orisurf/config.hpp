#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "orisurf/optimizer.hpp"

namespace orisurf {

using Json = nlohmann::ordered_json;

class ConfigError : public Error {
public:
    using Error::Error;
};

struct OutputPaths {
    std::string trajectory = "trajectory.csv";
    std::string sidecar = "trajectory.sidecar.json";
    std::string metrics = "metrics.json";
    std::string results = "sweep.csv";
};

struct SweepCase {
    ManipulationMode mode;
    CpgParams params;
};

struct SweepSpec {
    std::vector<double> masses{0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95};
    std::vector<double> width_spans{1.25, 2.5, 3.75, 5.0, 6.25, 7.5, 8.75};
    /// k / 50 for k = 1..50.
    std::vector<double> frictions = default_frictions();
    double height = 0.05;
    /// Empty means fast and smooth along +x, -x, +y, -y with the top-level params.
    std::vector<SweepCase> cases;

    static std::vector<double> default_frictions();
};

struct ExperimentConfig {
    std::uint64_t seed = 0;
    int rows = 5;
    int cols = 5;
    double spacing = 0.12;
    CanfieldGeometry geometry;
    std::optional<ObjectSpec> object;
    std::optional<ManipulationMode> mode;
    CpgParams params;
    /// Campaign JSON whose best entry supplies `params`; empty when unused.
    std::string campaign;
    SimConfig sim;
    ContactParams contact;
    OutputPaths output;
    SweepSpec sweep;

    /// Episode for `simulate`; requires object and mode.
    EpisodeSpec episode() const;
    /// Episode skeleton shared by sweep cells (object and mode filled per cell).
    EpisodeSpec base_episode() const;
    std::vector<SweepCase> sweep_cases() const;
};

/// Strict parse: unknown keys and wrong types raise ConfigError naming the field.
/// Relative campaign paths resolve against `base_dir`.
ExperimentConfig parse_config(const Json& j, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

Json to_json(const ExperimentConfig& cfg);
/// Canonical text of the config with every default filled in.
std::string normalized_config_text(const ExperimentConfig& cfg);

/// Seed precedence: explicit flag, then ORI_SEED, then the config value.
void apply_seed_override(ExperimentConfig& cfg, std::optional<std::uint64_t> flag_seed);
std::optional<std::uint64_t> env_seed();

Json params_to_json(const CpgParams& p);
CpgParams params_from_json(const Json& j, const std::string& where);
Json metrics_to_json(const ManipulationMetrics& m);

Json campaign_to_json(const Campaign& c);
Campaign campaign_from_json(const Json& j);
Campaign load_campaign(const std::string& path);

/// Log sidecar: normalized config, episode statistics and metrics.
Json sidecar_json(const ExperimentConfig& cfg, const TrajectoryLog& log, const ManipulationMetrics& m);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& text);

} // namespace orisurf
