// orisurf: command-line front end for the origami surface simulator.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "orisurf/config.hpp"
#include "orisurf/sweep.hpp"

using namespace orisurf;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSim = 3;

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write '" + path + "'");
    out << content;
}

std::ostream& open_out(const std::string& path, std::ofstream& file)
{
    if (path.empty() || path == "-")
        return std::cout;
    file.open(path);
    if (!file)
        throw ConfigError("cannot write '" + path + "'");
    return file;
}

std::optional<std::uint64_t> seed_flag(const CLI::Option* opt, std::uint64_t value)
{
    return opt->count() ? std::optional<std::uint64_t>(value) : std::nullopt;
}

int run_ik(double delta, double psi, double height, bool with_fk)
{
    const CanfieldGeometry geom;
    const PlatePose pose{delta, psi, height};
    const IkResult ik = inverse_kinematics(pose, geom);
    Json j{{"delta", delta}, {"psi", psi}, {"height", height}, {"feasible", ik.ok()}};
    if (ik.ok()) {
        j["theta"] = {ik.angles.theta[0], ik.angles.theta[1], ik.angles.theta[2]};
        if (with_fk) {
            const FkResult fk = forward_kinematics(ik.angles, geom, pose);
            j["fk"] = Json{{"delta", fk.pose.delta},
                           {"psi", fk.pose.psi},
                           {"height", fk.pose.height},
                           {"residual", fk.residual},
                           {"converged", fk.converged}};
        }
    }
    std::cout << j.dump() << '\n';
    return ik.ok() ? 0 : 1;
}

int run_workspace(double h_low, double h_high, int resolution, int height_samples, const std::string& out_path)
{
    WorkspaceOptions opt;
    opt.resolution = resolution;
    opt.height_samples = height_samples;
    const WorkspaceBand band = workspace_area(h_low, h_high, CanfieldGeometry{}, opt);
    std::ofstream file;
    std::ostream& os = open_out(out_path, file);
    os << "# feasible_area=" << format_number(band.feasible_area) << " total_area=" << format_number(band.total_area)
       << '\n';
    os << "psi_x,psi_y,feasible\n";
    for (int iy = 0; iy < band.resolution; ++iy)
        for (int ix = 0; ix < band.resolution; ++ix) {
            const Vec2 c = band.cell_center(ix, iy);
            os << format_number(c.x()) << ',' << format_number(c.y()) << ',' << (band.at(ix, iy) ? 1 : 0) << '\n';
        }
    return 0;
}

int run_cpg_trace(const std::string& config_path, const std::string& mode_text, double duration, double rate,
                  const std::string& out_path)
{
    CpgParams p;
    if (!config_path.empty())
        p = load_config(config_path).params;
    const ManipulationMode mode = ManipulationMode::parse(mode_text);
    ModuleDirection dir{0.0, HalfRange::Positive};
    if (mode.kind == ManipulationMode::Kind::Translate) {
        const ModuleGrid g = assign_translation(ModuleGrid::make(1, 1, 0.12), mode.direction);
        dir = g.modules[0].direction;
    }
    if (!(duration > 0.0) || !(rate > 0.0))
        throw ConfigError("duration and rate must be positive");
    std::ofstream file;
    std::ostream& os = open_out(out_path, file);
    os << "t,group1_height,group1_psi,group2_height,group2_psi\n";
    const long long n = std::llround(duration * rate);
    for (long long k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) / rate;
        const PlatePose a = module_command(t, p, 0.0, dir);
        const PlatePose b = module_command(t, p, p.phi, dir);
        os << format_number(t) << ',' << format_number(a.height) << ',' << format_number(a.psi) << ','
           << format_number(b.height) << ',' << format_number(b.psi) << '\n';
    }
    return 0;
}

int run_simulate(ExperimentConfig cfg, const std::string& trajectory, const std::string& metrics_path)
{
    if (!trajectory.empty()) {
        cfg.output.trajectory = trajectory;
        cfg.output.sidecar = std::filesystem::path(trajectory).replace_extension(".sidecar.json").string();
    }
    if (!metrics_path.empty())
        cfg.output.metrics = metrics_path;
    const EpisodeSpec spec = cfg.episode();
    TrajectoryLog log;
    try {
        log = simulate_episode(spec);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        std::cerr << "simulation error: " << e.what() << '\n';
        return kExitSim;
    }
    const auto rows = pose_rows(log);
    const ManipulationMetrics m = compute_metrics(std::span<const PoseRow>(rows));
    std::ofstream csv(cfg.output.trajectory);
    if (!csv)
        throw ConfigError("cannot write '" + cfg.output.trajectory + "'");
    write_trajectory_csv(csv, rows);
    write_file(cfg.output.sidecar, sidecar_json(cfg, log, m).dump(2) + "\n");
    Json mj = metrics_to_json(m);
    mj["J"] = cost(m, mode_presets(spec.mode).weights);
    write_file(cfg.output.metrics, mj.dump(2) + "\n");
    return 0;
}

int run_metrics(const std::string& in_path, const std::string& mode_text, const std::string& out_path)
{
    std::ifstream in(in_path);
    if (!in)
        throw ConfigError("cannot open trajectory '" + in_path + "'");
    std::vector<PoseRow> rows;
    try {
        rows = read_trajectory_csv(in);
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
    const ManipulationMetrics m = compute_metrics(std::span<const PoseRow>(rows));
    Json j = metrics_to_json(m);
    if (!mode_text.empty())
        j["J"] = cost(m, mode_presets(ManipulationMode::parse(mode_text)).weights);
    const SpreadStats s = spread_stats(std::span<const PoseRow>(rows));
    j["z_std"] = s.z_std;
    j["roll_std"] = s.roll_std;
    j["pitch_std"] = s.pitch_std;
    std::ofstream file;
    open_out(out_path, file) << j.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Origami robotic surface: kinematics, CPG control, simulation and parameter search"};
    app.require_subcommand(1);

    // ik
    auto* ik = app.add_subcommand("ik", "Inverse kinematics of one module");
    double ik_delta = 0.0, ik_psi = 0.0, ik_height = 0.03;
    bool ik_fk = false;
    ik->add_option("--delta", ik_delta, "Tilt azimuth (rad)");
    ik->add_option("--psi", ik_psi, "Tilt magnitude (rad)");
    ik->add_option("--height", ik_height, "Plate center height (m)");
    ik->add_flag("--fk", ik_fk, "Also run forward kinematics on the result");

    // workspace
    auto* ws = app.add_subcommand("workspace", "Feasible (psi_x, psi_y) raster for a height band");
    double ws_low = 0.025, ws_high = 0.040;
    int ws_res = 64, ws_heights = 16;
    std::string ws_out;
    ws->add_option("--h-low", ws_low, "Band lower height (m)");
    ws->add_option("--h-high", ws_high, "Band upper height (m)");
    ws->add_option("--resolution", ws_res, "Raster cells per axis");
    ws->add_option("--height-samples", ws_heights, "Heights tested per cell");
    ws->add_option("--out", ws_out, "Output CSV (default stdout)");

    // cpg-trace
    auto* trace = app.add_subcommand("cpg-trace", "Sample the CPG commands of both groups");
    std::string trace_config, trace_mode = "translate:+y:fast", trace_out;
    double trace_duration = 5.0, trace_rate = 20.0;
    trace->add_option("--config", trace_config, "Config file supplying params");
    trace->add_option("--mode", trace_mode, "Translation mode selecting the sigma half range");
    trace->add_option("--duration", trace_duration, "Trace length (s)");
    trace->add_option("--rate", trace_rate, "Samples per second");
    trace->add_option("--out", trace_out, "Output CSV (default stdout)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run one episode from a config file");
    std::string sim_config, sim_traj, sim_metrics;
    std::uint64_t sim_seed = 0;
    sim->add_option("--config", sim_config, "Experiment config (JSON)")->required();
    sim->add_option("--trajectory", sim_traj, "Override output.trajectory; the sidecar goes beside it as <stem>.sidecar.json");
    sim->add_option("--metrics", sim_metrics, "Override output.metrics");
    auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "Override the config seed");

    // metrics
    auto* met = app.add_subcommand("metrics", "Metrics of a trajectory CSV");
    std::string met_in, met_mode, met_out;
    met->add_option("--in", met_in, "Trajectory CSV")->required();
    met->add_option("--mode", met_mode, "Mode whose cost preset is reported as J");
    met->add_option("--out", met_out, "Output JSON (default stdout)");

    // optimize
    auto* opt = app.add_subcommand("optimize", "Parameter search campaign for one mode");
    std::string opt_mode = "fast:+y", opt_object = "box:0.3x0.3x0.01:0.254", opt_out = "campaign.json";
    std::string opt_strategy = "evolutionary", opt_config;
    size_t opt_budget = 200;
    std::uint64_t opt_seed = 0;
    unsigned opt_jobs = 0;
    opt->add_option("--mode", opt_mode, "Mode, e.g. fast:+y, smooth:-x, rotate:cw");
    opt->add_option("--object", opt_object, "Object, box:SXxSYxSZ:MASS");
    opt->add_option("--budget", opt_budget, "Episode evaluations");
    auto* opt_seed_opt = opt->add_option("--seed", opt_seed, "Campaign seed");
    opt->add_option("--strategy", opt_strategy, "evolutionary or random");
    opt->add_option("--jobs", opt_jobs, "Worker threads (0 = all cores)");
    opt->add_option("--config", opt_config, "Base config for grid, sim and contact settings");
    opt->add_option("--out", opt_out, "Campaign JSON");

    // sweeps
    std::string sw_config, sw_out;
    unsigned sw_jobs = 0;
    std::uint64_t sw_seed = 0;
    auto* smw = app.add_subcommand("sweep-mass-width", "Mass x width robustness sweep");
    auto* sfr = app.add_subcommand("sweep-friction", "Friction robustness sweep");
    CLI::Option* sw_seed_opts[2];
    int k = 0;
    for (auto* s : {smw, sfr}) {
        s->add_option("--config", sw_config, "Experiment config with a sweep section")->required();
        s->add_option("--out", sw_out, "Results CSV (default output.results)");
        s->add_option("--jobs", sw_jobs, "Worker threads (0 = all cores)");
        sw_seed_opts[k++] = s->add_option("--seed", sw_seed, "Override the config seed");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*ik)
            return run_ik(ik_delta, ik_psi, ik_height, ik_fk);
        if (*ws)
            return run_workspace(ws_low, ws_high, ws_res, ws_heights, ws_out);
        if (*trace)
            return run_cpg_trace(trace_config, trace_mode, trace_duration, trace_rate, trace_out);
        if (*sim) {
            ExperimentConfig cfg = load_config(sim_config);
            apply_seed_override(cfg, seed_flag(sim_seed_opt, sim_seed));
            return run_simulate(cfg, sim_traj, sim_metrics);
        }
        if (*met)
            return run_metrics(met_in, met_mode, met_out);
        if (*opt) {
            ExperimentConfig cfg = opt_config.empty() ? ExperimentConfig{} : load_config(opt_config);
            apply_seed_override(cfg, seed_flag(opt_seed_opt, opt_seed));
            cfg.mode = ManipulationMode::parse(opt_mode);
            cfg.object = ObjectSpec::parse(opt_object);
            OptimizeOptions o;
            o.budget = opt_budget;
            o.seed = cfg.seed;
            o.strategy = parse_strategy(opt_strategy);
            o.jobs = opt_jobs;
            if (o.budget < 1)
                throw ConfigError("--budget must be at least 1");
            const Campaign c = optimize(EvaluationContext::for_mode(cfg.episode()), o);
            write_file(opt_out, campaign_to_json(c).dump(2) + "\n");
            const auto& best = c.best();
            std::cout << "best J=" << format_number(best.evaluation.J) << " v=" << format_number(best.evaluation.metrics.v)
                      << " after " << c.history.size() << " evaluations\n";
            return 0;
        }
        if (*smw || *sfr) {
            const SweepKind kind = *smw ? SweepKind::MassWidth : SweepKind::Friction;
            ExperimentConfig cfg = load_config(sw_config);
            apply_seed_override(cfg, seed_flag(sw_seed_opts[*smw ? 0 : 1], sw_seed));
            const std::string out = sw_out.empty() ? cfg.output.results : sw_out;
            const SweepReport r = run_sweep(cfg, kind, out, sw_jobs);
            std::cout << r.run << " cells run, " << r.skipped << " already present, " << r.failed << " failed\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}
