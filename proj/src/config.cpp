#include "orisurf/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

namespace orisurf {

namespace {

std::string join(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

void require_object(const Json& j, const std::string& where)
{
    if (!j.is_object())
        throw ConfigError(where + ": expected an object");
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where)
{
    require_object(j, where.empty() ? "config" : where);
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items())
        if (!ok.count(key))
            throw ConfigError("unknown key '" + join(where, key) + "'");
}

double number(const Json& j, const char* key, const std::string& where, double fallback)
{
    if (!j.contains(key))
        return fallback;
    const Json& v = j.at(key);
    if (!v.is_number())
        throw ConfigError(join(where, key) + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x))
        throw ConfigError(join(where, key) + ": must be finite");
    return x;
}

int integer(const Json& j, const char* key, const std::string& where, int fallback)
{
    if (!j.contains(key))
        return fallback;
    const Json& v = j.at(key);
    if (!v.is_number_integer())
        throw ConfigError(join(where, key) + ": expected an integer");
    return v.get<int>();
}

std::string text(const Json& j, const char* key, const std::string& where, const std::string& fallback)
{
    if (!j.contains(key))
        return fallback;
    const Json& v = j.at(key);
    if (!v.is_string())
        throw ConfigError(join(where, key) + ": expected a string");
    return v.get<std::string>();
}

std::vector<double> numbers(const Json& j, const char* key, const std::string& where, std::vector<double> fallback)
{
    if (!j.contains(key))
        return fallback;
    const Json& v = j.at(key);
    if (!v.is_array())
        throw ConfigError(join(where, key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number())
            throw ConfigError(join(where, key) + ": expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

ManipulationMode parse_mode(const Json& j, const std::string& where)
{
    if (!j.is_string())
        throw ConfigError(where + ": expected a mode string such as \"translate:+y:fast\"");
    try {
        return ManipulationMode::parse(j.get<std::string>());
    } catch (const Error& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

ObjectSpec parse_object(const Json& j)
{
    const std::string where = "object";
    check_keys(j, {"shape", "size", "mass"}, where);
    if (text(j, "shape", where, "box") != "box")
        throw ConfigError("object.shape: only \"box\" is supported");
    if (!j.contains("size"))
        throw ConfigError("object.size: missing");
    if (!j.contains("mass"))
        throw ConfigError("object.mass: missing");
    const auto size = numbers(j, "size", where, {});
    if (size.size() != 3)
        throw ConfigError("object.size: expected [x, y, z]");
    ObjectSpec spec;
    spec.size = Vec3(size[0], size[1], size[2]);
    spec.mass = number(j, "mass", where, 0.0);
    try {
        spec.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("object: ") + e.what());
    }
    return spec;
}

Json object_to_json(const ObjectSpec& o)
{
    return Json{{"shape", "box"}, {"size", {o.size.x(), o.size.y(), o.size.z()}}, {"mass", o.mass}};
}

Json mode_json(const ManipulationMode& m) { return m.to_string(); }

template <class Fn>
void rethrow_as_config(const std::string& where, Fn&& fn)
{
    try {
        fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

} // namespace

std::vector<double> SweepSpec::default_frictions()
{
    std::vector<double> out;
    for (int k = 1; k <= 50; ++k)
        out.push_back(k / 50.0);
    return out;
}

EpisodeSpec ExperimentConfig::base_episode() const
{
    EpisodeSpec e;
    e.sim = sim;
    e.sim.seed = seed;
    e.contact = contact;
    e.geometry = geometry;
    e.rows = rows;
    e.cols = cols;
    e.spacing = spacing;
    e.params = params;
    if (mode)
        e.mode = *mode;
    if (object)
        e.object = *object;
    return e;
}

EpisodeSpec ExperimentConfig::episode() const
{
    if (!object)
        throw ConfigError("object: missing object spec");
    if (!mode)
        throw ConfigError("mode: missing manipulation mode");
    return base_episode();
}

std::vector<SweepCase> ExperimentConfig::sweep_cases() const
{
    if (!sweep.cases.empty())
        return sweep.cases;
    std::vector<SweepCase> out;
    for (Profile profile : {Profile::Fast, Profile::Smooth})
        for (auto dir : {TranslationDirection::x(1), TranslationDirection::x(-1), TranslationDirection::y(1),
                         TranslationDirection::y(-1)})
            out.push_back({ManipulationMode::translate(dir, profile), params});
    return out;
}

Json params_to_json(const CpgParams& p)
{
    Json j;
    const auto v = p.to_array();
    for (size_t i = 0; i < v.size(); ++i)
        j[std::string(CpgParams::kNames[i])] = v[i];
    return j;
}

CpgParams params_from_json(const Json& j, const std::string& where)
{
    require_object(j, where);
    auto v = CpgParams{}.to_array();
    std::set<std::string> names;
    for (size_t i = 0; i < v.size(); ++i) {
        const std::string name(CpgParams::kNames[i]);
        names.insert(name);
        v[i] = number(j, name.c_str(), where, v[i]);
    }
    for (const auto& [key, value] : j.items())
        if (!names.count(key))
            throw ConfigError("unknown key '" + join(where, key) + "'");
    return CpgParams::from_array(v);
}

Json metrics_to_json(const ManipulationMetrics& m)
{
    return Json{{"v", m.v}, {"omega", m.omega}, {"max_roll", m.max_roll}, {"max_pitch", m.max_pitch}, {"max_z", m.max_z}};
}

namespace {

ManipulationMetrics metrics_from_json(const Json& j)
{
    ManipulationMetrics m;
    m.v = number(j, "v", "metrics", 0.0);
    m.omega = number(j, "omega", "metrics", 0.0);
    m.max_roll = number(j, "max_roll", "metrics", 0.0);
    m.max_pitch = number(j, "max_pitch", "metrics", 0.0);
    m.max_z = number(j, "max_z", "metrics", 0.0);
    return m;
}

} // namespace

Json campaign_to_json(const Campaign& c)
{
    Json history = Json::array();
    for (size_t i = 0; i < c.history.size(); ++i) {
        const auto& e = c.history[i];
        history.push_back(Json{{"index", i},
                               {"generation", e.generation},
                               {"params", params_to_json(e.params)},
                               {"metrics", metrics_to_json(e.evaluation.metrics)},
                               {"J", e.evaluation.J},
                               {"status", e.evaluation.status}});
    }
    Json j{{"mode", c.mode},     {"object", c.object}, {"budget", c.budget},
           {"seed", c.seed},     {"strategy", to_string(c.strategy)}};
    if (!c.history.empty()) {
        const size_t b = c.best_index();
        j["best_index"] = b;
        j["best"] = Json{{"params", params_to_json(c.history[b].params)},
                         {"metrics", metrics_to_json(c.history[b].evaluation.metrics)},
                         {"J", c.history[b].evaluation.J}};
    }
    j["history"] = std::move(history);
    return j;
}

Campaign campaign_from_json(const Json& j)
{
    require_object(j, "campaign");
    Campaign c;
    c.mode = text(j, "mode", "campaign", "");
    c.object = text(j, "object", "campaign", "");
    c.budget = static_cast<size_t>(number(j, "budget", "campaign", 0.0));
    if (j.contains("seed"))
        c.seed = j.at("seed").get<std::uint64_t>();
    c.strategy = parse_strategy(text(j, "strategy", "campaign", "evolutionary"));
    if (!j.contains("history") || !j.at("history").is_array())
        throw ConfigError("campaign.history: expected an array");
    for (const auto& e : j.at("history")) {
        CampaignEntry entry;
        entry.generation = integer(e, "generation", "campaign.history", 0);
        entry.params = params_from_json(e.at("params"), "campaign.history.params");
        entry.evaluation.metrics = metrics_from_json(e.at("metrics"));
        entry.evaluation.J = number(e, "J", "campaign.history", kPenalty);
        entry.evaluation.status = text(e, "status", "campaign.history", "ok");
        c.history.push_back(std::move(entry));
    }
    return c;
}

Campaign load_campaign(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("campaign: cannot open '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("campaign '" + path + "': " + e.what());
    }
    return campaign_from_json(j);
}

ExperimentConfig parse_config(const Json& j, const std::string& base_dir)
{
    check_keys(j, {"seed", "grid", "geometry", "object", "mode", "params", "campaign", "sim", "contact", "output", "sweep"},
               "");
    ExperimentConfig cfg;

    if (j.contains("seed")) {
        const Json& v = j.at("seed");
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            throw ConfigError("seed: expected a non-negative integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }

    if (j.contains("grid")) {
        const Json& g = j.at("grid");
        check_keys(g, {"rows", "cols", "spacing"}, "grid");
        cfg.rows = integer(g, "rows", "grid", cfg.rows);
        cfg.cols = integer(g, "cols", "grid", cfg.cols);
        cfg.spacing = number(g, "spacing", "grid", cfg.spacing);
        if (cfg.rows < 1 || cfg.cols < 1)
            throw ConfigError("grid: rows and cols must be positive");
        if (!(cfg.spacing > 0.0))
            throw ConfigError("grid.spacing: must be positive");
    }

    if (j.contains("geometry")) {
        const Json& g = j.at("geometry");
        check_keys(g, {"link_length", "joint_circle_radius", "plate_side"}, "geometry");
        cfg.geometry.link_length = number(g, "link_length", "geometry", cfg.geometry.link_length);
        cfg.geometry.joint_circle_radius = number(g, "joint_circle_radius", "geometry", cfg.geometry.joint_circle_radius);
        cfg.geometry.plate_side = number(g, "plate_side", "geometry", cfg.geometry.plate_side);
        rethrow_as_config("geometry", [&] { cfg.geometry.validate(); });
    }
    if (cfg.geometry.plate_side > cfg.spacing)
        throw ConfigError("geometry.plate_side: plates may not overlap (plate_side > grid.spacing)");

    if (j.contains("object"))
        cfg.object = parse_object(j.at("object"));
    if (j.contains("mode"))
        cfg.mode = parse_mode(j.at("mode"), "mode");

    if (j.contains("params") && j.contains("campaign"))
        throw ConfigError("params: give either params or campaign, not both");
    if (j.contains("params"))
        cfg.params = params_from_json(j.at("params"), "params");
    if (j.contains("campaign")) {
        cfg.campaign = text(j, "campaign", "", "");
        std::filesystem::path p(cfg.campaign);
        if (p.is_relative())
            p = std::filesystem::path(base_dir) / p;
        cfg.params = load_campaign(p.string()).best().params;
    }

    if (j.contains("sim")) {
        const Json& s = j.at("sim");
        check_keys(s,
                   {"dt", "duration", "controller_period", "gravity", "solver_iterations", "settle_time",
                    "tracking_bandwidth", "placement_jitter", "cpg_time_offset", "energy_blowup_factor"},
                   "sim");
        SimConfig& sc = cfg.sim;
        sc.dt = number(s, "dt", "sim", sc.dt);
        sc.duration = number(s, "duration", "sim", sc.duration);
        sc.controller_period = number(s, "controller_period", "sim", sc.controller_period);
        sc.gravity = number(s, "gravity", "sim", sc.gravity);
        sc.solver_iterations = integer(s, "solver_iterations", "sim", sc.solver_iterations);
        sc.settle_time = number(s, "settle_time", "sim", sc.settle_time);
        sc.tracking_bandwidth = number(s, "tracking_bandwidth", "sim", sc.tracking_bandwidth);
        sc.placement_jitter = number(s, "placement_jitter", "sim", sc.placement_jitter);
        sc.cpg_time_offset = number(s, "cpg_time_offset", "sim", sc.cpg_time_offset);
        sc.energy_blowup_factor = number(s, "energy_blowup_factor", "sim", sc.energy_blowup_factor);
    }
    rethrow_as_config("sim", [&] { cfg.sim.validate(); });

    if (j.contains("contact")) {
        const Json& c = j.at("contact");
        check_keys(c, {"mu_slide", "mu_roll", "mu_torsion", "k_n", "c_n", "v_eps", "omega_eps", "contact_radius"},
                   "contact");
        ContactParams& cp = cfg.contact;
        cp.mu_slide = number(c, "mu_slide", "contact", cp.mu_slide);
        cp.mu_roll = number(c, "mu_roll", "contact", cp.mu_roll);
        cp.mu_torsion = number(c, "mu_torsion", "contact", cp.mu_torsion);
        cp.k_n = number(c, "k_n", "contact", cp.k_n);
        cp.c_n = number(c, "c_n", "contact", cp.c_n);
        cp.v_eps = number(c, "v_eps", "contact", cp.v_eps);
        cp.omega_eps = number(c, "omega_eps", "contact", cp.omega_eps);
        cp.contact_radius = number(c, "contact_radius", "contact", cp.contact_radius);
    }
    rethrow_as_config("contact", [&] { cfg.contact.validate(); });

    if (j.contains("output")) {
        const Json& o = j.at("output");
        check_keys(o, {"trajectory", "sidecar", "metrics", "results"}, "output");
        cfg.output.trajectory = text(o, "trajectory", "output", cfg.output.trajectory);
        cfg.output.sidecar = text(o, "sidecar", "output", cfg.output.sidecar);
        cfg.output.metrics = text(o, "metrics", "output", cfg.output.metrics);
        cfg.output.results = text(o, "results", "output", cfg.output.results);
    }

    if (j.contains("sweep")) {
        const Json& s = j.at("sweep");
        check_keys(s, {"masses", "width_spans", "frictions", "height", "cases"}, "sweep");
        SweepSpec& sw = cfg.sweep;
        sw.masses = numbers(s, "masses", "sweep", sw.masses);
        sw.width_spans = numbers(s, "width_spans", "sweep", sw.width_spans);
        sw.frictions = numbers(s, "frictions", "sweep", sw.frictions);
        sw.height = number(s, "height", "sweep", sw.height);
        for (double m : sw.masses)
            if (!(m > 0.0))
                throw ConfigError("sweep.masses: values must be positive");
        for (double w : sw.width_spans)
            if (!(w > 0.0))
                throw ConfigError("sweep.width_spans: values must be positive");
        for (double mu : sw.frictions)
            if (!(mu >= 0.0))
                throw ConfigError("sweep.frictions: values must be non-negative");
        if (!(sw.height > 0.0))
            throw ConfigError("sweep.height: must be positive");
        if (s.contains("cases")) {
            if (!s.at("cases").is_array())
                throw ConfigError("sweep.cases: expected an array");
            for (const auto& c : s.at("cases")) {
                check_keys(c, {"mode", "params"}, "sweep.cases");
                if (!c.contains("mode"))
                    throw ConfigError("sweep.cases.mode: missing");
                SweepCase sc{parse_mode(c.at("mode"), "sweep.cases.mode"), cfg.params};
                if (sc.mode.kind != ManipulationMode::Kind::Translate)
                    throw ConfigError("sweep.cases.mode: sweeps cover translation modes only");
                if (c.contains("params"))
                    sc.params = params_from_json(c.at("params"), "sweep.cases.params");
                sw.cases.push_back(sc);
            }
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    const auto dir = std::filesystem::path(path).parent_path();
    return parse_config(j, dir.empty() ? "." : dir.string());
}

Json to_json(const ExperimentConfig& cfg)
{
    Json j;
    j["seed"] = cfg.seed;
    j["grid"] = Json{{"rows", cfg.rows}, {"cols", cfg.cols}, {"spacing", cfg.spacing}};
    j["geometry"] = Json{{"link_length", cfg.geometry.link_length},
                         {"joint_circle_radius", cfg.geometry.joint_circle_radius},
                         {"plate_side", cfg.geometry.plate_side}};
    if (cfg.object)
        j["object"] = object_to_json(*cfg.object);
    if (cfg.mode)
        j["mode"] = mode_json(*cfg.mode);
    j["params"] = params_to_json(cfg.params);
    if (!cfg.campaign.empty())
        j["campaign"] = cfg.campaign;
    const SimConfig& s = cfg.sim;
    j["sim"] = Json{{"dt", s.dt},
                    {"duration", s.duration},
                    {"controller_period", s.controller_period},
                    {"gravity", s.gravity},
                    {"solver_iterations", s.solver_iterations},
                    {"settle_time", s.settle_time},
                    {"tracking_bandwidth", s.tracking_bandwidth},
                    {"placement_jitter", s.placement_jitter},
                    {"cpg_time_offset", s.cpg_time_offset},
                    {"energy_blowup_factor", s.energy_blowup_factor}};
    const ContactParams& c = cfg.contact;
    j["contact"] = Json{{"mu_slide", c.mu_slide}, {"mu_roll", c.mu_roll}, {"mu_torsion", c.mu_torsion},
                        {"k_n", c.k_n},           {"c_n", c.c_n},         {"v_eps", c.v_eps},
                        {"omega_eps", c.omega_eps}, {"contact_radius", c.contact_radius}};
    j["output"] = Json{{"trajectory", cfg.output.trajectory},
                       {"sidecar", cfg.output.sidecar},
                       {"metrics", cfg.output.metrics},
                       {"results", cfg.output.results}};
    Json cases = Json::array();
    for (const auto& sc : cfg.sweep.cases)
        cases.push_back(Json{{"mode", mode_json(sc.mode)}, {"params", params_to_json(sc.params)}});
    j["sweep"] = Json{{"masses", cfg.sweep.masses},
                      {"width_spans", cfg.sweep.width_spans},
                      {"frictions", cfg.sweep.frictions},
                      {"height", cfg.sweep.height},
                      {"cases", cases}};
    return j;
}

std::string normalized_config_text(const ExperimentConfig& cfg) { return to_json(cfg).dump(2); }

std::optional<std::uint64_t> env_seed()
{
    const char* s = std::getenv("ORI_SEED");
    if (!s || !*s)
        return std::nullopt;
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (errno != 0 || *end != '\0' || s[0] == '-')
        throw ConfigError(std::string("ORI_SEED: expected a non-negative integer, got '") + s + "'");
    return static_cast<std::uint64_t>(v);
}

void apply_seed_override(ExperimentConfig& cfg, std::optional<std::uint64_t> flag_seed)
{
    if (flag_seed)
        cfg.seed = *flag_seed;
    else if (const auto e = env_seed())
        cfg.seed = *e;
}

Json sidecar_json(const ExperimentConfig& cfg, const TrajectoryLog& log, const ManipulationMetrics& m)
{
    const EpisodeStats& s = log.stats;
    Json sat = Json::array();
    for (const auto& e : log.saturation)
        sat.push_back(Json{{"t", e.t}, {"module", e.module}});
    return Json{{"config", to_json(cfg)},
                {"samples", log.samples.size()},
                {"stats",
                 {{"steps", s.steps},
                  {"max_contacts", s.max_contacts},
                  {"max_depth", s.max_depth},
                  {"max_cone_excess", s.max_cone_excess},
                  {"command_saturations", s.command_saturations},
                  {"actual_clamps", s.actual_clamps},
                  {"max_solver_iterations", s.max_solver_iterations},
                  {"initial_height", s.initial_height}}},
                {"saturation_events", sat},
                {"metrics", metrics_to_json(m)}};
}

std::string fnv1a_hex(const std::string& text)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace orisurf
