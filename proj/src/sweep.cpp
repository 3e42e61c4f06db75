#include "orisurf/sweep.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "orisurf/parallel.hpp"

namespace orisurf {

namespace {

std::string profile_name(const ManipulationMode& m) { return m.profile == Profile::Fast ? "fast" : "smooth"; }

std::string cell_identity(const ExperimentConfig& cfg, const SweepCell& cell)
{
    ExperimentConfig c = cfg;
    c.object = cell.object;
    c.mode = cell.scenario.mode;
    c.params = cell.scenario.params;
    c.contact = cell.contact;
    c.sweep = SweepSpec{};
    c.output = OutputPaths{};
    c.campaign.clear();
    return fnv1a_hex(normalized_config_text(c));
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

} // namespace

std::vector<SweepCell> sweep_cells(const ExperimentConfig& cfg, SweepKind kind)
{
    std::vector<SweepCell> cells;
    for (const SweepCase& sc : cfg.sweep_cases()) {
        if (kind == SweepKind::MassWidth) {
            for (double mass : cfg.sweep.masses) {
                for (double spans : cfg.sweep.width_spans) {
                    SweepCell cell;
                    cell.scenario = sc;
                    cell.mass = mass;
                    cell.width_spans = spans;
                    cell.width_m = spans * cfg.spacing;
                    cell.object.size = Vec3(cell.width_m, cell.width_m, cfg.sweep.height);
                    cell.object.mass = mass;
                    cell.contact = cfg.contact;
                    cell.mu = cfg.contact.mu_slide;
                    cells.push_back(cell);
                }
            }
        } else {
            if (!cfg.object)
                throw ConfigError("object: friction sweep needs an object spec");
            for (double mu : cfg.sweep.frictions) {
                SweepCell cell;
                cell.scenario = sc;
                cell.object = *cfg.object;
                cell.mass = cell.object.mass;
                cell.width_m = cell.object.size.x();
                cell.width_spans = cell.width_m / cfg.spacing;
                cell.contact = cfg.contact;
                cell.contact.mu_slide = mu;
                cell.contact.mu_roll = std::min(cell.contact.mu_roll, mu);
                cell.mu = mu;
                cells.push_back(cell);
            }
        }
    }
    for (auto& cell : cells)
        cell.id = cell_identity(cfg, cell);
    return cells;
}

SweepRow run_cell(const ExperimentConfig& cfg, const SweepCell& cell)
{
    ExperimentConfig c = cfg;
    c.object = cell.object;
    c.mode = cell.scenario.mode;
    c.params = cell.scenario.params;
    c.contact = cell.contact;
    const EvaluationContext ctx = EvaluationContext::for_mode(c.episode());
    const Evaluation ev = evaluate(cell.scenario.params, ctx);
    SweepRow row;
    row.cell = cell;
    row.v = ev.metrics.v;
    row.J = ev.J;
    row.status = ev.status;
    return row;
}

std::string csv_header(SweepKind kind)
{
    return kind == SweepKind::MassWidth ? "cell_id,mass,width_spans,width_m,mode,direction,v,J,status"
                                        : "cell_id,mu,mode,direction,v,J,in_band,status";
}

std::string csv_line(SweepKind kind, const SweepRow& row)
{
    const SweepCell& c = row.cell;
    std::string status = row.status;
    for (char& ch : status)
        if (ch == ',' || ch == '\n')
            ch = ';';
    const std::string mode = profile_name(c.scenario.mode);
    const std::string dir = c.scenario.mode.direction.label();
    std::string s = c.id + ",";
    if (kind == SweepKind::MassWidth)
        s += format_number(c.mass) + "," + format_number(c.width_spans) + "," + format_number(c.width_m) + ",";
    else
        s += format_number(c.mu) + ",";
    s += mode + "," + dir + "," + format_number(row.v) + "," + format_number(row.J) + ",";
    if (kind == SweepKind::Friction)
        s += std::string(in_friction_band(c.mu) ? "1" : "0") + ",";
    return s + status;
}

SweepReport run_sweep(const ExperimentConfig& cfg, SweepKind kind, const std::string& path, unsigned jobs)
{
    const auto cells = sweep_cells(cfg, kind);
    SweepReport report;
    report.total = cells.size();

    std::set<std::string> done;
    const bool exists = std::filesystem::exists(path) && std::filesystem::file_size(path) > 0;
    if (exists) {
        std::ifstream in(path);
        std::string line;
        std::getline(in, line);
        if (line != csv_header(kind))
            throw ConfigError("results file '" + path + "' has a different header; refusing to append");
        while (std::getline(in, line)) {
            const auto fields = split(line);
            if (fields.size() == split(csv_header(kind)).size())
                done.insert(fields[0]);
        }
    }

    std::vector<const SweepCell*> todo;
    for (const auto& c : cells) {
        if (done.count(c.id))
            ++report.skipped;
        else
            todo.push_back(&c);
    }

    std::ofstream out(path, std::ios::app);
    if (!out)
        throw ConfigError("cannot write results file '" + path + "'");
    if (!exists)
        out << csv_header(kind) << '\n' << std::flush;

    const unsigned workers = resolve_jobs(jobs);
    const size_t chunk = std::max<size_t>(1, 2 * workers);
    for (size_t start = 0; start < todo.size(); start += chunk) {
        const size_t n = std::min(chunk, todo.size() - start);
        std::vector<SweepRow> rows(n);
        parallel_for(n, workers, [&](size_t i) { rows[i] = run_cell(cfg, *todo[start + i]); });
        for (const auto& r : rows) {
            out << csv_line(kind, r) << '\n';
            ++report.run;
            if (r.status != "ok")
                ++report.failed;
        }
        out.flush();
    }
    return report;
}

std::vector<SweepRecord> read_sweep_csv(const std::string& path, SweepKind kind)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open sweep results '" + path + "'");
    std::string line;
    std::getline(in, line);
    if (line != csv_header(kind))
        throw ConfigError("sweep results '" + path + "': unexpected header");
    const size_t ncols = split(csv_header(kind)).size();
    std::vector<SweepRecord> out;
    while (std::getline(in, line)) {
        const auto f = split(line);
        if (f.size() != ncols)
            continue;
        SweepRecord r;
        r.cell_id = f[0];
        size_t k = 1;
        if (kind == SweepKind::MassWidth) {
            r.mass = std::stod(f[k++]);
            r.width_spans = std::stod(f[k++]);
            ++k;
        } else {
            r.mu = std::stod(f[k++]);
        }
        r.mode = f[k++];
        r.direction = f[k++];
        r.v = std::stod(f[k++]);
        r.J = std::stod(f[k++]);
        if (kind == SweepKind::Friction)
            ++k;
        r.status = f[k];
        out.push_back(r);
    }
    return out;
}

} // namespace orisurf
