#pragma once

#include <string>
#include <vector>

#include "orisurf/config.hpp"

namespace orisurf {

enum class SweepKind { MassWidth, Friction };

struct SweepCell {
    std::string id;
    SweepCase scenario;
    ObjectSpec object;
    ContactParams contact;
    double mass = 0.0;
    double width_spans = 0.0;
    double width_m = 0.0;
    double mu = 0.0;
};

struct SweepRow {
    SweepCell cell;
    double v = 0.0;
    double J = kPenalty;
    std::string status;
};

/// Cells in output order. Mass-width cells use square footprints of
/// width_spans * grid spacing at the sweep height; friction cells vary mu_slide
/// on the configured object.
std::vector<SweepCell> sweep_cells(const ExperimentConfig& cfg, SweepKind kind);

SweepRow run_cell(const ExperimentConfig& cfg, const SweepCell& cell);

std::string csv_header(SweepKind kind);
std::string csv_line(SweepKind kind, const SweepRow& row);

/// Band of friction values flagged in friction sweep output.
inline bool in_friction_band(double mu) { return mu >= 0.3 - 1e-12 && mu <= 0.9 + 1e-12; }

struct SweepReport {
    size_t total = 0;
    size_t skipped = 0;
    size_t run = 0;
    size_t failed = 0;
};

/// Runs every cell not already present in `path` and appends its row. Cells run
/// `jobs` at a time; rows are written in cell order.
SweepReport run_sweep(const ExperimentConfig& cfg, SweepKind kind, const std::string& path, unsigned jobs);

/// Reads rows back from a sweep CSV (cell_id, scenario fields, v, J, status).
struct SweepRecord {
    std::string cell_id;
    double mass = 0.0;
    double width_spans = 0.0;
    double mu = 0.0;
    std::string mode;
    std::string direction;
    double v = 0.0;
    double J = kPenalty;
    std::string status;
};

std::vector<SweepRecord> read_sweep_csv(const std::string& path, SweepKind kind);

} // namespace orisurf
