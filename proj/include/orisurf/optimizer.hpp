#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "orisurf/dynamics.hpp"
#include "orisurf/metrics.hpp"

namespace orisurf {

using ParamVector = std::array<double, CpgParams::kDim>;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

struct SearchSpace {
    std::array<Interval, CpgParams::kDim> bounds;

    /// Full optimization box with sigma over [0, 2pi].
    static SearchSpace table_one();

    void fix(size_t index, double value) { bounds[index] = {value, value}; }
    bool contains(const ParamVector& x) const;
    /// Reflects each coordinate back into its interval.
    ParamVector reflect(ParamVector x) const;
    ParamVector sample_uniform(std::mt19937_64& rng) const;
    void validate() const;
};

namespace param_index {
inline constexpr size_t h_amp = 0, psi_amp = 1, freq = 2, h0 = 3, psi0 = 4, sigma = 5, phi = 6, epsilon = 7;
}

struct ModePreset {
    CostWeights weights;
    SearchSpace space;
};

ModePreset mode_presets(const ManipulationMode& mode);

/// Cost assigned to infeasible parameters and aborted episodes.
inline constexpr double kPenalty = 10.0;

struct Evaluation {
    ManipulationMetrics metrics;
    double J = kPenalty;
    /// "ok", "infeasible" or "abort: <reason>".
    std::string status = "ok";
};

/// Everything except the CPG parameters needed to score a candidate.
struct EvaluationContext {
    EpisodeSpec episode;
    CostWeights weights;

    static EvaluationContext for_mode(const EpisodeSpec& episode);
};

Evaluation evaluate(const CpgParams& params, const EvaluationContext& ctx);

enum class StrategyKind { Random, Evolutionary };

std::string to_string(StrategyKind kind);
StrategyKind parse_strategy(const std::string& text);

/// Batch ask/tell interface for black-box search.
class SearchStrategy {
public:
    virtual ~SearchStrategy() = default;
    virtual std::vector<ParamVector> ask(std::mt19937_64& rng) = 0;
    virtual void tell(std::span<const ParamVector> candidates, std::span<const double> costs) = 0;
    virtual int generation() const = 0;
};

struct EvolutionOptions {
    size_t population = 16;
    size_t parents = 4;
    double initial_step = 0.15;
    double anneal = 0.95;
};

std::unique_ptr<SearchStrategy> make_strategy(StrategyKind kind, const SearchSpace& space,
                                              const EvolutionOptions& options = {});

struct CampaignEntry {
    int generation = 0;
    CpgParams params;
    Evaluation evaluation;
};

struct Campaign {
    std::string mode;
    std::string object;
    size_t budget = 0;
    std::uint64_t seed = 0;
    StrategyKind strategy = StrategyKind::Evolutionary;
    std::vector<CampaignEntry> history;

    size_t best_index() const;
    const CampaignEntry& best() const { return history.at(best_index()); }
    /// Running minimum of J over the history.
    std::vector<double> best_so_far() const;
};

using Objective = std::function<Evaluation(const ParamVector&)>;

struct OptimizeOptions {
    size_t budget = 200;
    std::uint64_t seed = 0;
    StrategyKind strategy = StrategyKind::Evolutionary;
    unsigned jobs = 1;
    EvolutionOptions evolution;
};

/// Generic driver: candidates of one batch are evaluated concurrently, the
/// strategy is updated once per batch.
Campaign optimize(const SearchSpace& space, const Objective& objective, const OptimizeOptions& options);

/// Episode campaign for a mode and object using the mode preset.
Campaign optimize(const EvaluationContext& ctx, const OptimizeOptions& options);

/// Box-midpoint quadratic sum(((x - mid) / width)^2) over non-fixed coordinates.
double synthetic_quadratic(const SearchSpace& space, const ParamVector& x);

} // namespace orisurf
