#include "orisurf/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "orisurf/parallel.hpp"

namespace orisurf {

SearchSpace SearchSpace::table_one()
{
    SearchSpace s;
    s.bounds = {{{0.005, 0.04},
                 {0.35, 0.79},
                 {0.1, 0.8},
                 {0.02, 0.04},
                 {-0.26, 0.26},
                 {0.0, kTwoPi},
                 {0.0, kTwoPi},
                 {0.1, 0.5}}};
    return s;
}

bool SearchSpace::contains(const ParamVector& x) const
{
    for (size_t i = 0; i < x.size(); ++i)
        if (!bounds[i].contains(x[i]))
            return false;
    return true;
}

ParamVector SearchSpace::reflect(ParamVector x) const
{
    for (size_t i = 0; i < x.size(); ++i) {
        const Interval& b = bounds[i];
        const double w = b.width();
        if (w <= 0.0) {
            x[i] = b.lo;
            continue;
        }
        double y = std::fmod(x[i] - b.lo, 2.0 * w);
        if (y < 0.0)
            y += 2.0 * w;
        if (y > w)
            y = 2.0 * w - y;
        x[i] = std::clamp(b.lo + y, b.lo, b.hi);
    }
    return x;
}

ParamVector SearchSpace::sample_uniform(std::mt19937_64& rng) const
{
    ParamVector x{};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (size_t i = 0; i < x.size(); ++i) {
        const double r = u(rng);
        x[i] = std::min(bounds[i].lo + r * bounds[i].width(), bounds[i].hi);
    }
    return x;
}

void SearchSpace::validate() const
{
    for (size_t i = 0; i < bounds.size(); ++i) {
        const Interval& b = bounds[i];
        if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || b.lo > b.hi)
            throw Error("search space bound for " + std::string(CpgParams::kNames[i]) + " is invalid");
    }
}

ModePreset mode_presets(const ManipulationMode& mode)
{
    using namespace param_index;
    ModePreset p;
    p.space = SearchSpace::table_one();
    if (mode.kind == ManipulationMode::Kind::Rotate) {
        p.weights = CostWeights::rotation();
        p.space.bounds[sigma] = {0.0, kPi};
        p.space.fix(phi, kPi);
        return p;
    }
    p.space.bounds[sigma] = mode.direction.sign > 0 ? Interval{0.0, kPi} : Interval{kPi, kTwoPi};
    if (mode.profile == Profile::Fast) {
        p.weights = CostWeights::fast();
        p.space.fix(phi, kPi);
    } else {
        p.weights = CostWeights::smooth();
    }
    return p;
}

EvaluationContext EvaluationContext::for_mode(const EpisodeSpec& episode)
{
    return {episode, mode_presets(episode.mode).weights};
}

Evaluation evaluate(const CpgParams& params, const EvaluationContext& ctx)
{
    Evaluation ev;
    EpisodeSpec spec = ctx.episode;
    spec.params = params;
    const ModuleGrid grid = spec.grid();
    const auto directions = distinct_directions(grid);
    if (!cpg_feasible(params, directions, spec.geometry)) {
        ev.status = "infeasible";
        return ev;
    }
    try {
        const TrajectoryLog log = simulate_episode(spec);
        ev.metrics = compute_metrics(log);
        ev.J = cost(ev.metrics, ctx.weights);
    } catch (const Error& e) {
        ev = Evaluation{};
        ev.status = std::string("abort: ") + e.what();
    }
    return ev;
}

std::string to_string(StrategyKind kind) { return kind == StrategyKind::Random ? "random" : "evolutionary"; }

StrategyKind parse_strategy(const std::string& text)
{
    if (text == "random")
        return StrategyKind::Random;
    if (text == "evolutionary" || text == "es")
        return StrategyKind::Evolutionary;
    throw Error("unknown strategy '" + text + "' (expected random or evolutionary)");
}

namespace {

class RandomSearch final : public SearchStrategy {
public:
    RandomSearch(SearchSpace space, size_t batch) : space_(space), batch_(batch) {}

    std::vector<ParamVector> ask(std::mt19937_64& rng) override
    {
        std::vector<ParamVector> out(batch_);
        for (auto& x : out)
            x = space_.sample_uniform(rng);
        return out;
    }
    void tell(std::span<const ParamVector>, std::span<const double>) override { ++generation_; }
    int generation() const override { return generation_; }

private:
    SearchSpace space_;
    size_t batch_;
    int generation_ = 0;
};

// (mu, lambda) truncation ES. Each generation after the first re-evaluates the
// centroid of the selected parents and fills the rest with Gaussian mutants of it.
class EvolutionStrategy final : public SearchStrategy {
public:
    EvolutionStrategy(SearchSpace space, EvolutionOptions options) : space_(space), options_(options) {}

    std::vector<ParamVector> ask(std::mt19937_64& rng) override
    {
        std::vector<ParamVector> out(options_.population);
        if (generation_ == 0) {
            for (auto& x : out)
                x = space_.sample_uniform(rng);
            return out;
        }
        const double scale = options_.initial_step * std::pow(options_.anneal, generation_ - 1);
        std::normal_distribution<double> normal(0.0, 1.0);
        out[0] = centroid_;
        for (size_t k = 1; k < out.size(); ++k) {
            ParamVector x = centroid_;
            for (size_t i = 0; i < x.size(); ++i)
                x[i] += scale * space_.bounds[i].width() * normal(rng);
            out[k] = space_.reflect(x);
        }
        return out;
    }

    void tell(std::span<const ParamVector> candidates, std::span<const double> costs) override
    {
        std::vector<size_t> order(candidates.size());
        std::iota(order.begin(), order.end(), size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return costs[a] < costs[b]; });
        const size_t mu = std::min(options_.parents, order.size());
        centroid_.fill(0.0);
        for (size_t k = 0; k < mu; ++k)
            for (size_t i = 0; i < centroid_.size(); ++i)
                centroid_[i] += candidates[order[k]][i] / static_cast<double>(mu);
        centroid_ = space_.reflect(centroid_);
        ++generation_;
    }

    int generation() const override { return generation_; }

private:
    SearchSpace space_;
    EvolutionOptions options_;
    ParamVector centroid_{};
    int generation_ = 0;
};

} // namespace

std::unique_ptr<SearchStrategy> make_strategy(StrategyKind kind, const SearchSpace& space, const EvolutionOptions& options)
{
    space.validate();
    if (options.population < 1 || options.parents < 1 || options.parents > options.population)
        throw Error("evolution options need 1 <= parents <= population");
    if (kind == StrategyKind::Random)
        return std::make_unique<RandomSearch>(space, options.population);
    return std::make_unique<EvolutionStrategy>(space, options);
}

size_t Campaign::best_index() const
{
    if (history.empty())
        throw Error("campaign has no evaluations");
    size_t best = 0;
    for (size_t i = 1; i < history.size(); ++i)
        if (history[i].evaluation.J < history[best].evaluation.J)
            best = i;
    return best;
}

std::vector<double> Campaign::best_so_far() const
{
    std::vector<double> out;
    out.reserve(history.size());
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : history) {
        best = std::min(best, e.evaluation.J);
        out.push_back(best);
    }
    return out;
}

Campaign optimize(const SearchSpace& space, const Objective& objective, const OptimizeOptions& options)
{
    if (options.budget < 1)
        throw Error("budget must be at least 1");
    Campaign c;
    c.budget = options.budget;
    c.seed = options.seed;
    c.strategy = options.strategy;
    auto strategy = make_strategy(options.strategy, space, options.evolution);
    std::mt19937_64 rng(options.seed);
    const unsigned jobs = resolve_jobs(options.jobs);

    while (c.history.size() < options.budget) {
        const auto batch = strategy->ask(rng);
        const size_t take = std::min(batch.size(), options.budget - c.history.size());
        std::vector<Evaluation> results(take);
        parallel_for(take, jobs, [&](size_t i) { results[i] = objective(batch[i]); });
        std::vector<double> costs(take);
        for (size_t i = 0; i < take; ++i) {
            costs[i] = results[i].J;
            c.history.push_back({strategy->generation(), CpgParams::from_array(batch[i]), std::move(results[i])});
        }
        if (take < batch.size())
            break;
        strategy->tell(batch, costs);
    }
    return c;
}

Campaign optimize(const EvaluationContext& ctx, const OptimizeOptions& options)
{
    const ModePreset preset = mode_presets(ctx.episode.mode);
    Campaign c = optimize(
        preset.space, [&](const ParamVector& x) { return evaluate(CpgParams::from_array(x), ctx); }, options);
    c.mode = ctx.episode.mode.to_string();
    c.object = ctx.episode.object.to_string();
    return c;
}

double synthetic_quadratic(const SearchSpace& space, const ParamVector& x)
{
    double j = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const Interval& b = space.bounds[i];
        if (b.width() <= 0.0)
            continue;
        const double z = (x[i] - b.mid()) / b.width();
        j += z * z;
    }
    return j;
}

} // namespace orisurf
