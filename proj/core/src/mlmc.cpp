#include "spde_mlmc/mlmc.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "spde_mlmc/error.hpp"
#include "spde_mlmc/parallel.hpp"
#include "spde_mlmc/statistics.hpp"

namespace spde_mlmc {

namespace {

// Fixed chunking keeps the reduction order independent of the worker count.
constexpr std::uint64_t kChunk = 8;

std::uint64_t ceil_count(double x) {
    if (!std::isfinite(x) || x > 0x1.0p62) throw CapacityError("build_schedule: sample count overflows");
    // Snap values within rounding noise of an integer so that exact formulas
    // such as 8 * 2^-3 * 9 do not round up to the next integer.
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-9 * std::max(1.0, r)) x = r;
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(x)));
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

// ---------------------------------------------------------------------------
// Schedules

std::string_view to_string(ScheduleMode mode) {
    switch (mode) {
        case ScheduleMode::Singlelevel: return "singlelevel";
        case ScheduleMode::Strong: return "strong";
        case ScheduleMode::Weak: return "weak";
        case ScheduleMode::General: return "general";
    }
    return "unknown";
}

ScheduleMode parse_schedule_mode(std::string_view name) {
    if (name == "singlelevel") return ScheduleMode::Singlelevel;
    if (name == "strong") return ScheduleMode::Strong;
    if (name == "weak") return ScheduleMode::Weak;
    if (name == "general") return ScheduleMode::General;
    throw UsageError("unknown schedule mode '" + std::string(name) + "'");
}

GeneralSequence GeneralSequence::geometric(int top_level, double rate, double eta) {
    if (rate <= 0.0) throw UsageError("GeneralSequence: rate must be positive");
    GeneralSequence seq;
    seq.eta = eta;
    for (int l = 0; l <= top_level; ++l) seq.a.push_back(std::exp2(-rate * l));
    return seq;
}

std::string_view to_string(BaseCount rule) {
    return rule == BaseCount::Level ? "level" : "coarsest";
}

BaseCount parse_base_count(std::string_view name) {
    if (name == "level") return BaseCount::Level;
    if (name == "coarsest") return BaseCount::Coarsest;
    throw UsageError("unknown base count rule '" + std::string(name) + "'");
}

std::uint64_t SampleSchedule::count_for(int level, int min_level, BaseCount rule) const {
    if (mode == ScheduleMode::Singlelevel) {
        if (level != top_level) throw UsageError("singlelevel schedule only covers its top level");
        return counts.front();
    }
    if (level < min_level || level > top_level) {
        throw UsageError("schedule has no count for level " + std::to_string(level));
    }
    if (level == min_level && rule == BaseCount::Coarsest) return counts[0];
    return counts[static_cast<std::size_t>(level)];
}

bool SampleSchedule::outside_theory() const { return mode != ScheduleMode::Singlelevel && params.eps == 0.0; }

double SampleSchedule::refinement(int level) const {
    const double g = params.gamma;
    switch (mode) {
        case ScheduleMode::Strong: return std::exp2(-g * level);
        case ScheduleMode::Weak:
        case ScheduleMode::Singlelevel: return std::exp2(-2.0 * g * level);
        case ScheduleMode::General: return params.general->a.at(static_cast<std::size_t>(level));
    }
    return 0.0;
}

double SampleSchedule::eta() const {
    switch (mode) {
        case ScheduleMode::Strong: return 1.0;
        case ScheduleMode::Weak: return 0.5;
        case ScheduleMode::General: return params.general->eta;
        case ScheduleMode::Singlelevel: return 0.0;
    }
    return 0.0;
}

SampleSchedule build_schedule(ScheduleMode mode, int top_level, const ScheduleParams& params) {
    if (top_level < 1) throw UsageError("build_schedule: top level must be >= 1");
    if (top_level > kMaxLevel) throw CapacityError("build_schedule: top level exceeds capacity");
    if (!(params.gamma > 0.0 && params.gamma < 1.0)) throw UsageError("build_schedule: gamma must lie in (0,1)");
    if (!(params.eps >= 0.0) || !std::isfinite(params.eps)) throw UsageError("build_schedule: eps must be >= 0");
    if (!(params.constant > 0.0)) throw UsageError("build_schedule: proportionality constant must be positive");

    SampleSchedule s;
    s.mode = mode;
    s.top_level = top_level;
    s.params = params;
    const double g = params.gamma;
    const double c = params.constant;
    const int L = top_level;
    auto level_factor = [&](int l) { return std::pow(static_cast<double>(l), 1.0 + params.eps); };

    switch (mode) {
        case ScheduleMode::Singlelevel:
            s.counts = {ceil_count(c * std::exp2(4.0 * g * L))};
            break;
        case ScheduleMode::Strong:
        case ScheduleMode::Weak: {
            const double top = mode == ScheduleMode::Strong ? 2.0 * g * L : 4.0 * g * L;
            s.counts.push_back(ceil_count(c * std::exp2(top)));
            for (int l = 1; l <= L; ++l) {
                s.counts.push_back(ceil_count(c * std::exp2(top - 2.0 * g * l) * level_factor(l)));
            }
            break;
        }
        case ScheduleMode::General: {
            if (!params.general) throw UsageError("build_schedule: general mode needs a refinement sequence");
            const auto& seq = *params.general;
            if (seq.a.size() != static_cast<std::size_t>(L) + 1) {
                throw UsageError("build_schedule: general sequence needs L+1 = " + std::to_string(L + 1) + " entries");
            }
            if (!(seq.eta >= 0.0 && seq.eta <= 1.0)) throw UsageError("build_schedule: eta must lie in [0,1]");
            for (std::size_t l = 0; l < seq.a.size(); ++l) {
                if (!(seq.a[l] > 0.0) || (l > 0 && !(seq.a[l] < seq.a[l - 1]))) {
                    throw UsageError("build_schedule: refinement sequence must be positive and decreasing");
                }
            }
            const double aL2 = 1.0 / (seq.a[L] * seq.a[L]);
            s.counts.push_back(ceil_count(c * aL2));
            for (int l = 1; l <= L; ++l) {
                s.counts.push_back(ceil_count(c * aL2 * std::pow(seq.a[l], 2.0 * seq.eta) * level_factor(l)));
            }
            break;
        }
    }
    return s;
}

SampleSchedule build_schedule(ScheduleMode mode, int top_level, double gamma, double eps) {
    ScheduleParams p;
    p.gamma = gamma;
    p.eps = eps;
    return build_schedule(mode, top_level, p);
}

// ---------------------------------------------------------------------------
// Functionals

double squared_l2_norm(const NodalField& field) {
    if (field.size() == 0) return 0.0;
    const auto ops = assemble(field.geometry());
    return mass_inner(ops.mass, field.values(), field.values());
}

FunctionalValue apply_functional(const FunctionalSpec& spec, const NodalField& field) {
    switch (spec.kind) {
        case FunctionalSpec::Kind::Identity: return field;
        case FunctionalSpec::Kind::SquaredNorm: return squared_l2_norm(field);
        case FunctionalSpec::Kind::Custom:
            if (!spec.custom) throw UsageError("apply_functional: custom functional is empty");
            return spec.custom(field);
    }
    return field;
}

// ---------------------------------------------------------------------------
// Path sampling

PathSampler::PathSampler(int max_level, SamplerOptions options) : max_level_(max_level), options_(std::move(options)) {
    if (max_level < 1) throw UsageError("PathSampler: max level must be >= 1");
    levels_.reserve(static_cast<std::size_t>(max_level));
    for (int l = 1; l <= max_level; ++l) {
        const LevelGeometry g = make_level(l);
        LevelOperators ops = assemble(g);
        SemiImplicitStepper stepper(g, ops);
        const std::size_t J = options_.truncation.modes(g);
        if (J == 0) throw UsageError("PathSampler: truncation rule yields no modes");
        levels_.push_back(LevelContext{g, std::move(ops), std::move(stepper), projection_matrix(g, J)});
    }
}

const PathSampler::LevelContext& PathSampler::context(int level) const {
    if (level < 1 || level > max_level_) {
        throw UsageError("PathSampler: level " + std::to_string(level) + " outside [1, " + std::to_string(max_level_) +
                         "]");
    }
    return levels_[static_cast<std::size_t>(level - 1)];
}

std::size_t PathSampler::modes(int level) const { return context(level).projection.modes(); }
const LevelGeometry& PathSampler::geometry(int level) const { return context(level).geometry; }
const TridiagonalMatrix& PathSampler::mass(int level) const { return context(level).ops.mass; }

std::uint64_t PathSampler::path_work(int level) {
    const LevelGeometry g = make_level(level);
    return static_cast<std::uint64_t>(g.dofs) * g.steps;
}

NodalField PathSampler::simulate(int level, const KLBlock* block) const {
    const LevelContext& ctx = context(level);
    if (block && (block->geometry().level != level || block->modes() != ctx.projection.modes())) {
        throw UsageError("PathSampler::simulate: block does not match level " + std::to_string(level));
    }
    NodalField state = initial_field(ctx.geometry);
    std::vector<double> scratch;
    std::vector<double> load(block ? ctx.geometry.dofs : 0);
    for (std::uint64_t k = 1; k <= ctx.geometry.steps; ++k) {
        if (block) noise_load(*block, k, ctx.projection, load);
        ctx.stepper.step(state.values(), options_.drift, load, scratch);
    }
    if (!state.all_finite()) throw NumericalError("PathSampler: non-finite state on level " + std::to_string(level));
    return state;
}

SamplePair PathSampler::sample_pair(int level, int min_level, const StreamCoordinate& coord) const {
    if (level < min_level) throw UsageError("sample_pair: level below the hierarchy's minimum level");
    if (min_level < 1) throw UsageError("sample_pair: minimum level must be >= 1");
    const bool coupled = level > min_level;
    SamplePair out;
    if (options_.zero_noise) {
        out.fine = simulate(level, nullptr);
        if (coupled) out.coarse = simulate(level - 1, nullptr);
        return out;
    }
    const KLBlock fine_block = sample_kl_block(coord, geometry(level), modes(level), options_.spectrum);
    out.fine = simulate(level, &fine_block);
    if (coupled) {
        const KLBlock coarse_block = coarsen_block(fine_block, modes(level - 1));
        out.coarse = simulate(level - 1, &coarse_block);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Estimators

ScalarEstimate mc_estimate(const std::function<double(std::uint64_t)>& sampler, std::uint64_t n, unsigned workers) {
    if (n == 0) throw UsageError("mc_estimate: need at least one sample");
    const std::uint64_t chunks = (n + kChunk - 1) / kChunk;
    const auto partial = parallel_map<ScalarAccumulator>(chunks, workers, [&](std::size_t c) {
        ScalarAccumulator acc;
        const std::uint64_t end = std::min(n, (c + 1) * kChunk);
        for (std::uint64_t i = c * kChunk; i < end; ++i) acc.add(sampler(i));
        return acc;
    });
    ScalarAccumulator total;
    for (const auto& p : partial) total.merge(p);
    return {total.mean(), total.variance(), total.count()};
}

FieldEstimate mc_estimate_field(const std::function<NodalField(std::uint64_t)>& sampler, std::uint64_t n,
                                const LevelGeometry& level, unsigned workers) {
    if (n == 0) throw UsageError("mc_estimate: need at least one sample");
    const LevelOperators ops = assemble(level);
    const std::uint64_t chunks = (n + kChunk - 1) / kChunk;
    const auto partial = parallel_map<FieldAccumulator>(chunks, workers, [&](std::size_t c) {
        FieldAccumulator acc(&ops.mass);
        const std::uint64_t end = std::min(n, (c + 1) * kChunk);
        for (std::uint64_t i = c * kChunk; i < end; ++i) {
            const NodalField y = sampler(i);
            if (y.level() != level.level) throw UsageError("mc_estimate: sampler returned a field on the wrong level");
            acc.add(y.values());
        }
        return acc;
    });
    FieldAccumulator total(&ops.mass);
    for (const auto& p : partial) total.merge(p);
    return {NodalField(level, total.mean()), total.variance(), total.count()};
}

namespace {

struct LevelPartial {
    FieldAccumulator diff;
    FieldAccumulator fine;
    ScalarAccumulator scalar_diff;
    ScalarAccumulator scalar_fine;
};

struct LevelRun {
    LevelPartial acc;
    bool coupled = false;
};

LevelRun run_level(const PathSampler& sampler, int level, int min_level, std::uint64_t samples,
                   const MlmcOptions& options) {
    if (samples > std::numeric_limits<std::uint32_t>::max()) {
        throw CapacityError("mlmc_estimate: more samples on one level than stream coordinates allow");
    }
    const bool scalar = options.functional.is_scalar();
    const TridiagonalMatrix* mass = &sampler.mass(level);
    auto fresh = [&] {
        LevelPartial p;
        if (!scalar) {
            p.diff = FieldAccumulator(mass);
            p.fine = FieldAccumulator(mass);
        }
        return p;
    };

    const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
    const auto partial = parallel_map<LevelPartial>(chunks, options.workers, [&](std::size_t c) {
        LevelPartial acc = fresh();
        const std::uint64_t end = std::min(samples, (c + 1) * kChunk);
        for (std::uint64_t i = c * kChunk; i < end; ++i) {
            const StreamCoordinate coord{options.seed, static_cast<std::uint32_t>(level), static_cast<std::uint32_t>(i),
                                         options.replicate, options.stream};
            const SamplePair pair = sampler.sample_pair(level, min_level, coord);
            if (scalar) {
                const double f = std::get<double>(apply_functional(options.functional, pair.fine));
                const double g =
                    pair.coarse ? std::get<double>(apply_functional(options.functional, *pair.coarse)) : 0.0;
                acc.scalar_diff.add(f - g);
                acc.scalar_fine.add(f);
            } else {
                acc.fine.add(pair.fine.values());
                if (pair.coarse) {
                    const NodalField d = pair.fine - prolong(*pair.coarse);
                    acc.diff.add(d.values());
                } else {
                    acc.diff.add(pair.fine.values());
                }
            }
        }
        return acc;
    });

    LevelRun run;
    run.acc = fresh();
    run.coupled = level > min_level;
    for (const auto& p : partial) {
        if (scalar) {
            run.acc.scalar_diff.merge(p.scalar_diff);
            run.acc.scalar_fine.merge(p.scalar_fine);
        } else {
            run.acc.diff.merge(p.diff);
            run.acc.fine.merge(p.fine);
        }
    }
    return run;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) throw CapacityError("work count overflows 64 bits");
    return r;
}

}  // namespace

MlmcResult mlmc_estimate(const PathSampler& sampler, const SampleSchedule& schedule, const MlmcOptions& options) {
    const int L = schedule.top_level;
    if (L > sampler.max_level()) throw UsageError("mlmc_estimate: sampler does not cover the schedule's top level");
    const bool single = schedule.mode == ScheduleMode::Singlelevel;
    const int min_level = single ? L : options.min_level;
    if (min_level < 1 || min_level > L) throw UsageError("mlmc_estimate: minimum level must lie in [1, L]");
    if (!single && schedule.counts.size() != static_cast<std::size_t>(L) + 1) {
        throw UsageError("mlmc_estimate: schedule does not match its top level");
    }

    const auto start = std::chrono::steady_clock::now();
    const bool scalar = options.functional.is_scalar();
    MlmcResult result;
    result.schedule = schedule;
    result.seed = options.seed;
    NodalField field_sum(sampler.geometry(L));
    double scalar_sum = 0.0;

    for (int level = min_level; level <= L; ++level) {
        const auto level_start = std::chrono::steady_clock::now();
        const std::uint64_t n = schedule.count_for(level, min_level, options.base_count);
        const LevelRun run = run_level(sampler, level, min_level, n, options);

        LevelStat stat;
        stat.level = level;
        stat.samples = n;
        if (scalar) {
            stat.mean = run.acc.scalar_diff.mean();
            stat.variance_of_difference = run.acc.scalar_diff.variance();
            stat.variance_of_level = run.acc.scalar_fine.variance();
            scalar_sum += run.acc.scalar_diff.mean();
        } else {
            NodalField mean(sampler.geometry(level), run.acc.diff.mean());
            field_sum += prolong_to(mean, L);
            stat.mean = std::move(mean);
            stat.variance_of_difference = run.acc.diff.variance();
            stat.variance_of_level = run.acc.fine.variance();
        }
        const std::uint64_t per_sample =
            PathSampler::path_work(level) + (run.coupled ? PathSampler::path_work(level - 1) : 0);
        stat.op_work = checked_mul(n, per_sample);
        stat.wall_seconds = seconds_since(level_start);
        result.sample_work += stat.op_work;
        result.levels.push_back(std::move(stat));
    }

    const auto terms = static_cast<std::uint64_t>(result.levels.size());
    result.summation_work = scalar ? terms : terms * sampler.geometry(L).dofs;
    result.total_work = result.sample_work + result.summation_work;
    if (scalar) {
        result.estimate = scalar_sum;
    } else {
        result.estimate = std::move(field_sum);
    }
    result.wall_seconds = seconds_since(start);
    return result;
}

PairStatistics pair_statistics(const PathSampler& sampler, int level, int min_level, std::uint64_t pairs,
                               const MlmcOptions& options) {
    if (pairs == 0) throw UsageError("pair_statistics: need at least one pair");
    const LevelRun run = run_level(sampler, level, min_level, pairs, options);
    PairStatistics s;
    s.level = level;
    s.pairs = pairs;
    if (options.functional.is_scalar()) {
        s.variance_of_difference = run.acc.scalar_diff.variance();
        s.variance_of_level = run.acc.scalar_fine.variance();
    } else {
        s.variance_of_difference = run.acc.diff.variance();
        s.variance_of_level = run.acc.fine.variance();
    }
    return s;
}

// ---------------------------------------------------------------------------
// Work model

ComplexityExponents complexity_exponents(double gamma, double d) {
    if (!(gamma > 0.0)) throw UsageError("complexity_exponents: gamma must be positive");
    return {-((d + 2.0) / (2.0 * gamma) + 2.0), -(d + 2.0) / gamma, -((d + 2.0) / (2.0 * gamma) + 1.0)};
}

WorkPrediction predict_work(const SampleSchedule& schedule, int min_level, double d, double kappa, double delta,
                            const WorkModelConstants& constants, BaseCount rule) {
    if (d < 0.0) throw UsageError("predict_work: dimension must be >= 0");
    if (!(kappa > 0.0)) throw UsageError("predict_work: kappa must be positive");
    if (delta < 0.0) throw UsageError("predict_work: delta must be >= 0");
    const int L = schedule.top_level;
    const bool single = schedule.mode == ScheduleMode::Singlelevel;
    const int first = single ? L : min_level;
    if (first < 1 || first > L) throw UsageError("predict_work: minimum level must lie in [1, L]");

    WorkPrediction w;
    for (int l = first; l <= L; ++l) {
        const double n = static_cast<double>(schedule.count_for(l, first, rule));
        const double cost = constants.per_sample * std::exp2((d + 2.0) * l);
        w.level_index.push_back(l);
        w.per_level.push_back(n * cost);
        w.sampling += n * cost;
    }
    w.summation = constants.summation * std::exp2(delta * L);
    w.total = w.sampling + w.summation;
    w.exponents = complexity_exponents(schedule.params.gamma, d);

    const double eta = schedule.eta();
    w.kappa_below_two_eta = kappa < 2.0 * eta;
    if (w.kappa_below_two_eta) {
        w.bound_exponent = std::max(2.0, delta);
        w.log_power = 0.0;
    } else {
        w.bound_exponent = std::max(2.0 + kappa - 2.0 * eta, delta);
        w.log_power = 2.0 + schedule.params.eps;
    }
    w.zeta = schedule.params.eps > 0.0 ? std::riemann_zeta(1.0 + schedule.params.eps)
                                       : std::numeric_limits<double>::infinity();
    return w;
}

}  // namespace spde_mlmc
