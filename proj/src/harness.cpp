#include "dpht/harness.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dpht/error.hpp"
#include "parallel.hpp"

namespace dpht {
namespace {

constexpr double kTScale = 0.3;

bool is_grouped(TestKind test) { return test == TestKind::kw || test == TestKind::kwabs || test == TestKind::mw; }

std::size_t effective_groups(const SimulationSpec& spec) {
    if (spec.test == TestKind::mw) return 2;
    return is_grouped(spec.test) ? spec.g : 1;
}

double draw_shaped(DataShape shape, double mean, RandomStream& rng) {
    if (shape == DataShape::uniform) return mean + std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0);
    return rng.normal(mean, 1.0);
}

std::vector<Pair> paired_rows(const SimulationSpec& spec, RandomStream& rng) {
    const std::size_t zeros = spec.shape == DataShape::zero_inflated
                                  ? static_cast<std::size_t>(std::llround(spec.zero_fraction * spec.n))
                                  : 0;
    const DataShape shape = spec.shape == DataShape::zero_inflated ? DataShape::normal : spec.shape;
    std::vector<Pair> rows(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        rows[i].u = draw_shaped(shape, 0.0, rng);
        rows[i].v = i < zeros ? rows[i].u : draw_shaped(shape, spec.effect, rng);
    }
    return rows;
}

// Releases run in parallel; references are built once per distinct public
// parameter set; p-values follow.
std::vector<double> run_trials(const SimulationSpec& spec) {
    validate_spec(spec);
    const RandomStream base(spec.seed, hash_tag("harness"));
    const std::uint64_t data_tag = hash_tag("data");
    const std::uint64_t test_tag = hash_tag("test");

    std::vector<Release> releases(spec.trials);
    detail::parallel_for(
        spec.trials,
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t t = begin; t < end; ++t) {
                RandomStream data_rng = base.derive(data_tag, t);
                RandomStream test_rng = base.derive(test_tag, t);
                const Dataset data = generate_dataset(spec, data_rng);
                releases[t] = release_statistic(data, spec.test, spec.budget, test_rng, spec.known_equal_groups);
            }
        },
        8);

    ReferenceCache cache(spec.z, spec.seed, spec.reference);
    std::vector<double> p(spec.trials);
    for (std::size_t t = 0; t < spec.trials; ++t) p[t] = p_value(releases[t].result.statistic, cache.get(releases[t]));
    return p;
}

}  // namespace

double Type1Result::rejection_rate(double alpha) const {
    if (p_values.empty()) return 0.0;
    const auto hits = std::count_if(p_values.begin(), p_values.end(), [&](double p) { return p < alpha; });
    return static_cast<double>(hits) / static_cast<double>(p_values.size());
}

double Type1Result::quantile(double q) const {
    if (p_values.empty()) throw Error(ErrorCode::invalid_parameter, "no p-values");
    std::vector<double> sorted = p_values;
    std::sort(sorted.begin(), sorted.end());
    auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size()) - 1e-9));
    idx = std::clamp<std::size_t>(idx, 1, sorted.size());
    return sorted[idx - 1];
}

void validate_spec(const SimulationSpec& spec) {
    if (spec.trials < 1) throw Error(ErrorCode::invalid_parameter, "trials must be >= 1");
    if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) throw Error(ErrorCode::invalid_parameter, "alpha must lie in (0, 1)");
    if (!(spec.effect >= 0.0) || !std::isfinite(spec.effect)) {
        throw Error(ErrorCode::invalid_parameter, "effect must be finite and >= 0");
    }
    if (spec.z < 1000) throw Error(ErrorCode::invalid_parameter, "z must be >= 1000");
    if (!(spec.zero_fraction >= 0.0 && spec.zero_fraction <= 1.0)) {
        throw Error(ErrorCode::invalid_parameter, "zero fraction must lie in [0, 1]");
    }
    if (spec.shape == DataShape::zero_inflated && is_grouped(spec.test)) {
        throw Error(ErrorCode::invalid_parameter, "zero-inflated data applies to paired tests only");
    }
    const std::size_t g = effective_groups(spec);
    if (is_grouped(spec.test)) {
        if (g < 2) throw Error(ErrorCode::invalid_parameter, "need g >= 2 groups");
        if (spec.n < g) throw Error(ErrorCode::invalid_parameter, "infeasible spec: n < g");
    }
    if (spec.n < 2) throw Error(ErrorCode::invalid_parameter, "need n >= 2");
    if (!spec.proportions.empty()) {
        if (!is_grouped(spec.test) || spec.proportions.size() != g) {
            throw Error(ErrorCode::invalid_parameter, "need one proportion per group");
        }
        double sum = 0.0;
        for (const double p : spec.proportions) {
            if (!(p >= 0.0)) throw Error(ErrorCode::invalid_parameter, "proportions must be >= 0");
            sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-9) throw Error(ErrorCode::invalid_parameter, "proportions must sum to 1");
    }
    validate_budget(spec.budget, spec.test, spec.known_equal_groups);
}

std::vector<std::size_t> allocate_groups(std::size_t n, std::span<const double> proportions, std::size_t g) {
    if (proportions.empty()) return near_equal_groups(n, g);
    std::vector<std::size_t> sizes(proportions.size());
    std::size_t used = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        sizes[i] = static_cast<std::size_t>(std::floor(proportions[i] * static_cast<double>(n) + 1e-9));
        used += sizes[i];
    }
    for (std::size_t i = 0; used < n; i = (i + 1) % sizes.size(), ++used) ++sizes[i];
    return sizes;
}

Dataset generate_dataset(const SimulationSpec& spec, RandomStream& rng) {
    if (is_grouped(spec.test)) {
        const std::size_t g = effective_groups(spec);
        const auto sizes = allocate_groups(spec.n, spec.proportions, g);
        std::vector<std::vector<double>> groups(g);
        for (std::size_t i = 0; i < g; ++i) {
            const double mean = static_cast<double>(i) * spec.effect / static_cast<double>(g - 1);
            groups[i].resize(sizes[i]);
            for (double& x : groups[i]) x = draw_shaped(spec.shape, mean, rng);
        }
        return GroupedSample(std::move(groups));
    }
    const std::vector<Pair> rows = paired_rows(spec, rng);
    if (spec.test == TestKind::wilcoxon) return PairedSample(rows);
    std::vector<double> values(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        values[i] = std::clamp(kTScale * rows[i].difference() / std::sqrt(2.0), -1.0, 1.0);
    }
    return BoundedSample(std::move(values));
}

const ReferenceDistribution& ReferenceCache::get(const Release& release) {
    const bool has_split = release.test == TestKind::ttest || (release.test == TestKind::mw && !release.known_equal_groups);
    const Key key{static_cast<int>(release.test),
                  release.n,
                  release.g,
                  release.budget.epsilon,
                  release.budget.delta,
                  has_split ? release.budget.split_or_default(release.test) : -1.0,
                  release.known_equal_groups,
                  release.result.mw ? release.result.mw->m_star : 0};
    auto it = cache_.find(key);
    if (it == cache_.end()) {
        auto ref = std::make_unique<ReferenceDistribution>(reference_for(release, z_, reference_stream(seed_), options_));
        it = cache_.emplace(key, std::move(ref)).first;
    }
    return *it->second;
}

PowerEstimate simulate_power(const SimulationSpec& spec) {
    const std::vector<double> p = run_trials(spec);
    PowerEstimate out;
    out.trials = spec.trials;
    out.rejections = static_cast<std::size_t>(std::count_if(p.begin(), p.end(), [&](double v) { return v < spec.alpha; }));
    out.power = static_cast<double>(out.rejections) / static_cast<double>(out.trials);
    out.standard_error = std::sqrt(out.power * (1.0 - out.power) / static_cast<double>(out.trials));
    return out;
}

Type1Result simulate_type1(const SimulationSpec& spec) {
    if (spec.effect != 0.0) throw Error(ErrorCode::invalid_parameter, "Type-I simulation needs effect = 0");
    Type1Result out;
    out.p_values = run_trials(spec);
    std::vector<double> sorted = out.p_values;
    std::sort(sorted.begin(), sorted.end());
    const auto count = static_cast<double>(sorted.size());
    out.qq.reserve(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        out.qq.push_back({static_cast<double>(i + 1) / (count + 1.0), sorted[i]});
    }
    return out;
}

std::vector<SplitPower> sweep_budget_split(const SimulationSpec& spec, std::span<const double> fractions) {
    if (spec.test != TestKind::ttest && !(spec.test == TestKind::mw && !spec.known_equal_groups)) {
        throw Error(ErrorCode::invalid_parameter, "budget split sweeps apply to mw and ttest");
    }
    std::vector<SplitPower> out;
    out.reserve(fractions.size());
    for (const double f : fractions) {
        if (!(f > 0.0 && f < 1.0)) {
            throw Error(ErrorCode::invalid_parameter, "split fraction must lie in (0, 1), got " + std::to_string(f));
        }
    }
    for (const double f : fractions) {
        SimulationSpec s = spec;
        s.budget.split = f;
        out.push_back({f, simulate_power(s)});
    }
    return out;
}

std::size_t min_sample_size(SimulationSpec spec, double target, std::size_t lo, std::size_t hi) {
    if (lo > hi) throw Error(ErrorCode::invalid_parameter, "empty search range");
    if (!(target > 0.0 && target <= 1.0)) throw Error(ErrorCode::invalid_parameter, "target power must lie in (0, 1]");
    auto reaches = [&](std::size_t n) {
        spec.n = n;
        return simulate_power(spec).power >= target;
    };
    if (!reaches(hi)) return hi + 1;
    if (reaches(lo)) return lo;
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        (reaches(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace dpht
