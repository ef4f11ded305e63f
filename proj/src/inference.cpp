#include "dpht/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dpht/error.hpp"
#include "dpht/rankstats.hpp"
#include "parallel.hpp"

namespace dpht {
namespace {

constexpr double kNullSigmaT = 0.3;

void require_reps(std::size_t z) {
    if (z < 1) throw Error(ErrorCode::invalid_parameter, "a reference distribution needs z >= 1 samples");
}

// Fills z samples; replicate i reads only from base.derive("replicate", i).
template <class Draw>
std::vector<double> simulate(std::size_t z, const RandomStream& base, Draw&& draw) {
    std::vector<double> out(z);
    const std::uint64_t tag = hash_tag("replicate");
    detail::parallel_for(z, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            RandomStream rng = base.derive(tag, i);
            out[i] = draw(rng);
        }
    });
    return out;
}

std::vector<std::vector<double>> uniform_groups(std::span<const std::size_t> sizes, RandomStream& rng) {
    std::vector<std::vector<double>> groups(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        groups[i].resize(sizes[i]);
        for (double& x : groups[i]) x = rng.uniform();
    }
    return groups;
}

void check_groups(std::size_t g, std::size_t n) {
    if (g < 2) throw Error(ErrorCode::invalid_parameter, "need g >= 2 groups");
    if (n < g) throw Error(ErrorCode::invalid_parameter, "need n >= g");
}

double truncated_null_draw(RandomStream& rng) {
    while (true) {
        const double x = kNullSigmaT * rng.normal();
        if (x >= -1.0 && x <= 1.0) return x;
    }
}

}  // namespace

const char* to_string(Tail tail) noexcept {
    switch (tail) {
        case Tail::upper: return "upper";
        case Tail::lower: return "lower";
        case Tail::two_sided: return "two-sided";
    }
    return "unknown";
}

const char* to_string(ReferenceMode mode) noexcept {
    switch (mode) {
        case ReferenceMode::full_sim: return "full-sim";
        case ReferenceMode::chi2_laplace: return "chi2-laplace";
        case ReferenceMode::normal_laplace: return "normal-laplace";
        case ReferenceMode::normal_sim: return "normal-sim";
    }
    return "unknown";
}

ReferenceDistribution::ReferenceDistribution(std::vector<double> samples, Tail direction, ReferenceMode provenance)
    : samples_(std::move(samples)), direction_(direction), provenance_(provenance) {
    for (const double x : samples_) {
        if (std::isnan(x)) throw Error(ErrorCode::invalid_input, "reference samples must not be NaN");
    }
    std::sort(samples_.begin(), samples_.end());
    if (direction_ == Tail::two_sided) {
        magnitudes_.reserve(samples_.size());
        for (const double x : samples_) magnitudes_.push_back(std::fabs(x));
        std::sort(magnitudes_.begin(), magnitudes_.end());
    }
}

std::vector<std::size_t> near_equal_groups(std::size_t n, std::size_t g) {
    std::vector<std::size_t> sizes(g, n / g);
    for (std::size_t i = 0; i < n % g; ++i) ++sizes[i];
    return sizes;
}

ReferenceDistribution ref_kw(std::size_t g, std::size_t n, double epsilon, std::size_t z, const RandomStream& rng,
                             ReferenceMode mode) {
    check_groups(g, n);
    require_reps(z);
    const PrivacyBudget budget{epsilon, 0.0, std::nullopt};
    validate_budget(budget, TestKind::kw);
    if (mode == ReferenceMode::chi2_laplace) {
        auto samples = simulate(z, rng, [&](RandomStream& r) {
            double chi2 = 0.0;
            for (std::size_t k = 0; k + 1 < g; ++k) {
                const double x = r.normal();
                chi2 += x * x;
            }
            return add_laplace(chi2, sensitivity::kw, epsilon, r);
        });
        return {std::move(samples), Tail::upper, mode};
    }
    if (mode != ReferenceMode::full_sim) {
        throw Error(ErrorCode::invalid_parameter, std::string("kw reference does not support ") + to_string(mode));
    }
    const std::vector<std::size_t> sizes = near_equal_groups(n, g);
    auto samples = simulate(z, rng, [&](RandomStream& r) {
        const GroupedSample db(uniform_groups(sizes, r));
        return private_kw(db, budget, r).statistic;
    });
    return {std::move(samples), Tail::upper, ReferenceMode::full_sim};
}

ReferenceDistribution ref_kwabs_sized(std::span<const std::size_t> sizes, double epsilon, std::size_t z,
                                      const RandomStream& rng) {
    std::size_t n = 0;
    for (const std::size_t s : sizes) n += s;
    check_groups(sizes.size(), n);
    require_reps(z);
    const PrivacyBudget budget{epsilon, 0.0, std::nullopt};
    validate_budget(budget, TestKind::kwabs);
    auto samples = simulate(z, rng, [&](RandomStream& r) {
        const GroupedSample db(uniform_groups(sizes, r));
        return private_kwabs(db, budget, r).statistic;
    });
    return {std::move(samples), Tail::upper, ReferenceMode::full_sim};
}

ReferenceDistribution ref_kwabs(std::size_t g, std::size_t n, double epsilon, std::size_t z,
                                const RandomStream& rng) {
    check_groups(g, n);
    const std::vector<std::size_t> sizes = near_equal_groups(n, g);
    return ref_kwabs_sized(sizes, epsilon, z, rng);
}

ReferenceDistribution ref_mw(std::size_t n, std::size_t m_star, const PrivacyBudget& budget, std::size_t z,
                             const RandomStream& rng, ReferenceMode mode, bool known_equal_groups) {
    require_reps(z);
    validate_budget(budget, TestKind::mw, known_equal_groups);
    if (n < 2) throw Error(ErrorCode::invalid_parameter, "Mann-Whitney needs n >= 2");
    if (known_equal_groups) m_star = n / 2;
    if (m_star > n / 2) {
        throw Error(ErrorCode::invalid_parameter, "m* must not exceed floor(n/2)");
    }
    if (mode == ReferenceMode::normal_laplace) {
        const double m = static_cast<double>(m_star);
        const double rest = static_cast<double>(n - m_star);
        const double mean = m * rest / 2.0;
        const double sd = std::sqrt(m * rest * (static_cast<double>(n) + 1.0) / 12.0);
        const double eps_u = known_equal_groups
                                 ? budget.epsilon
                                 : (1.0 - budget.split_or_default(TestKind::mw)) * budget.epsilon;
        auto samples = simulate(z, rng, [&](RandomStream& r) {
            const double u = mean + sd * r.normal();
            return add_laplace(u, rest, eps_u, r);
        });
        return {std::move(samples), Tail::lower, mode};
    }
    if (mode != ReferenceMode::full_sim) {
        throw Error(ErrorCode::invalid_parameter, std::string("mw reference does not support ") + to_string(mode));
    }
    const double m = static_cast<double>(m_star);
    const double max_u = m * static_cast<double>(n - m_star);
    auto samples = simulate(z, rng, [&](RandomStream& r) {
        // Under a continuous null the smaller group's ranks are a uniform
        // m-subset of 1..n; an empty group gives U = 0.
        thread_local std::vector<std::uint32_t> ranks;
        ranks.resize(n);
        std::iota(ranks.begin(), ranks.end(), 1u);
        double rank_sum = 0.0;
        for (std::size_t k = 0; k < m_star; ++k) {
            std::swap(ranks[k], ranks[k + r.below(n - k)]);
            rank_sum += ranks[k];
        }
        const double u1 = rank_sum - m * (m + 1.0) / 2.0;
        return privatize_mw(std::min(u1, max_u - u1), n, m_star, budget, r, known_equal_groups).statistic;
    });
    return {std::move(samples), Tail::lower, ReferenceMode::full_sim};
}

double wilcoxon_null_sd(std::size_t n) {
    const double nd = static_cast<double>(n);
    return std::sqrt(nd * (nd + 1.0) * (2.0 * nd + 1.0) / 6.0);
}

ReferenceDistribution ref_wilcoxon(std::size_t n, double epsilon, std::size_t z, const RandomStream& rng) {
    if (n < 1) throw Error(ErrorCode::invalid_parameter, "Wilcoxon needs n >= 1");
    require_reps(z);
    validate_budget({epsilon, 0.0, std::nullopt}, TestKind::wilcoxon);
    const double sd = wilcoxon_null_sd(n);
    const double sens = sensitivity::wilcoxon_pratt(n);
    auto samples = simulate(z, rng, [&](RandomStream& r) { return add_laplace(sd * r.normal(), sens, epsilon, r); });
    return {std::move(samples), Tail::two_sided, ReferenceMode::normal_laplace};
}

ReferenceDistribution ref_t(std::size_t n, const PrivacyBudget& budget, std::size_t z, const RandomStream& rng) {
    if (n < 2) throw Error(ErrorCode::invalid_parameter, "the t-test needs n >= 2");
    require_reps(z);
    validate_budget(budget, TestKind::ttest);
    auto samples = simulate(z, rng, [&](RandomStream& r) {
        std::vector<double> x(n);
        for (double& v : x) v = truncated_null_draw(r);
        return privatize_t(mean_variance(x), n, budget, r);
    });
    return {std::move(samples), Tail::two_sided, ReferenceMode::normal_sim};
}

double p_value(double stat, const ReferenceDistribution& ref) {
    if (std::isnan(stat)) throw Error(ErrorCode::invalid_input, "statistic is NaN");
    if (ref.size() == 0) throw Error(ErrorCode::invalid_parameter, "empty reference distribution");
    const auto z = static_cast<double>(ref.size());
    const auto s = ref.samples();
    switch (ref.direction()) {
        case Tail::upper: {
            const auto at_least = s.end() - std::lower_bound(s.begin(), s.end(), stat);
            return static_cast<double>(at_least) / z;
        }
        case Tail::lower: {
            const auto at_most = std::upper_bound(s.begin(), s.end(), stat) - s.begin();
            return static_cast<double>(at_most) / z;
        }
        case Tail::two_sided: {
            const auto m = ref.magnitudes();
            const auto at_least = m.end() - std::lower_bound(m.begin(), m.end(), std::fabs(stat));
            return static_cast<double>(at_least) / z;
        }
    }
    return 1.0;
}

double critical_value(const ReferenceDistribution& ref, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::invalid_parameter, "alpha must lie in (0, 1)");
    const auto z = static_cast<double>(ref.size());
    if (z * alpha < 10.0) {
        throw Error(ErrorCode::invalid_parameter,
                    "alpha = " + std::to_string(alpha) + " is too small for z = " + std::to_string(ref.size()) +
                        " (need z * alpha >= 10)");
    }
    const double q = ref.direction() == Tail::lower ? alpha : 1.0 - alpha;
    const auto values = ref.direction() == Tail::two_sided ? ref.magnitudes() : ref.samples();
    // Inverse empirical CDF: smallest sample with F >= q.
    auto idx = static_cast<std::size_t>(std::ceil(q * z - 1e-9));
    idx = std::clamp<std::size_t>(idx, 1, values.size());
    return values[idx - 1];
}

double quantile(const ReferenceDistribution& ref, double q) {
    if (!(q > 0.0 && q < 1.0)) throw Error(ErrorCode::invalid_parameter, "quantile level must lie in (0, 1)");
    if (ref.size() == 0) throw Error(ErrorCode::invalid_parameter, "empty reference distribution");
    const auto s = ref.samples();
    auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(s.size()) - 1e-9));
    idx = std::clamp<std::size_t>(idx, 1, s.size());
    return s[idx - 1];
}

Release release_statistic(const Dataset& data, TestKind test, const PrivacyBudget& budget, RandomStream& rng,
                          bool known_equal_groups) {
    Release out;
    out.test = test;
    out.budget = budget;
    out.known_equal_groups = test == TestKind::mw && known_equal_groups;
    auto mismatch = [&]() -> Error {
        return Error(ErrorCode::invalid_input, std::string("data layout does not match the ") + to_string(test) + " test");
    };
    switch (test) {
        case TestKind::kw:
        case TestKind::kwabs:
        case TestKind::mw: {
            const auto* db = std::get_if<GroupedSample>(&data);
            if (!db) throw mismatch();
            out.n = db->size();
            out.g = db->group_count();
            if (test == TestKind::kw) out.result = private_kw(*db, budget, rng);
            if (test == TestKind::kwabs) out.result = private_kwabs(*db, budget, rng);
            if (test == TestKind::mw) out.result = private_mw(*db, budget, rng, known_equal_groups);
            break;
        }
        case TestKind::wilcoxon: {
            const auto* db = std::get_if<PairedSample>(&data);
            if (!db) throw mismatch();
            out.n = db->size();
            out.g = 1;
            out.result = private_wilcoxon(*db, budget, rng);
            break;
        }
        case TestKind::ttest: {
            const auto* db = std::get_if<BoundedSample>(&data);
            if (!db) throw mismatch();
            out.n = db->size();
            out.g = 1;
            out.result = private_t(*db, budget, rng);
            break;
        }
    }
    return out;
}

ReferenceDistribution reference_for(const Release& release, std::size_t z, const RandomStream& rng,
                                    const ReferenceOptions& options) {
    const double eps = release.budget.epsilon;
    switch (release.test) {
        case TestKind::kw: return ref_kw(release.g, release.n, eps, z, rng, options.kw_mode);
        case TestKind::kwabs: return ref_kwabs(release.g, release.n, eps, z, rng);
        case TestKind::mw: {
            const std::size_t m_star = release.result.mw ? release.result.mw->m_star : release.n / 2;
            return ref_mw(release.n, m_star, release.budget, z, rng, options.mw_mode, release.known_equal_groups);
        }
        case TestKind::wilcoxon: return ref_wilcoxon(release.n, eps, z, rng);
        case TestKind::ttest: return ref_t(release.n, release.budget, z, rng);
    }
    throw Error(ErrorCode::invalid_parameter, "unknown test");
}

RandomStream statistic_stream(std::uint64_t seed) { return RandomStream(seed, hash_tag("statistic")); }
RandomStream reference_stream(std::uint64_t seed) { return RandomStream(seed, hash_tag("reference")); }

TestOutcome complete_test(const Release& release, const TestRequest& request) {
    if (request.reps < 1000) {
        throw Error(ErrorCode::invalid_parameter, "released p-values need at least 1000 reference samples");
    }
    const ReferenceDistribution ref = reference_for(release, request.reps, reference_stream(request.seed),
                                                    request.reference);
    TestOutcome out;
    out.test = release.test;
    out.statistic = release.result.statistic;
    out.p_value = p_value(release.result.statistic, ref);
    out.n = release.n;
    out.g = release.g;
    out.budget = release.budget;
    const bool has_split = release.test == TestKind::ttest || (release.test == TestKind::mw && !release.known_equal_groups);
    out.budget.split = has_split ? std::optional<double>(release.budget.split_or_default(release.test)) : std::nullopt;
    out.known_equal_groups = release.known_equal_groups;
    out.reps = request.reps;
    out.seed = request.seed;
    out.reference = ref.provenance();
    out.mw = release.result.mw;
    return out;
}

TestOutcome run_test(const Dataset& data, const TestRequest& request) {
    return run_test_with([&]() -> const Dataset& { return data; }, request);
}

}  // namespace dpht
