#include "dpht/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dpht/error.hpp"

namespace dpht {

const char* to_string(TestKind kind) noexcept {
    switch (kind) {
        case TestKind::kw: return "kw";
        case TestKind::kwabs: return "kwabs";
        case TestKind::mw: return "mw";
        case TestKind::wilcoxon: return "wilcoxon";
        case TestKind::ttest: return "ttest";
    }
    return "unknown";
}

std::optional<TestKind> parse_test_kind(std::string_view name) noexcept {
    for (const TestKind kind : {TestKind::kw, TestKind::kwabs, TestKind::mw, TestKind::wilcoxon, TestKind::ttest}) {
        if (name == to_string(kind)) return kind;
    }
    return std::nullopt;
}

double PrivacyBudget::split_or_default(TestKind kind) const noexcept {
    if (split) return *split;
    return kind == TestKind::ttest ? default_t_split : default_mw_split;
}

void validate_budget(const PrivacyBudget& budget, TestKind kind, bool known_equal_groups) {
    if (!(budget.epsilon > 0.0)) {
        throw Error(ErrorCode::invalid_parameter, "epsilon must be positive");
    }
    if (!(budget.delta >= 0.0 && budget.delta < 1.0)) {
        throw Error(ErrorCode::invalid_parameter, "delta must lie in [0, 1)");
    }
    const bool uses_split = kind == TestKind::ttest || (kind == TestKind::mw && !known_equal_groups);
    if (budget.split) {
        if (!uses_split) {
            throw Error(ErrorCode::invalid_parameter,
                        std::string("a budget split does not apply to ") + to_string(kind) +
                            (kind == TestKind::mw ? " with known equal groups" : ""));
        }
        if (!(*budget.split > 0.0 && *budget.split < 1.0)) {
            throw Error(ErrorCode::invalid_parameter, "the budget split must lie strictly between 0 and 1");
        }
    }
    if (kind == TestKind::mw) {
        if (!known_equal_groups && budget.delta == 0.0) {
            throw Error(ErrorCode::invalid_parameter,
                        "Mann-Whitney needs delta > 0 unless the groups are known to be equal");
        }
    } else if (budget.delta != 0.0) {
        throw Error(ErrorCode::invalid_parameter, std::string(to_string(kind)) + " is pure epsilon-DP; delta must be 0");
    }
}

double laplace_from_uniform(double scale, double u) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw Error(ErrorCode::invalid_parameter, "Laplace scale must be positive and finite");
    }
    const double centred = u - 0.5;
    const double sign = centred > 0.0 ? 1.0 : (centred < 0.0 ? -1.0 : 0.0);
    return -scale * sign * std::log(1.0 - 2.0 * std::fabs(centred));
}

double laplace_sample(double scale, RandomStream& rng) {
    return laplace_from_uniform(scale, rng.uniform());
}

double add_laplace(double value, double sensitivity, double epsilon, RandomStream& rng) {
    if (std::isinf(epsilon)) return value;
    return value + laplace_sample(sensitivity / epsilon, rng);
}

PrivateStatResult private_kw(const GroupedSample& db, const PrivacyBudget& budget, RandomStream& rng) {
    validate_budget(budget, TestKind::kw);
    const std::vector<double> pooled = db.pooled();
    const RankVector ranks = rank_random(pooled, rng);
    const double h = kw_stat_simplified(db, ranks);
    return {add_laplace(h, sensitivity::kw, budget.epsilon, rng), std::nullopt};
}

PrivateStatResult private_kwabs(const GroupedSample& db, const PrivacyBudget& budget, RandomStream& rng) {
    validate_budget(budget, TestKind::kwabs);
    const std::vector<double> pooled = db.pooled();
    const RankVector ranks = rank_random(pooled, rng);
    const double h = kwabs_stat_simplified(db, ranks);
    return {add_laplace(h, sensitivity::kwabs, budget.epsilon, rng), std::nullopt};
}

double mw_size_margin(double delta, double epsilon_m) {
    return -std::log(2.0 * delta) / epsilon_m;
}

std::size_t mw_lower_size_bound(double m_tilde, double margin, std::size_t n) {
    const double bound = std::ceil(m_tilde - margin);
    if (!(bound > 0.0)) return 0;
    return std::min(static_cast<std::size_t>(bound), n / 2);
}

PrivateStatResult privatize_mw(double u, std::size_t n, std::size_t m, const PrivacyBudget& budget,
                               RandomStream& rng, bool known_equal_groups) {
    if (known_equal_groups) {
        const auto sens = static_cast<double>(n - n / 2);
        return {add_laplace(u, sens, budget.epsilon, rng), std::nullopt};
    }
    const double fraction = budget.split_or_default(TestKind::mw);
    const double eps_m = fraction * budget.epsilon;
    const double eps_u = (1.0 - fraction) * budget.epsilon;
    MwRelease release;
    release.m_tilde = add_laplace(static_cast<double>(m), 1.0, eps_m, rng);
    release.m_star = mw_lower_size_bound(release.m_tilde, mw_size_margin(budget.delta, eps_m), n);
    const auto sens = static_cast<double>(n - release.m_star);
    return {add_laplace(u, sens, eps_u, rng), release};
}

PrivateStatResult private_mw(const GroupedSample& db, const PrivacyBudget& budget, RandomStream& rng,
                             bool known_equal_groups) {
    validate_budget(budget, TestKind::mw, known_equal_groups);
    const MannWhitneyU u = mw_stat(db);
    const std::size_t m = std::min(db.group_size(0), db.group_size(1));
    return privatize_mw(u.u, db.size(), m, budget, rng, known_equal_groups);
}

PrivateStatResult private_wilcoxon(const PairedSample& db, const PrivacyBudget& budget, RandomStream& rng) {
    validate_budget(budget, TestKind::wilcoxon);
    const double w = wilcoxon_pratt_stat(db);
    return {add_laplace(w, sensitivity::wilcoxon_pratt(db.size()), budget.epsilon, rng), std::nullopt};
}

double privatize_t(const MeanVariance& moments, std::size_t n, const PrivacyBudget& budget, RandomStream& rng) {
    const double fraction = budget.split_or_default(TestKind::ttest);
    const double mean = add_laplace(moments.mean, sensitivity::mean(n), fraction * budget.epsilon, rng);
    const double variance =
        add_laplace(moments.variance, sensitivity::variance(n), (1.0 - fraction) * budget.epsilon, rng);
    // A non-positive noisy variance means the statistic cannot be formed;
    // report 0, i.e. decline to reject.
    if (!(variance > 0.0)) return 0.0;
    return mean / std::sqrt(variance / static_cast<double>(n));
}

PrivateStatResult private_t(const BoundedSample& db, const PrivacyBudget& budget, RandomStream& rng) {
    validate_budget(budget, TestKind::ttest);
    return {privatize_t(mean_variance(db.values()), db.size(), budget, rng), std::nullopt};
}

}  // namespace dpht
