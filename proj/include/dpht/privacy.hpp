#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "dpht/random.hpp"
#include "dpht/rankstats.hpp"
#include "dpht/samples.hpp"

namespace dpht {

enum class TestKind { kw, kwabs, mw, wilcoxon, ttest };

const char* to_string(TestKind kind) noexcept;
std::optional<TestKind> parse_test_kind(std::string_view name) noexcept;

// epsilon may be +infinity, which disables noise and yields the public test.
struct PrivacyBudget {
    double epsilon = 1.0;
    double delta = 0.0;
    // MW: share of epsilon spent estimating the smaller group size.
    // t-test: share of epsilon spent on the mean.
    std::optional<double> split;

    static constexpr double default_mw_split = 0.65;
    static constexpr double default_t_split = 0.5;
    static constexpr double default_mw_delta = 1e-6;

    double split_or_default(TestKind kind) const noexcept;
};

// Throws invalid_parameter when the budget cannot be used for `kind`.
void validate_budget(const PrivacyBudget& budget, TestKind kind, bool known_equal_groups = false);

namespace sensitivity {

inline constexpr double kw = 87.0;
inline constexpr double kwabs = 8.0;
inline double wilcoxon_pratt(std::size_t n) { return 2.0 * static_cast<double>(n); }
inline double mean(std::size_t n) { return 2.0 / static_cast<double>(n); }
inline double variance(std::size_t n) { return 5.0 / static_cast<double>(n - 1); }

}  // namespace sensitivity

// Inverse-CDF Laplace draw: -b * sgn(u - 1/2) * ln(1 - 2|u - 1/2|).
double laplace_from_uniform(double scale, double u);
double laplace_sample(double scale, RandomStream& rng);

// value + Lap(sensitivity / epsilon); returns value untouched (and draws
// nothing) when epsilon is infinite.
double add_laplace(double value, double sensitivity, double epsilon, RandomStream& rng);

struct MwRelease {
    double m_tilde = 0.0;
    std::size_t m_star = 0;
};

struct PrivateStatResult {
    double statistic = 0.0;
    std::optional<MwRelease> mw;
};

PrivateStatResult private_kw(const GroupedSample& db, const PrivacyBudget& budget, RandomStream& rng);
PrivateStatResult private_kwabs(const GroupedSample& db, const PrivacyBudget& budget, RandomStream& rng);
PrivateStatResult private_mw(const GroupedSample& db, const PrivacyBudget& budget, RandomStream& rng,
                             bool known_equal_groups = false);
PrivateStatResult private_wilcoxon(const PairedSample& db, const PrivacyBudget& budget, RandomStream& rng);
PrivateStatResult private_t(const BoundedSample& db, const PrivacyBudget& budget, RandomStream& rng);

// c = -ln(2 delta) / eps_m: with probability 1 - delta, m_tilde - c <= m.
double mw_size_margin(double delta, double epsilon_m);
// max(ceil(m_tilde - c), 0), additionally capped at floor(n / 2).
std::size_t mw_lower_size_bound(double m_tilde, double margin, std::size_t n);

// Noise stage of the MW release, given the public statistic U, the total size
// n and the smaller group size m. Also used by the null simulator.
PrivateStatResult privatize_mw(double u, std::size_t n, std::size_t m, const PrivacyBudget& budget,
                               RandomStream& rng, bool known_equal_groups = false);

// Noise stage of the t release from the sample mean and variance.
double privatize_t(const MeanVariance& moments, std::size_t n, const PrivacyBudget& budget,
                   RandomStream& rng);

}  // namespace dpht
