#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <tuple>
#include <vector>

#include "dpht/inference.hpp"
#include "dpht/privacy.hpp"
#include "dpht/samples.hpp"

namespace dpht {

enum class DataShape { normal, uniform, zero_inflated };

struct SimulationSpec {
    TestKind test = TestKind::kwabs;
    std::size_t n = 100;
    std::size_t g = 3;                // forced to 2 for mw, ignored for wilcoxon/ttest
    std::vector<double> proportions;  // empty means near-equal groups
    double effect = 0.0;              // spread of group means, in sigma
    DataShape shape = DataShape::normal;
    double zero_fraction = 0.0;       // share of paired rows with d = 0 (zero_inflated)
    PrivacyBudget budget;
    bool known_equal_groups = false;
    double alpha = 0.05;
    std::size_t trials = 1000;
    std::size_t z = 20000;
    std::uint64_t seed = 1;
    ReferenceOptions reference;
};

struct PowerEstimate {
    double power = 0.0;
    std::size_t rejections = 0;
    std::size_t trials = 0;
    double standard_error = 0.0;
};

struct QQPoint {
    double theoretical = 0.0;
    double empirical = 0.0;
};

struct Type1Result {
    std::vector<double> p_values;  // trial order
    std::vector<QQPoint> qq;

    double rejection_rate(double alpha) const;
    // Empirical q-quantile of the p-values.
    double quantile(double q) const;
};

struct SplitPower {
    double fraction = 0.0;
    PowerEstimate estimate;
};

void validate_spec(const SimulationSpec& spec);

// Group sizes for `proportions` (near-equal when empty); remainders go to the
// first groups.
std::vector<std::size_t> allocate_groups(std::size_t n, std::span<const double> proportions, std::size_t g);

// Draws one database from the alternative described by spec. Grouped data:
// group i ~ Normal(i * effect / (g - 1), 1). Paired data: u ~ N(0, 1),
// v ~ N(effect, 1). t-test data: d = v - u, standardised, scaled by the
// reference sigma 0.3 and clamped to [-1, 1].
Dataset generate_dataset(const SimulationSpec& spec, RandomStream& rng);

// Memoises reference distributions on the released public parameters.
class ReferenceCache {
public:
    ReferenceCache(std::size_t z, std::uint64_t seed, ReferenceOptions options)
        : z_(z), seed_(seed), options_(options) {}

    const ReferenceDistribution& get(const Release& release);
    std::size_t size() const noexcept { return cache_.size(); }

private:
    using Key = std::tuple<int, std::size_t, std::size_t, double, double, double, bool, std::size_t>;

    std::size_t z_;
    std::uint64_t seed_;
    ReferenceOptions options_;
    std::map<Key, std::unique_ptr<ReferenceDistribution>> cache_;
};

PowerEstimate simulate_power(const SimulationSpec& spec);
Type1Result simulate_type1(const SimulationSpec& spec);
std::vector<SplitPower> sweep_budget_split(const SimulationSpec& spec, std::span<const double> fractions);

// Smallest n in [lo, hi] whose estimated power reaches `target`, by bisection
// on the assumption that power grows with n. Returns hi + 1 when even hi
// falls short.
std::size_t min_sample_size(SimulationSpec spec, double target, std::size_t lo, std::size_t hi);

}  // namespace dpht
