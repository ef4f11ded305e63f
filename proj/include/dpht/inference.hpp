#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dpht/privacy.hpp"
#include "dpht/random.hpp"
#include "dpht/samples.hpp"

namespace dpht {

enum class Tail { upper, lower, two_sided };

enum class ReferenceMode { full_sim, chi2_laplace, normal_laplace, normal_sim };

const char* to_string(Tail tail) noexcept;
const char* to_string(ReferenceMode mode) noexcept;

// Simulated null statistics, kept sorted.
class ReferenceDistribution {
public:
    ReferenceDistribution(std::vector<double> samples, Tail direction, ReferenceMode provenance);

    std::span<const double> samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    Tail direction() const noexcept { return direction_; }
    ReferenceMode provenance() const noexcept { return provenance_; }

    // Sorted |samples|, populated for two-sided distributions.
    std::span<const double> magnitudes() const noexcept { return magnitudes_; }

private:
    std::vector<double> samples_;
    std::vector<double> magnitudes_;
    Tail direction_;
    ReferenceMode provenance_;
};

// Group sizes floor(n/g), with the first n mod g groups one larger.
std::vector<std::size_t> near_equal_groups(std::size_t n, std::size_t g);

// Reference generators. Replicate i draws only from rng.derive("replicate", i),
// so output is independent of the worker count.
ReferenceDistribution ref_kw(std::size_t g, std::size_t n, double epsilon, std::size_t z,
                             const RandomStream& rng, ReferenceMode mode = ReferenceMode::chi2_laplace);
ReferenceDistribution ref_kwabs(std::size_t g, std::size_t n, double epsilon, std::size_t z,
                                const RandomStream& rng);
// Same simulation with caller-chosen group sizes.
ReferenceDistribution ref_kwabs_sized(std::span<const std::size_t> sizes, double epsilon, std::size_t z,
                                      const RandomStream& rng);
ReferenceDistribution ref_mw(std::size_t n, std::size_t m_star, const PrivacyBudget& budget, std::size_t z,
                             const RandomStream& rng, ReferenceMode mode = ReferenceMode::full_sim,
                             bool known_equal_groups = false);
ReferenceDistribution ref_wilcoxon(std::size_t n, double epsilon, std::size_t z, const RandomStream& rng);
ReferenceDistribution ref_t(std::size_t n, const PrivacyBudget& budget, std::size_t z, const RandomStream& rng);

// Null standard deviation of the Pratt statistic, sqrt(n(n+1)(2n+1)/6).
double wilcoxon_null_sd(std::size_t n);

// upper: #{s >= stat}/z, lower: #{s <= stat}/z, two-sided: #{|s| >= |stat|}/z.
double p_value(double stat, const ReferenceDistribution& ref);

// (1 - alpha) empirical quantile (of |samples| when two-sided, the alpha
// quantile when lower-tail). Requires z * alpha >= 10.
double critical_value(const ReferenceDistribution& ref, double alpha);

// Inverse empirical CDF of the signed samples, q in (0, 1).
double quantile(const ReferenceDistribution& ref, double q);

struct ReferenceOptions {
    ReferenceMode kw_mode = ReferenceMode::chi2_laplace;
    ReferenceMode mw_mode = ReferenceMode::full_sim;
};

// Everything released by the private statistic step. Reference generation
// consumes nothing else.
struct Release {
    TestKind test = TestKind::kw;
    PrivateStatResult result;
    std::size_t n = 0;
    std::size_t g = 0;
    PrivacyBudget budget;
    bool known_equal_groups = false;
};

Release release_statistic(const Dataset& data, TestKind test, const PrivacyBudget& budget, RandomStream& rng,
                          bool known_equal_groups = false);

ReferenceDistribution reference_for(const Release& release, std::size_t z, const RandomStream& rng,
                                    const ReferenceOptions& options = {});

struct TestOutcome {
    TestKind test = TestKind::kw;
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
    std::size_t g = 0;
    PrivacyBudget budget;  // split holds the fraction actually used (MW / t only)
    bool known_equal_groups = false;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
    ReferenceMode reference = ReferenceMode::full_sim;
    std::optional<MwRelease> mw;
};

struct TestRequest {
    TestKind test = TestKind::kw;
    PrivacyBudget budget;
    std::size_t reps = 100000;
    std::uint64_t seed = 0;
    bool known_equal_groups = false;
    ReferenceOptions reference;
};

// The statistic and reference streams are derived from request.seed.
RandomStream statistic_stream(std::uint64_t seed);
RandomStream reference_stream(std::uint64_t seed);

TestOutcome complete_test(const Release& release, const TestRequest& request);

// `fetch` is called exactly once, to produce the private statistic; nothing
// after that step sees the database.
template <class Fetch>
TestOutcome run_test_with(Fetch&& fetch, const TestRequest& request) {
    auto stat_rng = statistic_stream(request.seed);
    const Release release = [&] {
        const Dataset& data = fetch();
        return release_statistic(data, request.test, request.budget, stat_rng, request.known_equal_groups);
    }();
    return complete_test(release, request);
}

TestOutcome run_test(const Dataset& data, const TestRequest& request);

}  // namespace dpht
