#pragma once

#include <span>
#include <vector>

#include "dpht/random.hpp"
#include "dpht/samples.hpp"

namespace dpht {

enum class RankScheme { midrank, random_tiebreak };

struct RankVector {
    std::vector<double> ranks;
    RankScheme scheme = RankScheme::midrank;
};

// Ties share the average of the sorted positions they occupy.
RankVector rank_midrank(std::span<const double> values);

// Ranks 1..n; each tie class is ordered by a uniform random permutation drawn
// from `rng`, distinct values keep their sorted order.
RankVector rank_random(std::span<const double> values, RandomStream& rng);

// Kruskal-Wallis h. `ranks` follows GroupedSample::pooled() order. Random
// tie-break ranks use the no-ties shortcut 12/(n(n+1)) sum n_i rbar_i^2 - 3(n+1);
// midranks use the tie-aware ratio (n-1) sum n_i (rbar_i - rbar)^2 / sum (r - rbar)^2.
double kw_stat(const GroupedSample& db, const RankVector& ranks);
double kw_stat_simplified(const GroupedSample& db, const RankVector& ranks);
double kw_stat_general(const GroupedSample& db, const RankVector& ranks);

// Absolute-deviation variant. For untied ranks the denominator is a function
// of n alone, which yields the parity-dependent constant 4(n-1)/n^2 (even n)
// or 4/(n+1) (odd n).
double kwabs_stat(const GroupedSample& db, const RankVector& ranks);
double kwabs_stat_simplified(const GroupedSample& db, const RankVector& ranks);
double kwabs_stat_general(const GroupedSample& db, const RankVector& ranks);

struct MannWhitneyU {
    double u = 0.0;   // min(u1, u2)
    double u1 = 0.0;
    double u2 = 0.0;
};

MannWhitneyU mw_stat(const GroupedSample& db, const RankVector& ranks);
MannWhitneyU mw_stat(const GroupedSample& db);

// Standard signed-rank statistic: zero differences dropped before ranking.
double wilcoxon_stat(const PairedSample& db);
// Pratt variant: zero differences keep their rank with sign 0.
double wilcoxon_pratt_stat(const PairedSample& db);

struct MeanVariance {
    double mean = 0.0;
    double variance = 0.0;  // unbiased (n - 1 denominator)
};

MeanVariance mean_variance(std::span<const double> values);

double t_stat(const BoundedSample& db);

namespace kernels {

// Group-summary kernels over untied ranks, shared with the simulators.
// `rank_sums[i]` is the rank total of group i and `sizes[i]` its size.
double kw_from_rank_sums(std::span<const double> rank_sums, std::span<const std::size_t> sizes,
                         std::size_t n);
double kwabs_from_rank_sums(std::span<const double> rank_sums, std::span<const std::size_t> sizes,
                            std::size_t n);

}  // namespace kernels

}  // namespace dpht
