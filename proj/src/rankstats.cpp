#include "dpht/rankstats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dpht/error.hpp"

namespace dpht {
namespace {

std::vector<std::size_t> sorted_order(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    return order;
}

void require_finite(std::span<const double> values) {
    if (values.empty()) throw Error(ErrorCode::invalid_input, "cannot rank an empty list");
    for (const double x : values) {
        if (!std::isfinite(x)) throw Error(ErrorCode::invalid_input, "cannot rank non-finite values");
    }
}

struct GroupRankSums {
    std::vector<double> sums;
    std::vector<std::size_t> sizes;
};

GroupRankSums group_rank_sums(const GroupedSample& db, const RankVector& ranks) {
    if (ranks.ranks.size() != db.size()) {
        throw Error(ErrorCode::invalid_input, "rank vector length does not match the sample size");
    }
    GroupRankSums out;
    out.sums.reserve(db.group_count());
    out.sizes.reserve(db.group_count());
    std::size_t at = 0;
    for (const auto& group : db.groups()) {
        double sum = 0.0;
        for (std::size_t j = 0; j < group.size(); ++j) sum += ranks.ranks[at++];
        out.sums.push_back(sum);
        out.sizes.push_back(group.size());
    }
    return out;
}

// Sum of sign(d_i) * rank(|d_i|), ranking with midranks. Zero differences are
// either kept (rank occupied, sign 0) or removed before ranking.
double signed_rank_sum(std::span<const double> diffs, bool keep_zeros) {
    std::vector<double> magnitudes;
    std::vector<double> signs;
    magnitudes.reserve(diffs.size());
    signs.reserve(diffs.size());
    for (const double d : diffs) {
        if (d == 0.0 && !keep_zeros) continue;
        magnitudes.push_back(std::fabs(d));
        signs.push_back(d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0));
    }
    if (magnitudes.empty()) return 0.0;
    const RankVector ranks = rank_midrank(magnitudes);
    double w = 0.0;
    for (std::size_t i = 0; i < magnitudes.size(); ++i) w += signs[i] * ranks.ranks[i];
    return w;
}

}  // namespace

RankVector rank_midrank(std::span<const double> values) {
    require_finite(values);
    const std::vector<std::size_t> order = sorted_order(values);
    RankVector out{std::vector<double>(values.size()), RankScheme::midrank};
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        // Positions i+1 .. j (1-based) share their average.
        const double rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) out.ranks[order[k]] = rank;
        i = j;
    }
    return out;
}

RankVector rank_random(std::span<const double> values, RandomStream& rng) {
    require_finite(values);
    std::vector<std::size_t> order = sorted_order(values);
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        for (std::size_t k = j - i; k > 1; --k) {
            const std::size_t pick = static_cast<std::size_t>(rng.below(k));
            std::swap(order[i + k - 1], order[i + pick]);
        }
        i = j;
    }
    RankVector out{std::vector<double>(values.size()), RankScheme::random_tiebreak};
    for (std::size_t pos = 0; pos < order.size(); ++pos) out.ranks[order[pos]] = static_cast<double>(pos + 1);
    return out;
}

namespace kernels {

double kw_from_rank_sums(std::span<const double> rank_sums, std::span<const std::size_t> sizes, std::size_t n) {
    const double nd = static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < rank_sums.size(); ++i) {
        if (sizes[i] == 0) continue;
        acc += rank_sums[i] * rank_sums[i] / static_cast<double>(sizes[i]);
    }
    return 12.0 / (nd * (nd + 1.0)) * acc - 3.0 * (nd + 1.0);
}

double kwabs_from_rank_sums(std::span<const double> rank_sums, std::span<const std::size_t> sizes,
                            std::size_t n) {
    const double nd = static_cast<double>(n);
    const double centre = 0.5 * (nd + 1.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < rank_sums.size(); ++i) {
        acc += std::fabs(rank_sums[i] - static_cast<double>(sizes[i]) * centre);
    }
    const double scale = (n % 2 == 0) ? 4.0 * (nd - 1.0) / (nd * nd) : 4.0 / (nd + 1.0);
    return scale * acc;
}

}  // namespace kernels

double kw_stat_simplified(const GroupedSample& db, const RankVector& ranks) {
    const GroupRankSums g = group_rank_sums(db, ranks);
    return kernels::kw_from_rank_sums(g.sums, g.sizes, db.size());
}

double kw_stat_general(const GroupedSample& db, const RankVector& ranks) {
    const GroupRankSums g = group_rank_sums(db, ranks);
    const double mean_rank = 0.5 * (static_cast<double>(db.size()) + 1.0);
    double between = 0.0;
    for (std::size_t i = 0; i < g.sums.size(); ++i) {
        if (g.sizes[i] == 0) continue;
        const double diff = g.sums[i] / static_cast<double>(g.sizes[i]) - mean_rank;
        between += static_cast<double>(g.sizes[i]) * diff * diff;
    }
    double total = 0.0;
    for (const double r : ranks.ranks) total += (r - mean_rank) * (r - mean_rank);
    if (total == 0.0) throw Error(ErrorCode::degenerate, "Kruskal-Wallis h is undefined when every observation is tied");
    return (static_cast<double>(db.size()) - 1.0) * between / total;
}

double kw_stat(const GroupedSample& db, const RankVector& ranks) {
    return ranks.scheme == RankScheme::midrank ? kw_stat_general(db, ranks) : kw_stat_simplified(db, ranks);
}

double kwabs_stat_simplified(const GroupedSample& db, const RankVector& ranks) {
    const GroupRankSums g = group_rank_sums(db, ranks);
    return kernels::kwabs_from_rank_sums(g.sums, g.sizes, db.size());
}

double kwabs_stat_general(const GroupedSample& db, const RankVector& ranks) {
    const GroupRankSums g = group_rank_sums(db, ranks);
    const double mean_rank = 0.5 * (static_cast<double>(db.size()) + 1.0);
    double between = 0.0;
    for (std::size_t i = 0; i < g.sums.size(); ++i) {
        if (g.sizes[i] == 0) continue;
        between += static_cast<double>(g.sizes[i]) *
                   std::fabs(g.sums[i] / static_cast<double>(g.sizes[i]) - mean_rank);
    }
    double total = 0.0;
    for (const double r : ranks.ranks) total += std::fabs(r - mean_rank);
    if (total == 0.0) throw Error(ErrorCode::degenerate, "h_abs is undefined when every observation is tied");
    return (static_cast<double>(db.size()) - 1.0) * between / total;
}

double kwabs_stat(const GroupedSample& db, const RankVector& ranks) {
    return ranks.scheme == RankScheme::midrank ? kwabs_stat_general(db, ranks)
                                               : kwabs_stat_simplified(db, ranks);
}

MannWhitneyU mw_stat(const GroupedSample& db, const RankVector& ranks) {
    if (db.group_count() != 2) throw Error(ErrorCode::invalid_input, "Mann-Whitney needs exactly 2 groups");
    if (db.group_size(0) == 0 || db.group_size(1) == 0) {
        throw Error(ErrorCode::degenerate, "Mann-Whitney U is undefined with an empty group");
    }
    const GroupRankSums g = group_rank_sums(db, ranks);
    MannWhitneyU out;
    const auto n1 = static_cast<double>(g.sizes[0]);
    const auto n2 = static_cast<double>(g.sizes[1]);
    out.u1 = g.sums[0] - n1 * (n1 + 1.0) / 2.0;
    out.u2 = g.sums[1] - n2 * (n2 + 1.0) / 2.0;
    out.u = std::min(out.u1, out.u2);
    return out;
}

MannWhitneyU mw_stat(const GroupedSample& db) {
    const std::vector<double> pooled = db.pooled();
    return mw_stat(db, rank_midrank(pooled));
}

double wilcoxon_stat(const PairedSample& db) {
    const std::vector<double> d = db.differences();
    return signed_rank_sum(d, false);
}

double wilcoxon_pratt_stat(const PairedSample& db) {
    const std::vector<double> d = db.differences();
    return signed_rank_sum(d, true);
}

MeanVariance mean_variance(std::span<const double> values) {
    if (values.size() < 2) throw Error(ErrorCode::invalid_input, "need at least 2 values for a variance");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (const double x : values) ss += (x - mean) * (x - mean);
    return {mean, ss / (n - 1.0)};
}

double t_stat(const BoundedSample& db) {
    const MeanVariance mv = mean_variance(db.values());
    if (mv.variance == 0.0) {
        throw Error(ErrorCode::degenerate, "the t statistic is undefined for zero sample variance");
    }
    return mv.mean / std::sqrt(mv.variance / static_cast<double>(db.size()));
}

}  // namespace dpht
