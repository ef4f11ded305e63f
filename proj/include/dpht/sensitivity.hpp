#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dpht/samples.hpp"

namespace dpht {

enum class StatisticKind { kw, kwabs, mw, wilcoxon_pratt, mean, variance };

struct OracleOptions {
    std::size_t max_n = 8;
};

// Brute-force local sensitivity: the largest |f(x) - f(x')| over every
// neighbour x' obtained by replacing one row of x. Grouped rows are replaced
// by (any grid value, any group); paired rows by (any grid u, any grid v);
// bounded rows by any grid value. KW and KWabs are compared over every
// random tie-break resolution of both databases. Neighbours on which the
// statistic is undefined (an emptied MW group) are skipped.
double local_sensitivity(StatisticKind kind, const GroupedSample& db, std::span<const double> grid,
                         const OracleOptions& options = {});
double local_sensitivity(StatisticKind kind, const PairedSample& db, std::span<const double> grid,
                         const OracleOptions& options = {});
double local_sensitivity(StatisticKind kind, const BoundedSample& db, std::span<const double> grid,
                         const OracleOptions& options = {});

// Candidate replacement values covering every order position relative to
// `values`: below all, above all, strictly between each adjacent pair, and
// equal to each existing value.
std::vector<double> rank_position_grid(std::span<const double> values);

}  // namespace dpht
