#include "dpht/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "dpht/error.hpp"
#include "dpht/rankstats.hpp"

namespace dpht {
namespace {

struct Row {
    std::size_t group;
    double value;
};

struct Range {
    double lo;
    double hi;
};

void check_size(std::size_t n, const OracleOptions& options) {
    if (n > options.max_n) {
        throw Error(ErrorCode::invalid_parameter, "sensitivity oracle refuses n = " + std::to_string(n) +
                                                      " (cap " + std::to_string(options.max_n) + ")");
    }
}

double kernel_stat(StatisticKind kind, std::span<const std::size_t> labels_in_rank_order, std::size_t g) {
    std::vector<double> sums(g, 0.0);
    std::vector<std::size_t> sizes(g, 0);
    for (std::size_t pos = 0; pos < labels_in_rank_order.size(); ++pos) {
        sums[labels_in_rank_order[pos]] += static_cast<double>(pos + 1);
        ++sizes[labels_in_rank_order[pos]];
    }
    const std::size_t n = labels_in_rank_order.size();
    return kind == StatisticKind::kw ? kernels::kw_from_rank_sums(sums, sizes, n)
                                     : kernels::kwabs_from_rank_sums(sums, sizes, n);
}

// Extremes of KW / KWabs over every way of ordering tied rows.
Range tiebreak_range(StatisticKind kind, std::vector<Row> rows, std::size_t g) {
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.value < b.value || (a.value == b.value && a.group < b.group);
    });
    std::vector<std::size_t> labels(rows.size());
    std::vector<std::pair<std::size_t, std::size_t>> classes;  // [begin, end) of each tie class
    for (std::size_t i = 0; i < rows.size();) {
        std::size_t j = i + 1;
        while (j < rows.size() && rows[j].value == rows[i].value) ++j;
        classes.emplace_back(i, j);
        i = j;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) labels[i] = rows[i].group;

    Range range{INFINITY, -INFINITY};
    // Odometer over the distinct label permutations of each tie class; each
    // class starts sorted, and next_permutation wraps back to sorted.
    while (true) {
        const double s = kernel_stat(kind, labels, g);
        range.lo = std::min(range.lo, s);
        range.hi = std::max(range.hi, s);
        std::size_t c = 0;
        for (; c < classes.size(); ++c) {
            const auto first = labels.begin() + static_cast<std::ptrdiff_t>(classes[c].first);
            const auto last = labels.begin() + static_cast<std::ptrdiff_t>(classes[c].second);
            if (std::next_permutation(first, last)) break;
        }
        if (c == classes.size()) break;
    }
    return range;
}

std::optional<Range> grouped_range(StatisticKind kind, const std::vector<Row>& rows, std::size_t g) {
    if (kind == StatisticKind::mw) {
        std::vector<std::vector<double>> groups(g);
        for (const Row& r : rows) groups[r.group].push_back(r.value);
        if (groups[0].empty() || groups[1].empty()) return std::nullopt;
        const double u = mw_stat(GroupedSample(std::move(groups))).u;
        return Range{u, u};
    }
    return tiebreak_range(kind, rows, g);
}

double widest_gap(const Range& a, const Range& b) {
    return std::max(std::fabs(a.hi - b.lo), std::fabs(b.hi - a.lo));
}

}  // namespace

std::vector<double> rank_position_grid(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.empty()) return {0.0};
    std::vector<double> grid;
    grid.push_back(sorted.front() - 1.0);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        grid.push_back(sorted[i]);
        if (i + 1 < sorted.size()) grid.push_back(0.5 * (sorted[i] + sorted[i + 1]));
    }
    grid.push_back(sorted.back() + 1.0);
    return grid;
}

double local_sensitivity(StatisticKind kind, const GroupedSample& db, std::span<const double> grid,
                         const OracleOptions& options) {
    if (kind != StatisticKind::kw && kind != StatisticKind::kwabs && kind != StatisticKind::mw) {
        throw Error(ErrorCode::invalid_parameter, "grouped samples support kw, kwabs and mw only");
    }
    if (kind == StatisticKind::mw && db.group_count() != 2) {
        throw Error(ErrorCode::invalid_parameter, "mw sensitivity needs exactly 2 groups");
    }
    check_size(db.size(), options);
    const std::size_t g = db.group_count();
    std::vector<Row> rows;
    for (std::size_t i = 0; i < g; ++i) {
        for (const double x : db.groups()[i]) rows.push_back({i, x});
    }
    const std::optional<Range> base = grouped_range(kind, rows, g);
    if (!base) throw Error(ErrorCode::degenerate, "statistic undefined on the base database");

    double worst = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row saved = rows[i];
        for (const double value : grid) {
            for (std::size_t group = 0; group < g; ++group) {
                rows[i] = {group, value};
                if (const auto other = grouped_range(kind, rows, g)) {
                    worst = std::max(worst, widest_gap(*base, *other));
                }
            }
        }
        rows[i] = saved;
    }
    return worst;
}

double local_sensitivity(StatisticKind kind, const PairedSample& db, std::span<const double> grid,
                         const OracleOptions& options) {
    if (kind != StatisticKind::wilcoxon_pratt) {
        throw Error(ErrorCode::invalid_parameter, "paired samples support wilcoxon_pratt only");
    }
    check_size(db.size(), options);
    // Only v - u matters, so each distinct difference is tried once.
    std::set<double> diffs;
    for (const double u : grid) {
        for (const double v : grid) diffs.insert(v - u);
    }
    const double base = wilcoxon_pratt_stat(db);
    std::vector<Pair> rows = db.rows();
    double worst = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Pair saved = rows[i];
        for (const double d : diffs) {
            rows[i] = {0.0, d};
            worst = std::max(worst, std::fabs(base - wilcoxon_pratt_stat(PairedSample(rows))));
        }
        rows[i] = saved;
    }
    return worst;
}

double local_sensitivity(StatisticKind kind, const BoundedSample& db, std::span<const double> grid,
                         const OracleOptions& options) {
    if (kind != StatisticKind::mean && kind != StatisticKind::variance) {
        throw Error(ErrorCode::invalid_parameter, "bounded samples support mean and variance only");
    }
    check_size(db.size(), options);
    for (const double x : grid) {
        if (!(x >= -1.0 && x <= 1.0)) throw Error(ErrorCode::invalid_parameter, "bounded grid must lie in [-1, 1]");
    }
    auto stat = [kind](std::span<const double> values) {
        const MeanVariance mv = mean_variance(values);
        return kind == StatisticKind::mean ? mv.mean : mv.variance;
    };
    std::vector<double> values = db.values();
    const double base = stat(values);
    double worst = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double saved = values[i];
        for (const double x : grid) {
            values[i] = x;
            worst = std::max(worst, std::fabs(base - stat(values)));
        }
        values[i] = saved;
    }
    return worst;
}

}  // namespace dpht
