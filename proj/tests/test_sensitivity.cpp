#include "doctest.h"

#include <cmath>
#include <vector>

#include "dpht/error.hpp"
#include "dpht/sensitivity.hpp"

using namespace dpht;

TEST_CASE("rank position grid") {
    const auto g = rank_position_grid(std::vector<double>{2.0, 1.0, 2.0});
    // below, 1, between, 2, above
    REQUIRE(g.size() == 5);
    CHECK(g[0] < 1.0);
    CHECK(g[1] == 1.0);
    CHECK(g[2] > 1.0);
    CHECK(g[2] < 2.0);
    CHECK(g[3] == 2.0);
    CHECK(g[4] > 2.0);
}

TEST_CASE("mann-whitney local sensitivity approaches max group size") {
    const GroupedSample db({{1, 2}, {3, 4, 5}});
    const double s = local_sensitivity(StatisticKind::mw, db, rank_position_grid(db.pooled()));
    CHECK(s <= 3.0);
    CHECK(s >= 2.5);
}

TEST_CASE("kwabs stays within its bound") {
    const GroupedSample db({{1, 5}, {2, 2, 6}, {3}});
    CHECK(local_sensitivity(StatisticKind::kwabs, db, rank_position_grid(db.pooled())) <= 8.0);
    CHECK(local_sensitivity(StatisticKind::kw, db, rank_position_grid(db.pooled())) <= 87.0);
}

TEST_CASE("mean and variance of bounded data") {
    const BoundedSample db({-1, 0.5, 0.25, 1});
    const std::vector<double> grid{-1, -0.5, 0, 0.5, 1};
    CHECK(local_sensitivity(StatisticKind::mean, db, grid) == doctest::Approx(0.5));
    CHECK(local_sensitivity(StatisticKind::variance, db, grid) <= 5.0 / 3.0);
    CHECK_THROWS_AS(local_sensitivity(StatisticKind::mean, db, std::vector<double>{-2, 0}), Error);
}

TEST_CASE("pratt statistic stays within 2n") {
    const PairedSample db({{0, 1}, {0, -2}, {3, 3}, {1, 0.5}});
    const std::vector<double> grid{-3, -1, 0, 0.5, 1, 3};
    const double s = local_sensitivity(StatisticKind::wilcoxon_pratt, db, grid);
    CHECK(s <= 8.0);
    CHECK(s >= 4.0);
}

TEST_CASE("oracle refuses large databases and mismatched kinds") {
    std::vector<double> big(9, 0.0);
    for (std::size_t i = 0; i < big.size(); ++i) big[i] = double(i);
    const GroupedSample db({{big.begin(), big.begin() + 4}, {big.begin() + 4, big.end()}});
    CHECK_THROWS_AS(local_sensitivity(StatisticKind::kw, db, rank_position_grid(big)), Error);
    CHECK_NOTHROW(local_sensitivity(StatisticKind::kw, db, rank_position_grid(big), {.max_n = 9}));
    CHECK_THROWS_AS(local_sensitivity(StatisticKind::mean, db, rank_position_grid(big)), Error);
}
