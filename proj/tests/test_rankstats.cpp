#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dpht/error.hpp"
#include "dpht/random.hpp"
#include "dpht/rankstats.hpp"

using namespace dpht;

namespace {

// rank = 1 + #{smaller} + (#{equal} - 1) / 2
std::vector<double> brute_midranks(const std::vector<double>& x) {
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double less = 0, equal = 0;
        for (const double y : x) {
            less += y < x[i];
            equal += y == x[i];
        }
        r[i] = 1.0 + less + (equal - 1.0) / 2.0;
    }
    return r;
}

GroupedSample grouped(std::vector<std::vector<double>> g) { return GroupedSample(std::move(g)); }

RankVector ranks_of(const GroupedSample& db) { return rank_midrank(db.pooled()); }

PairedSample paired(std::vector<Pair> rows) { return PairedSample(std::move(rows)); }

std::vector<double> random_values(RandomStream& rng, std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.normal();
    return v;
}

}  // namespace

TEST_CASE("midranks") {
    CHECK(rank_midrank(std::vector<double>{3, 1, 2}).ranks == std::vector<double>{3, 1, 2});
    CHECK(rank_midrank(std::vector<double>{5, 5, 7}).ranks == std::vector<double>{1.5, 1.5, 3});
    CHECK_THROWS_AS(rank_midrank(std::vector<double>{}), Error);

    RandomStream rng(11, 0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(50);
        for (double& v : x) v = static_cast<double>(rng.below(12));
        CHECK(rank_midrank(x).ranks == brute_midranks(x));
    }
}

TEST_CASE("random tie-break ranks") {
    RandomStream any(3, 0);
    CHECK(rank_random(std::vector<double>{1, 2, 3}, any).ranks == std::vector<double>{1, 2, 3});

    int first_low = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        RandomStream rng(99, static_cast<std::uint64_t>(i));
        first_low += rank_random(std::vector<double>{4, 4}, rng).ranks[0] == 1.0;
    }
    CHECK(std::fabs(first_low / double(draws) - 0.5) < 0.02);

    for (std::uint64_t s = 0; s < 50; ++s) {
        RandomStream rng(s, 1);
        auto r = rank_random(std::vector<double>{7, 7, 7, 1}, rng).ranks;
        CHECK(r[3] == 1.0);
        std::sort(r.begin(), r.begin() + 3);
        CHECK(r == std::vector<double>{2, 3, 4, 1});
    }
}

TEST_CASE("rank sums are conserved") {
    RandomStream rng(5, 5);
    for (std::size_t n = 1; n < 40; ++n) {
        std::vector<double> x(n);
        for (double& v : x) v = static_cast<double>(rng.below(4));
        const double want = n * (n + 1) / 2.0;
        const auto mid = rank_midrank(x).ranks;
        const auto rnd = rank_random(x, rng).ranks;
        CHECK(std::accumulate(mid.begin(), mid.end(), 0.0) == want);
        CHECK(std::accumulate(rnd.begin(), rnd.end(), 0.0) == want);
        auto sorted = rnd;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n; ++i) CHECK(sorted[i] == i + 1.0);
    }
}

TEST_CASE("kruskal-wallis") {
    auto a = grouped({{1, 4}, {2, 3}});
    CHECK(kw_stat(a, ranks_of(a)) == doctest::Approx(0.0));
    auto b = grouped({{1, 2}, {3, 4}});
    CHECK(kw_stat(b, ranks_of(b)) == doctest::Approx(2.4).epsilon(1e-12));
    CHECK(kw_stat_simplified(b, ranks_of(b)) == doctest::Approx(2.4).epsilon(1e-12));

    RandomStream rng(8, 0);
    for (int trial = 0; trial < 20; ++trial) {
        auto v = random_values(rng, 20);
        auto db = grouped({{v.begin(), v.begin() + 6}, {v.begin() + 6, v.begin() + 13}, {v.begin() + 13, v.end()}});
        const auto r = rank_random(db.pooled(), rng);
        CHECK(std::fabs(kw_stat_simplified(db, r) - kw_stat_general(db, r)) < 1e-10);
    }

    CHECK_THROWS_AS(kw_stat_general(grouped({{2, 2}, {}}), ranks_of(grouped({{2, 2}, {}}))), Error);
}

TEST_CASE("absolute-value kruskal-wallis") {
    auto a = grouped({{1, 4}, {2, 3}});
    CHECK(kwabs_stat(a, ranks_of(a)) == doctest::Approx(0.0));
    auto b = grouped({{1, 2}, {3, 4}});
    CHECK(kwabs_stat(b, ranks_of(b)) == doctest::Approx(3.0).epsilon(1e-12));
    auto c = grouped({{1, 2}, {3, 4, 5}});
    CHECK(kwabs_stat(c, ranks_of(c)) == doctest::Approx(4.0).epsilon(1e-12));

    RandomStream rng(9, 0);
    for (std::size_t n = 6; n < 30; ++n) {
        auto v = random_values(rng, n);
        auto db = grouped({{v.begin(), v.begin() + 2}, {v.begin() + 2, v.begin() + n / 2}, {v.begin() + n / 2, v.end()}});
        const auto r = rank_random(db.pooled(), rng);
        CHECK(std::fabs(kwabs_stat_simplified(db, r) - kwabs_stat_general(db, r)) < 1e-10);
    }
}

TEST_CASE("mann-whitney") {
    CHECK(mw_stat(grouped({{1, 2}, {3, 4}})).u == 0.0);
    const auto m = mw_stat(grouped({{1, 3}, {2, 4}}));
    CHECK(m.u == 1.0);
    CHECK(m.u1 == 1.0);
    CHECK(m.u2 == 3.0);
    const auto t = mw_stat(grouped({{5, 5}, {5, 7}}));
    CHECK(t.u == 1.0);
    CHECK(t.u1 == 1.0);
    CHECK(t.u2 == 3.0);
    CHECK_THROWS_AS(mw_stat(grouped({{1, 2}, {}})), Error);
    CHECK_THROWS_AS(mw_stat(grouped({{1}, {2}, {3}})), Error);

    RandomStream rng(10, 0);
    for (std::size_t n1 = 1; n1 < 8; ++n1) {
        for (std::size_t n2 = 1; n2 < 8; ++n2) {
            std::vector<double> a(n1), b(n2);
            for (double& x : a) x = static_cast<double>(rng.below(5));
            for (double& x : b) x = static_cast<double>(rng.below(5));
            const auto r = mw_stat(grouped({a, b}));
            CHECK(r.u1 + r.u2 == doctest::Approx(double(n1 * n2)));
        }
    }
}

TEST_CASE("wilcoxon signed rank") {
    const auto db = paired({{0, 1}, {0, -2}, {3, 3}});
    CHECK(wilcoxon_stat(db) == -1.0);
    CHECK(wilcoxon_pratt_stat(db) == -1.0);
    CHECK(wilcoxon_stat(paired({{1, 1}, {2, 2}})) == 0.0);
    CHECK(wilcoxon_pratt_stat(paired({{1, 1}, {2, 2}})) == 0.0);
    CHECK(wilcoxon_stat(paired({{0, 1}, {0, 2}, {0, 3}, {0, 4}})) == 10.0);
    CHECK(wilcoxon_pratt_stat(paired({{0, 1}, {0, 2}, {0, 3}})) == 6.0);

    RandomStream rng(12, 0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Pair> rows(15);
        for (auto& p : rows) p = {rng.normal(), rng.normal()};
        CHECK(wilcoxon_pratt_stat(paired(rows)) == wilcoxon_stat(paired(rows)));
    }
}

TEST_CASE("t statistic") {
    CHECK(t_stat(BoundedSample({-1, 1})) == doctest::Approx(0.0));
    CHECK(t_stat(BoundedSample({0, 1})) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(t_stat(BoundedSample({0.3, 0.3, 0.3})), Error);
    try {
        t_stat(BoundedSample({0.3, 0.3, 0.3}));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::degenerate);
    }
}

TEST_CASE("rank statistics ignore strictly increasing relabeling") {
    RandomStream rng(13, 0);
    auto relabel = [](double x) { return std::exp(x) * 3.0 + 1.0; };
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<double>> g(3);
        for (auto& grp : g) {
            grp.resize(4 + rng.below(4));
            for (double& x : grp) x = std::round(rng.normal() * 4) / 4;
        }
        auto h = g;
        for (auto& grp : h) std::transform(grp.begin(), grp.end(), grp.begin(), relabel);
        const GroupedSample a(g), b(h);
        CHECK(kw_stat(a, ranks_of(a)) == doctest::Approx(kw_stat(b, ranks_of(b))).epsilon(1e-12));
        RandomStream r1(trial, 1), r2(trial, 1);
        const auto ra = rank_random(a.pooled(), r1), rb = rank_random(b.pooled(), r2);
        CHECK(kwabs_stat(a, ra) == doctest::Approx(kwabs_stat(b, rb)).epsilon(1e-12));
        const GroupedSample a2({g[0], g[1]}), b2({h[0], h[1]});
        CHECK(mw_stat(a2).u == mw_stat(b2).u);

        // Signed ranks see |v - u|: invariant under increasing affine maps of
        // the data and odd increasing maps of the differences.
        std::vector<Pair> rows(12), affine(12), odd(12);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            rows[i] = {std::round(rng.normal() * 2) / 2, std::round(rng.normal() * 2) / 2};
            affine[i] = {2.5 * rows[i].u - 7.0, 2.5 * rows[i].v - 7.0};
            const double d = rows[i].difference();
            odd[i] = {0.0, d * d * d + d};
        }
        for (const auto* mapped : {&affine, &odd}) {
            CHECK(wilcoxon_pratt_stat(paired(rows)) == wilcoxon_pratt_stat(paired(*mapped)));
            CHECK(wilcoxon_stat(paired(rows)) == wilcoxon_stat(paired(*mapped)));
        }
    }
}

TEST_CASE("sample validation") {
    CHECK_THROWS_AS(GroupedSample({{1.0, 2.0}}), Error);
    CHECK_THROWS_AS(GroupedSample({{1.0}, {}}), Error);
    CHECK_THROWS_AS(GroupedSample({{1.0, NAN}, {2.0}}), Error);
    CHECK_NOTHROW(GroupedSample({{1.0, 2.0}, {}}));
    CHECK_THROWS_AS(PairedSample({}), Error);
    CHECK_THROWS_AS(BoundedSample({0.5}), Error);
    try {
        BoundedSample({0.5, 1.5});
        FAIL("expected a range error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::range);
    }
}
