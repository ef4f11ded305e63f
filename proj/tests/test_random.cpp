#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include "dpht/random.hpp"

using namespace dpht;

TEST_CASE("streams are reproducible") {
    RandomStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        CHECK(x != c.uniform());
        CHECK(x != d.uniform());
    }
    CHECK(a.derive("x", 3).uniform() == b.derive("x", 3).uniform());
    CHECK(a.derive("x", 3).uniform() != a.derive("x", 4).uniform());
    CHECK(a.derive("x", 3).uniform() != a.derive("y", 3).uniform());
}

TEST_CASE("uniform moments and range") {
    RandomStream rng(1, 1);
    const int n = 200000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sq += u * u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.005));
    CHECK(sq / n - (sum / n) * (sum / n) == doctest::Approx(1.0 / 12).epsilon(0.01));
}

TEST_CASE("normal moments") {
    RandomStream rng(2, 2);
    const int n = 200000;
    double sum = 0, sq = 0, inside = 0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sq += x * x;
        inside += std::fabs(x) < 1.959964;
    }
    CHECK(std::fabs(sum / n) < 0.01);
    CHECK(sq / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(inside / n == doctest::Approx(0.95).epsilon(0.003));
}

TEST_CASE("bounded integers") {
    RandomStream rng(3, 3);
    std::vector<int> counts(6);
    for (int i = 0; i < 60000; ++i) ++counts[rng.below(6)];
    for (const int c : counts) CHECK(std::abs(c - 10000) < 400);
}

TEST_CASE("pinned streams") {
    auto p = RandomStream::pinned(0.25);
    CHECK(p.uniform() == 0.25);
    CHECK(p.uniform() == 0.25);
    CHECK(p.below(8) == 2);
    CHECK(p.derive("child", 9).uniform() == 0.25);
}
