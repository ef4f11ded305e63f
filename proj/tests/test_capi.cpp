#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "dpht/dpht.h"

TEST_CASE("status strings and names") {
    CHECK(std::string(dpht_status_string(DPHT_ERR_DEGENERATE)) == "degenerate");
    CHECK(std::string(dpht_test_name(DPHT_TEST_WILCOXON)) == "wilcoxon");
    dpht_test_kind k;
    CHECK(dpht_parse_test_name("kwabs", &k) == DPHT_OK);
    CHECK(k == DPHT_TEST_KWABS);
    CHECK(dpht_parse_test_name("anova", &k) == DPHT_ERR_INVALID_PARAMETER);
    CHECK(std::string(dpht_last_error()).find("anova") != std::string::npos);
    CHECK(dpht_parse_test_name(nullptr, &k) == DPHT_ERR_INVALID_PARAMETER);
}

TEST_CASE("samples and tests") {
    const size_t labels[] = {0, 0, 0, 1, 1, 1, 2, 2, 2};
    const double values[] = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    dpht_sample* s = nullptr;
    REQUIRE(dpht_sample_from_groups(labels, values, 9, 3, &s) == DPHT_OK);
    CHECK(dpht_sample_size(s) == 9);
    CHECK(dpht_sample_groups(s) == 3);
    CHECK(dpht_sample_format(s) == DPHT_FORMAT_GROUPED);

    dpht_test_config cfg;
    dpht_test_config_init(&cfg, DPHT_TEST_KW);
    cfg.budget.epsilon = INFINITY;
    cfg.reps = 5000;
    dpht_test_outcome out;
    REQUIRE(dpht_run_test(s, &cfg, &out) == DPHT_OK);
    CHECK(out.statistic == doctest::Approx(7.2));
    CHECK(out.n == 9);
    CHECK(std::isnan(out.split));
    CHECK(out.reference == DPHT_REF_CHI2_LAPLACE);

    cfg.test = DPHT_TEST_WILCOXON;
    CHECK(dpht_run_test(s, &cfg, &out) == DPHT_ERR_INVALID_INPUT);
    dpht_sample_free(s);
    dpht_sample_free(nullptr);

    const size_t bad[] = {0, 3};
    CHECK(dpht_sample_from_groups(bad, values, 2, 3, &s) == DPHT_ERR_INVALID_INPUT);

    const double v[] = {0.5, 1.5};
    CHECK(dpht_sample_from_values(v, 2, &s) == DPHT_ERR_RANGE);
    const size_t one_group[] = {0, 0, 0};
    REQUIRE(dpht_sample_from_groups(one_group, values, 3, 2, &s) == DPHT_OK);
    dpht_test_config_init(&cfg, DPHT_TEST_MW);
    cfg.reps = 1000;
    CHECK(dpht_run_test(s, &cfg, &out) == DPHT_ERR_DEGENERATE);
    dpht_sample_free(s);
}

TEST_CASE("mann-whitney through the c api") {
    const double u[] = {0.1, 0.4, 0.2, 3.0, 2.0, 5.0};
    const size_t labels[] = {0, 0, 0, 1, 1, 1};
    dpht_sample* s = nullptr;
    REQUIRE(dpht_sample_from_groups(labels, u, 6, 2, &s) == DPHT_OK);
    dpht_test_config cfg;
    dpht_test_config_init(&cfg, DPHT_TEST_MW);
    CHECK(cfg.budget.delta == 1e-6);
    cfg.reps = 2000;
    dpht_test_outcome out;
    REQUIRE(dpht_run_test(s, &cfg, &out) == DPHT_OK);
    CHECK(out.has_mw_release == 1);
    CHECK(out.split == 0.65);
    cfg.budget.delta = 0.0;
    CHECK(dpht_run_test(s, &cfg, &out) == DPHT_ERR_INVALID_PARAMETER);
    dpht_sample_free(s);
}

TEST_CASE("references") {
    dpht_reference_config cfg;
    dpht_reference_config_init(&cfg, DPHT_TEST_WILCOXON);
    cfg.n = 10;
    cfg.reps = 100000;
    dpht_reference* r = nullptr;
    REQUIRE(dpht_reference_build(&cfg, &r) == DPHT_OK);
    CHECK(dpht_reference_size(r) == 100000);
    double cv = 0, p = 0, q = 0;
    REQUIRE(dpht_reference_critical_value(r, 0.05, &cv) == DPHT_OK);
    CHECK(std::fabs(cv - 70) < 3);
    REQUIRE(dpht_reference_p_value(r, cv, &p) == DPHT_OK);
    CHECK(p == doctest::Approx(0.05).epsilon(0.05));
    REQUIRE(dpht_reference_quantile(r, 0.5, &q) == DPHT_OK);
    CHECK(std::fabs(q) < 2);
    CHECK(dpht_reference_critical_value(r, 1e-5, &cv) == DPHT_ERR_INVALID_PARAMETER);
    dpht_reference_free(r);

    cfg.mode = DPHT_REF_CHI2_LAPLACE;
    CHECK(dpht_reference_build(&cfg, &r) == DPHT_ERR_INVALID_PARAMETER);
    CHECK(dpht_wilcoxon_null_sd(100) == doctest::Approx(581.6786));
}

TEST_CASE("harness") {
    dpht_simulation_spec spec;
    dpht_simulation_spec_init(&spec, DPHT_TEST_WILCOXON);
    spec.n = 30;
    spec.effect = 1.0;
    spec.trials = 200;
    spec.reps = 2000;
    dpht_power_estimate a, b;
    REQUIRE(dpht_simulate_power(&spec, &a) == DPHT_OK);
    REQUIRE(dpht_simulate_power(&spec, &b) == DPHT_OK);
    CHECK(a.rejections == b.rejections);
    CHECK(a.trials == 200);

    spec.effect = 0.0;
    std::vector<double> p(200), th(200), em(200);
    REQUIRE(dpht_simulate_type1(&spec, p.data(), th.data(), em.data()) == DPHT_OK);
    CHECK(th[0] == doctest::Approx(1.0 / 201));
    CHECK(dpht_simulate_type1(&spec, p.data(), nullptr, nullptr) == DPHT_OK);

    spec.test = DPHT_TEST_TTEST;
    const double fractions[] = {0.3, 0.7};
    dpht_power_estimate rows[2];
    CHECK(dpht_sweep_budget_split(&spec, fractions, 2, rows) == DPHT_OK);
    const double bad[] = {1.0};
    CHECK(dpht_sweep_budget_split(&spec, bad, 1, rows) == DPHT_ERR_INVALID_PARAMETER);

    spec.test = DPHT_TEST_KW;
    spec.n = 2;
    CHECK(dpht_simulate_power(&spec, &a) == DPHT_ERR_INVALID_PARAMETER);
}

TEST_CASE("csv loading") {
    const char* path = "capi_test_input.csv";
    FILE* f = std::fopen(path, "w");
    REQUIRE(f);
    std::fputs("group,value\nA,1\nB,2\nA,3\n", f);
    std::fclose(f);
    dpht_sample* s = nullptr;
    REQUIRE(dpht_sample_load_csv(path, DPHT_FORMAT_GROUPED, 3, &s) == DPHT_OK);
    CHECK(dpht_sample_groups(s) == 3);
    CHECK(dpht_sample_size(s) == 3);
    dpht_sample_free(s);
    CHECK(dpht_sample_load_csv("/missing.csv", DPHT_FORMAT_GROUPED, 0, &s) == DPHT_ERR_IO);
    std::remove(path);
}
