// dpht: command-line front end for the private hypothesis tests.
//
// Exit codes: 0 success, 2 usage, 3 degenerate data, 4 I/O, parse or range
// errors in the input. Results go to stdout; diagnostics to stderr.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dpht/dpht.h"

namespace {

enum Exit { kOk = 0, kInternal = 1, kUsage = 2, kDegenerate = 3, kInput = 4 };

struct Failure {
    int code;
    std::string message;
};

int exit_code(dpht_status status) {
    switch (status) {
        case DPHT_OK: return kOk;
        case DPHT_ERR_INVALID_PARAMETER: return kUsage;
        case DPHT_ERR_DEGENERATE: return kDegenerate;
        case DPHT_ERR_INVALID_INPUT:
        case DPHT_ERR_PARSE:
        case DPHT_ERR_RANGE:
        case DPHT_ERR_IO: return kInput;
        case DPHT_ERR_INTERNAL: return kInternal;
    }
    return kInternal;
}

void check(dpht_status status) {
    if (status != DPHT_OK) throw Failure{exit_code(status), dpht_last_error()};
}

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

// Flags shared by every subcommand.
struct Common {
    std::string test;
    double epsilon = 1.0;
    std::optional<double> delta;
    std::optional<double> split;
    std::optional<std::size_t> reps;
    std::size_t default_reps = 0;
    std::uint64_t seed = 0;
    bool known_equal = false;
    std::size_t groups = 0;
    std::string reference;

    dpht_test_kind kind = DPHT_TEST_KW;
    dpht_reference_mode mode = DPHT_REF_DEFAULT;

    void add_to(CLI::App& cmd, std::size_t fallback_reps) {
        cmd.add_option("--test", test, "kw | kwabs | mw | wilcoxon | ttest")->required();
        cmd.add_option("--epsilon", epsilon, "privacy budget (inf disables noise)")->required();
        cmd.add_option("--delta", delta, "failure probability for mw");
        cmd.add_option("--split", split, "budget fraction: mw size estimate or t-test mean");
        cmd.add_option("--reps", reps, "reference distribution size (default " + std::to_string(fallback_reps) + ")");
        cmd.parse_complete_callback([this, fallback_reps] { default_reps = fallback_reps; });
        cmd.add_option("--seed", seed, "random seed")->capture_default_str();
        cmd.add_flag("--known-equal-groups", known_equal, "mw: group sizes are public and equal");
        cmd.add_option("--groups", groups, "number of groups (kw, kwabs)");
        cmd.add_option("--reference", reference, "reference distribution: full-sim | chi2-laplace | normal-laplace");
    }

    void resolve() {
        if (dpht_parse_test_name(test.c_str(), &kind) != DPHT_OK) {
            throw Failure{kUsage, "unknown test '" + test + "'"};
        }
        if (kind == DPHT_TEST_MW && !known_equal && !delta) {
            throw Failure{kUsage, "mw needs --delta (or --known-equal-groups)"};
        }
        if (reference.empty()) {
            mode = DPHT_REF_DEFAULT;
        } else if (reference == "full-sim") {
            mode = DPHT_REF_FULL_SIM;
        } else if (reference == "chi2-laplace") {
            mode = DPHT_REF_CHI2_LAPLACE;
        } else if (reference == "normal-laplace") {
            mode = DPHT_REF_NORMAL_LAPLACE;
        } else {
            throw Failure{kUsage, "unknown reference '" + reference + "'"};
        }
    }

    std::size_t z() const { return reps.value_or(default_reps); }

    dpht_budget budget() const { return {epsilon, delta.value_or(0.0), split.value_or(0.0)}; }
};

nlohmann::ordered_json json_number(double x) {
    if (std::isnan(x)) return nullptr;
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

int cmd_test(Common& c, const std::string& input, const std::string& format, double alpha) {
    c.resolve();
    dpht_input_format fmt = c.kind == DPHT_TEST_WILCOXON ? DPHT_FORMAT_PAIRED
                            : c.kind == DPHT_TEST_TTEST  ? DPHT_FORMAT_SINGLE
                                                         : DPHT_FORMAT_GROUPED;
    if (format == "grouped") {
        fmt = DPHT_FORMAT_GROUPED;
    } else if (format == "paired") {
        fmt = DPHT_FORMAT_PAIRED;
    } else if (format == "single") {
        fmt = DPHT_FORMAT_SINGLE;
    } else if (!format.empty()) {
        throw Failure{kUsage, "unknown format '" + format + "'"};
    }

    dpht_sample* sample = nullptr;
    check(dpht_sample_load_csv(input.c_str(), fmt, c.groups, &sample));
    std::unique_ptr<dpht_sample, decltype(&dpht_sample_free)> guard(sample, dpht_sample_free);

    dpht_test_config config;
    dpht_test_config_init(&config, c.kind);
    config.budget = c.budget();
    config.reps = c.z();
    config.seed = c.seed;
    config.known_equal_groups = c.known_equal ? 1 : 0;
    config.kw_reference = c.mode;
    config.mw_reference = c.mode;

    dpht_test_outcome out;
    check(dpht_run_test(sample, &config, &out));

    nlohmann::ordered_json j;
    j["test"] = dpht_test_name(out.test);
    j["statistic"] = json_number(out.statistic);
    j["p_value"] = out.p_value;
    j["n"] = out.n;
    j["g"] = out.g;
    j["epsilon"] = json_number(out.epsilon);
    j["delta"] = out.delta;
    j["split"] = json_number(out.split);
    j["reps"] = out.reps;
    j["seed"] = out.seed;
    j["reference"] = dpht_reference_name(out.reference);
    j["alpha"] = alpha;
    j["reject"] = out.p_value < alpha;
    if (out.has_mw_release) {
        j["m_tilde"] = json_number(out.m_tilde);
        j["m_star"] = out.m_star;
    }
    std::cout << j.dump(2) << '\n';
    return kOk;
}

int cmd_critval(Common& c, const std::vector<std::size_t>& ns, const std::vector<double>& alphas,
                std::optional<std::size_t> m_star, bool normalized) {
    c.resolve();
    if (normalized && c.kind != DPHT_TEST_WILCOXON) throw Failure{kUsage, "--normalized applies to wilcoxon only"};
    std::cout << "n,alpha,critical_value\n";
    for (const std::size_t n : ns) {
        dpht_reference_config config;
        dpht_reference_config_init(&config, c.kind);
        config.n = n;
        config.g = c.groups ? c.groups : 3;
        config.m_star = m_star.value_or(n / 2);
        config.budget = c.budget();
        config.known_equal_groups = c.known_equal ? 1 : 0;
        config.reps = c.z();
        config.seed = c.seed;
        config.mode = c.mode;
        dpht_reference* ref = nullptr;
        check(dpht_reference_build(&config, &ref));
        std::unique_ptr<dpht_reference, decltype(&dpht_reference_free)> guard(ref, dpht_reference_free);
        for (const double alpha : alphas) {
            double cv = 0.0;
            if (normalized) {
                // One-sided upper quantile of W / sd, the scale on which the
                // public critical value is the normal quantile.
                if (!(alpha > 0.0 && alpha < 1.0)) throw Failure{kUsage, "alpha must lie in (0, 1)"};
                check(dpht_reference_quantile(ref, 1.0 - alpha, &cv));
                cv /= dpht_wilcoxon_null_sd(n);
            } else {
                check(dpht_reference_critical_value(ref, alpha, &cv));
            }
            std::cout << n << ',' << num(alpha) << ',' << num(cv) << '\n';
        }
    }
    return kOk;
}

struct SimFlags {
    double effect = 0.0;
    std::size_t trials = 1000;
    double alpha = 0.05;
    std::vector<double> proportions;
    std::string shape = "normal";
    double zero_fraction = 0.0;
};

dpht_simulation_spec make_spec(const Common& c, const SimFlags& s, std::size_t n, double epsilon) {
    dpht_simulation_spec spec;
    dpht_simulation_spec_init(&spec, c.kind);
    spec.n = n;
    if (c.groups) spec.g = c.groups;
    spec.proportions = s.proportions.empty() ? nullptr : s.proportions.data();
    spec.proportion_count = s.proportions.size();
    spec.effect = s.effect;
    if (s.shape == "normal") {
        spec.shape = DPHT_SHAPE_NORMAL;
    } else if (s.shape == "uniform") {
        spec.shape = DPHT_SHAPE_UNIFORM;
    } else if (s.shape == "zero-inflated") {
        spec.shape = DPHT_SHAPE_ZERO_INFLATED;
    } else {
        throw Failure{kUsage, "unknown shape '" + s.shape + "'"};
    }
    spec.zero_fraction = s.zero_fraction;
    spec.budget = c.budget();
    spec.budget.epsilon = epsilon;
    spec.known_equal_groups = c.known_equal ? 1 : 0;
    spec.alpha = s.alpha;
    spec.trials = s.trials;
    spec.reps = c.z();
    spec.seed = c.seed;
    spec.kw_reference = c.mode;
    spec.mw_reference = c.mode;
    return spec;
}

int cmd_power(Common& c, const SimFlags& s, const std::vector<std::size_t>& ns, std::vector<double> epsilons) {
    c.resolve();
    if (epsilons.empty()) epsilons.push_back(c.epsilon);
    std::cout << "n,epsilon,power,se\n";
    for (const std::size_t n : ns) {
        for (const double eps : epsilons) {
            const dpht_simulation_spec spec = make_spec(c, s, n, eps);
            dpht_power_estimate est;
            check(dpht_simulate_power(&spec, &est));
            std::cout << n << ',' << num(eps) << ',' << num(est.power) << ',' << num(est.standard_error) << '\n';
        }
    }
    return kOk;
}

int cmd_qq(Common& c, SimFlags s, std::size_t n) {
    c.resolve();
    if (s.effect != 0.0) throw Failure{kUsage, "qq simulates the null; --effect must be 0"};
    const dpht_simulation_spec spec = make_spec(c, s, n, c.epsilon);
    std::vector<double> p(s.trials), theoretical(s.trials), empirical(s.trials);
    check(dpht_simulate_type1(&spec, p.data(), theoretical.data(), empirical.data()));
    std::cout << "theoretical,empirical\n";
    for (std::size_t i = 0; i < s.trials; ++i) std::cout << num(theoretical[i]) << ',' << num(empirical[i]) << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Differentially private nonparametric hypothesis tests"};
    app.require_subcommand(1);

    Common common;
    std::string input, format;
    double alpha = 0.05;
    auto* test = app.add_subcommand("test", "run one private test on a CSV file and print JSON");
    common.add_to(*test, 100000);
    test->add_option("--input", input, "CSV file with a header row")->required();
    test->add_option("--format", format, "grouped | paired | single (default follows --test)");
    test->add_option("--alpha", alpha, "significance level")->capture_default_str();

    std::vector<std::size_t> ns;
    std::vector<double> alphas{0.05};
    std::optional<std::size_t> m_star;
    bool normalized = false;
    auto* critval = app.add_subcommand("critval", "print critical values as CSV");
    common.add_to(*critval, 1000000);
    critval->add_option("--n", ns, "sample sizes")->delimiter(',')->required();
    critval->add_option("--alphas", alphas, "significance levels")->delimiter(',');
    critval->add_option("--m-star", m_star, "mw: lower bound on the smaller group (default n/2)");
    critval->add_flag("--normalized", normalized, "wilcoxon: one-sided quantile of W divided by its null sd");

    SimFlags sim;
    std::vector<double> epsilons;
    auto add_sim = [&](CLI::App& cmd) {
        common.add_to(cmd, 20000);
        cmd.add_option("--n", ns, "sample sizes")->delimiter(',')->required();
        cmd.add_option("--trials", sim.trials, "simulated databases per point")->capture_default_str();
        cmd.add_option("--alpha", sim.alpha, "significance level")->capture_default_str();
        cmd.add_option("--proportions", sim.proportions, "group proportions")->delimiter(',');
        cmd.add_option("--shape", sim.shape, "normal | uniform | zero-inflated")->capture_default_str();
        cmd.add_option("--zero-fraction", sim.zero_fraction, "share of zero differences (zero-inflated)");
    };
    auto* power = app.add_subcommand("power", "estimate power as CSV");
    add_sim(*power);
    power->add_option("--effect", sim.effect, "separation of group means in sigma")->capture_default_str();
    power->add_option("--epsilons", epsilons, "extra budgets to sweep instead of --epsilon")->delimiter(',');

    auto* qq = app.add_subcommand("qq", "null p-value QQ data as CSV");
    add_sim(*qq);
    qq->add_option("--effect", sim.effect, "must be 0")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*test) return cmd_test(common, input, format, alpha);
        if (*critval) return cmd_critval(common, ns, alphas, m_star, normalized);
        if (*power) return cmd_power(common, sim, ns, epsilons);
        if (ns.size() != 1) throw Failure{kUsage, "qq takes a single --n"};
        return cmd_qq(common, sim, ns.front());
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << '\n';
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInternal;
    }
}
