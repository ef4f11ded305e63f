#include "dpht/dpht.h"

#include <cmath>
#include <limits>
#include <new>
#include <string>

#include "dpht/error.hpp"
#include "dpht/harness.hpp"
#include "dpht/inference.hpp"
#include "dpht/ingest.hpp"

struct dpht_sample {
    dpht::Dataset data;
};

struct dpht_reference {
    dpht::ReferenceDistribution dist;
};

namespace {

thread_local std::string last_error;

dpht_status to_status(dpht::ErrorCode code) {
    switch (code) {
        case dpht::ErrorCode::invalid_input: return DPHT_ERR_INVALID_INPUT;
        case dpht::ErrorCode::invalid_parameter: return DPHT_ERR_INVALID_PARAMETER;
        case dpht::ErrorCode::degenerate: return DPHT_ERR_DEGENERATE;
        case dpht::ErrorCode::parse: return DPHT_ERR_PARSE;
        case dpht::ErrorCode::range: return DPHT_ERR_RANGE;
        case dpht::ErrorCode::io: return DPHT_ERR_IO;
    }
    return DPHT_ERR_INTERNAL;
}

template <class Fn>
dpht_status guarded(Fn&& fn) {
    try {
        fn();
        last_error.clear();
        return DPHT_OK;
    } catch (const dpht::Error& e) {
        last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
    } catch (const std::exception& e) {
        last_error = e.what();
    } catch (...) {
        last_error = "unknown error";
    }
    return DPHT_ERR_INTERNAL;
}

void require(const void* p, const char* what) {
    if (!p) throw dpht::Error(dpht::ErrorCode::invalid_parameter, std::string(what) + " must not be NULL");
}

dpht::TestKind to_kind(dpht_test_kind test) {
    switch (test) {
        case DPHT_TEST_KW: return dpht::TestKind::kw;
        case DPHT_TEST_KWABS: return dpht::TestKind::kwabs;
        case DPHT_TEST_MW: return dpht::TestKind::mw;
        case DPHT_TEST_WILCOXON: return dpht::TestKind::wilcoxon;
        case DPHT_TEST_TTEST: return dpht::TestKind::ttest;
    }
    throw dpht::Error(dpht::ErrorCode::invalid_parameter, "unknown test kind");
}

dpht_test_kind from_kind(dpht::TestKind test) {
    switch (test) {
        case dpht::TestKind::kw: return DPHT_TEST_KW;
        case dpht::TestKind::kwabs: return DPHT_TEST_KWABS;
        case dpht::TestKind::mw: return DPHT_TEST_MW;
        case dpht::TestKind::wilcoxon: return DPHT_TEST_WILCOXON;
        case dpht::TestKind::ttest: return DPHT_TEST_TTEST;
    }
    return DPHT_TEST_KW;
}

dpht_reference_mode from_mode(dpht::ReferenceMode mode) {
    switch (mode) {
        case dpht::ReferenceMode::full_sim: return DPHT_REF_FULL_SIM;
        case dpht::ReferenceMode::chi2_laplace: return DPHT_REF_CHI2_LAPLACE;
        case dpht::ReferenceMode::normal_laplace: return DPHT_REF_NORMAL_LAPLACE;
        case dpht::ReferenceMode::normal_sim: return DPHT_REF_NORMAL_SIM;
    }
    return DPHT_REF_FULL_SIM;
}

dpht::ReferenceMode to_mode(dpht_reference_mode mode, dpht::ReferenceMode fallback) {
    switch (mode) {
        case DPHT_REF_DEFAULT: return fallback;
        case DPHT_REF_FULL_SIM: return dpht::ReferenceMode::full_sim;
        case DPHT_REF_CHI2_LAPLACE: return dpht::ReferenceMode::chi2_laplace;
        case DPHT_REF_NORMAL_LAPLACE: return dpht::ReferenceMode::normal_laplace;
        case DPHT_REF_NORMAL_SIM: return dpht::ReferenceMode::normal_sim;
    }
    throw dpht::Error(dpht::ErrorCode::invalid_parameter, "unknown reference mode");
}

dpht::ReferenceOptions to_options(dpht_reference_mode kw, dpht_reference_mode mw) {
    dpht::ReferenceOptions options;
    options.kw_mode = to_mode(kw, options.kw_mode);
    options.mw_mode = to_mode(mw, options.mw_mode);
    return options;
}

dpht::PrivacyBudget to_budget(const dpht_budget& b) {
    dpht::PrivacyBudget out;
    out.epsilon = b.epsilon;
    out.delta = b.delta;
    if (b.split != 0.0) out.split = b.split;
    return out;
}

dpht_budget default_budget(dpht_test_kind test) {
    return {1.0, test == DPHT_TEST_MW ? dpht::PrivacyBudget::default_mw_delta : 0.0, 0.0};
}

dpht::SimulationSpec to_spec(const dpht_simulation_spec& s) {
    dpht::SimulationSpec out;
    out.test = to_kind(s.test);
    out.n = s.n;
    out.g = s.g;
    if (s.proportion_count > 0) {
        require(s.proportions, "proportions");
        out.proportions.assign(s.proportions, s.proportions + s.proportion_count);
    }
    out.effect = s.effect;
    switch (s.shape) {
        case DPHT_SHAPE_NORMAL: out.shape = dpht::DataShape::normal; break;
        case DPHT_SHAPE_UNIFORM: out.shape = dpht::DataShape::uniform; break;
        case DPHT_SHAPE_ZERO_INFLATED: out.shape = dpht::DataShape::zero_inflated; break;
        default: throw dpht::Error(dpht::ErrorCode::invalid_parameter, "unknown data shape");
    }
    out.zero_fraction = s.zero_fraction;
    out.budget = to_budget(s.budget);
    out.known_equal_groups = s.known_equal_groups != 0;
    out.alpha = s.alpha;
    out.trials = s.trials;
    out.z = s.reps;
    out.seed = s.seed;
    out.reference = to_options(s.kw_reference, s.mw_reference);
    return out;
}

dpht_power_estimate to_c(const dpht::PowerEstimate& e) { return {e.power, e.rejections, e.trials, e.standard_error}; }

}  // namespace

extern "C" {

const char* dpht_last_error(void) { return last_error.c_str(); }

const char* dpht_status_string(dpht_status status) {
    switch (status) {
        case DPHT_OK: return "ok";
        case DPHT_ERR_INVALID_INPUT: return "invalid-input";
        case DPHT_ERR_INVALID_PARAMETER: return "invalid-parameter";
        case DPHT_ERR_DEGENERATE: return "degenerate";
        case DPHT_ERR_PARSE: return "parse";
        case DPHT_ERR_RANGE: return "range";
        case DPHT_ERR_IO: return "io";
        case DPHT_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* dpht_test_name(dpht_test_kind test) {
    try {
        return dpht::to_string(to_kind(test));
    } catch (...) {
        return "unknown";
    }
}

const char* dpht_reference_name(dpht_reference_mode mode) {
    if (mode == DPHT_REF_DEFAULT) return "default";
    try {
        return dpht::to_string(to_mode(mode, dpht::ReferenceMode::full_sim));
    } catch (...) {
        return "unknown";
    }
}

dpht_status dpht_parse_test_name(const char* name, dpht_test_kind* out) {
    return guarded([&] {
        require(name, "name");
        require(out, "out");
        const auto kind = dpht::parse_test_kind(name);
        if (!kind) throw dpht::Error(dpht::ErrorCode::invalid_parameter, std::string("unknown test '") + name + "'");
        *out = from_kind(*kind);
    });
}

dpht_status dpht_sample_load_csv(const char* path, dpht_input_format format, size_t declared_groups,
                                 dpht_sample** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        dpht::InputSpec spec;
        spec.path = path;
        switch (format) {
            case DPHT_FORMAT_GROUPED: spec.format = dpht::InputFormat::grouped; break;
            case DPHT_FORMAT_PAIRED: spec.format = dpht::InputFormat::paired; break;
            case DPHT_FORMAT_SINGLE: spec.format = dpht::InputFormat::single; break;
            default: throw dpht::Error(dpht::ErrorCode::invalid_parameter, "unknown input format");
        }
        if (declared_groups > 0) spec.declared_groups = declared_groups;
        *out = new dpht_sample{dpht::ingest(spec)};
    });
}

dpht_status dpht_sample_from_groups(const size_t* labels, const double* values, size_t n, size_t g,
                                    dpht_sample** out) {
    return guarded([&] {
        require(out, "out");
        if (n > 0) {
            require(labels, "labels");
            require(values, "values");
        }
        std::vector<std::vector<double>> groups(g);
        for (size_t i = 0; i < n; ++i) {
            if (labels[i] >= g) {
                throw dpht::Error(dpht::ErrorCode::invalid_input, "group label " + std::to_string(labels[i]) +
                                                                      " is out of range for g = " + std::to_string(g));
            }
            groups[labels[i]].push_back(values[i]);
        }
        *out = new dpht_sample{dpht::GroupedSample(std::move(groups))};
    });
}

dpht_status dpht_sample_from_pairs(const double* u, const double* v, size_t n, dpht_sample** out) {
    return guarded([&] {
        require(out, "out");
        if (n > 0) {
            require(u, "u");
            require(v, "v");
        }
        std::vector<dpht::Pair> rows(n);
        for (size_t i = 0; i < n; ++i) rows[i] = {u[i], v[i]};
        *out = new dpht_sample{dpht::PairedSample(std::move(rows))};
    });
}

dpht_status dpht_sample_from_values(const double* values, size_t n, dpht_sample** out) {
    return guarded([&] {
        require(out, "out");
        if (n > 0) require(values, "values");
        *out = new dpht_sample{dpht::BoundedSample(std::vector<double>(values, values + n))};
    });
}

void dpht_sample_free(dpht_sample* sample) { delete sample; }

size_t dpht_sample_size(const dpht_sample* sample) {
    if (!sample) return 0;
    return std::visit([](const auto& db) { return db.size(); }, sample->data);
}

size_t dpht_sample_groups(const dpht_sample* sample) {
    if (!sample) return 0;
    if (const auto* db = std::get_if<dpht::GroupedSample>(&sample->data)) return db->group_count();
    return 1;
}

dpht_input_format dpht_sample_format(const dpht_sample* sample) {
    if (sample && std::holds_alternative<dpht::PairedSample>(sample->data)) return DPHT_FORMAT_PAIRED;
    if (sample && std::holds_alternative<dpht::BoundedSample>(sample->data)) return DPHT_FORMAT_SINGLE;
    return DPHT_FORMAT_GROUPED;
}

void dpht_test_config_init(dpht_test_config* config, dpht_test_kind test) {
    if (!config) return;
    *config = dpht_test_config{};
    config->test = test;
    config->budget = default_budget(test);
    config->reps = 100000;
    config->seed = 0;
    config->known_equal_groups = 0;
    config->kw_reference = DPHT_REF_DEFAULT;
    config->mw_reference = DPHT_REF_DEFAULT;
}

dpht_status dpht_run_test(const dpht_sample* sample, const dpht_test_config* config, dpht_test_outcome* out) {
    return guarded([&] {
        require(sample, "sample");
        require(config, "config");
        require(out, "out");
        dpht::TestRequest request;
        request.test = to_kind(config->test);
        request.budget = to_budget(config->budget);
        request.reps = config->reps;
        request.seed = config->seed;
        request.known_equal_groups = config->known_equal_groups != 0;
        request.reference = to_options(config->kw_reference, config->mw_reference);
        const dpht::TestOutcome r = dpht::run_test(sample->data, request);

        dpht_test_outcome o{};
        o.test = from_kind(r.test);
        o.statistic = r.statistic;
        o.p_value = r.p_value;
        o.n = r.n;
        o.g = r.g;
        o.epsilon = r.budget.epsilon;
        o.delta = r.budget.delta;
        o.split = r.budget.split ? *r.budget.split : std::numeric_limits<double>::quiet_NaN();
        o.known_equal_groups = r.known_equal_groups ? 1 : 0;
        o.reps = r.reps;
        o.seed = r.seed;
        o.reference = from_mode(r.reference);
        o.has_mw_release = r.mw ? 1 : 0;
        o.m_tilde = r.mw ? r.mw->m_tilde : 0.0;
        o.m_star = r.mw ? r.mw->m_star : 0;
        *out = o;
    });
}

void dpht_reference_config_init(dpht_reference_config* config, dpht_test_kind test) {
    if (!config) return;
    *config = dpht_reference_config{};
    config->test = test;
    config->budget = default_budget(test);
    config->reps = 100000;
    config->mode = DPHT_REF_DEFAULT;
}

dpht_status dpht_reference_build(const dpht_reference_config* config, dpht_reference** out) {
    return guarded([&] {
        require(config, "config");
        require(out, "out");
        const auto budget = to_budget(config->budget);
        const auto rng = dpht::reference_stream(config->seed);
        const auto kind = to_kind(config->test);
        auto only = [&](dpht::ReferenceMode natural) {
            if (to_mode(config->mode, natural) != natural) {
                throw dpht::Error(dpht::ErrorCode::invalid_parameter,
                                  std::string(dpht::to_string(kind)) + " supports only the " +
                                      dpht::to_string(natural) + " reference");
            }
        };
        switch (kind) {
            case dpht::TestKind::kw:
                validate_budget(budget, kind);
                *out = new dpht_reference{dpht::ref_kw(config->g, config->n, budget.epsilon, config->reps, rng,
                                                       to_mode(config->mode, dpht::ReferenceMode::chi2_laplace))};
                break;
            case dpht::TestKind::kwabs:
                only(dpht::ReferenceMode::full_sim);
                validate_budget(budget, kind);
                *out = new dpht_reference{dpht::ref_kwabs(config->g, config->n, budget.epsilon, config->reps, rng)};
                break;
            case dpht::TestKind::mw:
                *out = new dpht_reference{dpht::ref_mw(config->n, config->m_star, budget, config->reps, rng,
                                                       to_mode(config->mode, dpht::ReferenceMode::full_sim),
                                                       config->known_equal_groups != 0)};
                break;
            case dpht::TestKind::wilcoxon:
                only(dpht::ReferenceMode::normal_laplace);
                validate_budget(budget, kind);
                *out = new dpht_reference{dpht::ref_wilcoxon(config->n, budget.epsilon, config->reps, rng)};
                break;
            case dpht::TestKind::ttest:
                only(dpht::ReferenceMode::normal_sim);
                *out = new dpht_reference{dpht::ref_t(config->n, budget, config->reps, rng)};
                break;
        }
    });
}

void dpht_reference_free(dpht_reference* ref) { delete ref; }

size_t dpht_reference_size(const dpht_reference* ref) { return ref ? ref->dist.size() : 0; }

dpht_status dpht_reference_p_value(const dpht_reference* ref, double statistic, double* out) {
    return guarded([&] {
        require(ref, "ref");
        require(out, "out");
        *out = dpht::p_value(statistic, ref->dist);
    });
}

dpht_status dpht_reference_critical_value(const dpht_reference* ref, double alpha, double* out) {
    return guarded([&] {
        require(ref, "ref");
        require(out, "out");
        *out = dpht::critical_value(ref->dist, alpha);
    });
}

dpht_status dpht_reference_quantile(const dpht_reference* ref, double q, double* out) {
    return guarded([&] {
        require(ref, "ref");
        require(out, "out");
        *out = dpht::quantile(ref->dist, q);
    });
}

double dpht_wilcoxon_null_sd(size_t n) { return dpht::wilcoxon_null_sd(n); }

void dpht_simulation_spec_init(dpht_simulation_spec* spec, dpht_test_kind test) {
    if (!spec) return;
    const dpht::SimulationSpec d;
    *spec = dpht_simulation_spec{};
    spec->test = test;
    spec->n = d.n;
    spec->g = d.g;
    spec->effect = d.effect;
    spec->shape = DPHT_SHAPE_NORMAL;
    spec->budget = default_budget(test);
    spec->alpha = d.alpha;
    spec->trials = d.trials;
    spec->reps = d.z;
    spec->seed = d.seed;
    spec->kw_reference = DPHT_REF_DEFAULT;
    spec->mw_reference = DPHT_REF_DEFAULT;
}

dpht_status dpht_simulate_power(const dpht_simulation_spec* spec, dpht_power_estimate* out) {
    return guarded([&] {
        require(spec, "spec");
        require(out, "out");
        *out = to_c(dpht::simulate_power(to_spec(*spec)));
    });
}

dpht_status dpht_simulate_type1(const dpht_simulation_spec* spec, double* p_values, double* qq_theoretical,
                                double* qq_empirical) {
    return guarded([&] {
        require(spec, "spec");
        require(p_values, "p_values");
        const auto r = dpht::simulate_type1(to_spec(*spec));
        for (size_t i = 0; i < r.p_values.size(); ++i) p_values[i] = r.p_values[i];
        for (size_t i = 0; i < r.qq.size(); ++i) {
            if (qq_theoretical) qq_theoretical[i] = r.qq[i].theoretical;
            if (qq_empirical) qq_empirical[i] = r.qq[i].empirical;
        }
    });
}

dpht_status dpht_sweep_budget_split(const dpht_simulation_spec* spec, const double* fractions, size_t count,
                                    dpht_power_estimate* out) {
    return guarded([&] {
        require(spec, "spec");
        if (count > 0) {
            require(fractions, "fractions");
            require(out, "out");
        }
        const auto rows = dpht::sweep_budget_split(to_spec(*spec), {fractions, count});
        for (size_t i = 0; i < rows.size(); ++i) out[i] = to_c(rows[i].estimate);
    });
}

dpht_status dpht_min_sample_size(const dpht_simulation_spec* spec, double target_power, size_t lo, size_t hi,
                                 size_t* out) {
    return guarded([&] {
        require(spec, "spec");
        require(out, "out");
        *out = dpht::min_sample_size(to_spec(*spec), target_power, lo, hi);
    });
}

}  // extern "C"
