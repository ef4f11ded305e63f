/*
 * C interface to the differentially private hypothesis test library.
 *
 * Every function returns a dpht_status. On failure the thread-local message
 * from dpht_last_error() describes the problem; output arguments are left
 * untouched. Handles are opaque and must be released with their _free
 * function. Passing a NULL handle to a _free function is a no-op.
 */
#ifndef DPHT_H
#define DPHT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(DPHT_BUILDING)
#    define DPHT_API __declspec(dllexport)
#  else
#    define DPHT_API __declspec(dllimport)
#  endif
#else
#  define DPHT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dpht_status {
    DPHT_OK = 0,
    DPHT_ERR_INVALID_INPUT = 1,
    DPHT_ERR_INVALID_PARAMETER = 2,
    DPHT_ERR_DEGENERATE = 3,
    DPHT_ERR_PARSE = 4,
    DPHT_ERR_RANGE = 5,
    DPHT_ERR_IO = 6,
    DPHT_ERR_INTERNAL = 7
} dpht_status;

typedef enum dpht_test_kind {
    DPHT_TEST_KW = 0,
    DPHT_TEST_KWABS = 1,
    DPHT_TEST_MW = 2,
    DPHT_TEST_WILCOXON = 3,
    DPHT_TEST_TTEST = 4
} dpht_test_kind;

typedef enum dpht_input_format {
    DPHT_FORMAT_GROUPED = 0,
    DPHT_FORMAT_PAIRED = 1,
    DPHT_FORMAT_SINGLE = 2
} dpht_input_format;

typedef enum dpht_reference_mode {
    DPHT_REF_DEFAULT = -1,
    DPHT_REF_FULL_SIM = 0,
    DPHT_REF_CHI2_LAPLACE = 1,
    DPHT_REF_NORMAL_LAPLACE = 2,
    DPHT_REF_NORMAL_SIM = 3
} dpht_reference_mode;

typedef enum dpht_data_shape {
    DPHT_SHAPE_NORMAL = 0,
    DPHT_SHAPE_UNIFORM = 1,
    DPHT_SHAPE_ZERO_INFLATED = 2
} dpht_data_shape;

typedef struct dpht_sample dpht_sample;
typedef struct dpht_reference dpht_reference;

/* epsilon may be INFINITY (noise disabled). split == 0 selects the default
 * (0.65 to the MW size estimate, 0.5 to the t-test mean). */
typedef struct dpht_budget {
    double epsilon;
    double delta;
    double split;
} dpht_budget;

typedef struct dpht_test_config {
    dpht_test_kind test;
    dpht_budget budget;
    size_t reps;
    uint64_t seed;
    int known_equal_groups;
    dpht_reference_mode kw_reference;
    dpht_reference_mode mw_reference;
} dpht_test_config;

typedef struct dpht_test_outcome {
    dpht_test_kind test;
    double statistic;
    double p_value;
    size_t n;
    size_t g;
    double epsilon;
    double delta;
    double split; /* NaN when the test has no budget split */
    int known_equal_groups;
    size_t reps;
    uint64_t seed;
    dpht_reference_mode reference;
    int has_mw_release;
    double m_tilde;
    size_t m_star;
} dpht_test_outcome;

typedef struct dpht_reference_config {
    dpht_test_kind test;
    size_t n;
    size_t g;      /* kw / kwabs */
    size_t m_star; /* mw */
    dpht_budget budget;
    int known_equal_groups;
    size_t reps;
    uint64_t seed;
    dpht_reference_mode mode;
} dpht_reference_config;

typedef struct dpht_simulation_spec {
    dpht_test_kind test;
    size_t n;
    size_t g;
    const double* proportions; /* NULL for near-equal groups */
    size_t proportion_count;
    double effect;
    dpht_data_shape shape;
    double zero_fraction;
    dpht_budget budget;
    int known_equal_groups;
    double alpha;
    size_t trials;
    size_t reps;
    uint64_t seed;
    dpht_reference_mode kw_reference;
    dpht_reference_mode mw_reference;
} dpht_simulation_spec;

typedef struct dpht_power_estimate {
    double power;
    size_t rejections;
    size_t trials;
    double standard_error;
} dpht_power_estimate;

DPHT_API const char* dpht_last_error(void);
DPHT_API const char* dpht_status_string(dpht_status status);
DPHT_API const char* dpht_test_name(dpht_test_kind test);
DPHT_API const char* dpht_reference_name(dpht_reference_mode mode);
DPHT_API dpht_status dpht_parse_test_name(const char* name, dpht_test_kind* out);

/* Samples */
DPHT_API dpht_status dpht_sample_load_csv(const char* path, dpht_input_format format, size_t declared_groups,
                                          dpht_sample** out);
DPHT_API dpht_status dpht_sample_from_groups(const size_t* labels, const double* values, size_t n, size_t g,
                                             dpht_sample** out);
DPHT_API dpht_status dpht_sample_from_pairs(const double* u, const double* v, size_t n, dpht_sample** out);
DPHT_API dpht_status dpht_sample_from_values(const double* values, size_t n, dpht_sample** out);
DPHT_API void dpht_sample_free(dpht_sample* sample);
DPHT_API size_t dpht_sample_size(const dpht_sample* sample);
DPHT_API size_t dpht_sample_groups(const dpht_sample* sample);
DPHT_API dpht_input_format dpht_sample_format(const dpht_sample* sample);

/* Tests */
DPHT_API void dpht_test_config_init(dpht_test_config* config, dpht_test_kind test);
DPHT_API dpht_status dpht_run_test(const dpht_sample* sample, const dpht_test_config* config,
                                   dpht_test_outcome* out);

/* Reference distributions */
DPHT_API void dpht_reference_config_init(dpht_reference_config* config, dpht_test_kind test);
DPHT_API dpht_status dpht_reference_build(const dpht_reference_config* config, dpht_reference** out);
DPHT_API void dpht_reference_free(dpht_reference* ref);
DPHT_API size_t dpht_reference_size(const dpht_reference* ref);
DPHT_API dpht_status dpht_reference_p_value(const dpht_reference* ref, double statistic, double* out);
DPHT_API dpht_status dpht_reference_critical_value(const dpht_reference* ref, double alpha, double* out);
/* q-quantile of the signed reference samples. */
DPHT_API dpht_status dpht_reference_quantile(const dpht_reference* ref, double q, double* out);
/* Null standard deviation of the Wilcoxon-Pratt statistic, used to report
 * normalised critical values. */
DPHT_API double dpht_wilcoxon_null_sd(size_t n);

/* Simulation harness */
DPHT_API void dpht_simulation_spec_init(dpht_simulation_spec* spec, dpht_test_kind test);
DPHT_API dpht_status dpht_simulate_power(const dpht_simulation_spec* spec, dpht_power_estimate* out);
/* p_values receives spec->trials values in trial order; the QQ arrays (each
 * spec->trials long) may be NULL. */
DPHT_API dpht_status dpht_simulate_type1(const dpht_simulation_spec* spec, double* p_values,
                                         double* qq_theoretical, double* qq_empirical);
DPHT_API dpht_status dpht_sweep_budget_split(const dpht_simulation_spec* spec, const double* fractions,
                                             size_t count, dpht_power_estimate* out);
DPHT_API dpht_status dpht_min_sample_size(const dpht_simulation_spec* spec, double target_power, size_t lo,
                                          size_t hi, size_t* out);

#ifdef __cplusplus
}
#endif

#endif /* DPHT_H */
