/* C interface to the twinbeam library. */
#ifndef TWINBEAM_TWINBEAM_H
#define TWINBEAM_TWINBEAM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(TWINBEAM_BUILDING)
#    define TB_API __declspec(dllexport)
#  else
#    define TB_API __declspec(dllimport)
#  endif
#else
#  define TB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tb_status {
  TB_OK = 0,
  TB_INVALID_ARGUMENT = 1,
  TB_EMPTY_DATA = 2,
  TB_NEGATIVE_MEAN = 3,
  TB_NEGATIVE_VARIANCE = 4,
  TB_INVALID_ETA = 5,
  TB_LEVEL_MISMATCH = 6,
  TB_NEGATIVE_CROSS_COVARIANCE = 7,
  TB_ZERO_VARIANCE = 8,
  TB_OUT_OF_RANGE = 9,
  TB_UNPHYSICAL_MODEL = 10,
  TB_CANCELLATION_OVERFLOW = 11,
  TB_EMPTY_ROW = 12,
  TB_WRONG_REGIME = 13,
  TB_WRONG_ORDERING = 14,
  TB_BESSEL_OVERFLOW = 15,
  TB_UNSUPPORTED_MODEL = 16,
  TB_INSUFFICIENT_MASS = 17,
  TB_PARSE_ERROR = 18,
  TB_IO_ERROR = 19,
  TB_NOT_CONVERGED = 20,
  TB_INTERNAL = 100
} tb_status;

typedef enum tb_level { TB_PHOTOELECTRON = 0, TB_PHOTON = 1, TB_INTENSITY = 2 } tb_level;

typedef enum tb_mode_policy {
  TB_MODES_MEAN = 0,
  TB_MODES_ARM1 = 1,
  TB_MODES_ARM2 = 2,
  TB_MODES_EXPLICIT = 3
} tb_mode_policy;

typedef enum tb_regime { TB_REGULAR = 0, TB_OSCILLATORY = 1 } tb_regime;

typedef struct tb_moment_set {
  int level; /* tb_level */
  double mean1, mean2, second1, second2, cross;
} tb_moment_set;

typedef struct tb_model {
  double b1, b2, modes, d12;
  double m1_modes, m2_modes;
} tb_model;

typedef struct tb_report {
  double k, s_th, lambda;
  double r, r_raw, var_w_diff, var_w_diff_raw, c, c_raw;
  int lower_bound_holds, upper_bound_holds, sub_shot_noise_bound_holds;
  int mode_bound_ok, physical;
  int nonclassical;
} tb_report;

typedef struct tb_joint_options {
  long n1_max, n2_max; /* negative: automatic */
  double sigma_span;
  double tail_mass;
  double band_log_cutoff;
  double max_cancel_digits;
  unsigned threads; /* 0: all cores */
} tb_joint_options;

typedef struct tb_conditional {
  long n1;
  double row_mass, mean, variance, fano_empirical, fano_closed_form;
} tb_conditional;

typedef struct tb_difference_stats {
  double mass, mean, variance;
} tb_difference_stats;

typedef struct tb_quasi_options {
  double s;
  double w1_max, w2_max; /* <= 0: automatic */
  double sigma_span;
  int points;
  double a_param; /* <= 0: default */
  unsigned threads;
} tb_quasi_options;

typedef struct tb_shots tb_shots;
typedef struct tb_joint tb_joint;
typedef struct tb_quasi tb_quasi;

/* Errors. The message and line of the last failure on the calling thread. */
TB_API const char* tb_version(void);
TB_API const char* tb_status_name(tb_status status);
TB_API const char* tb_last_error(void);
TB_API long tb_last_error_line(void); /* -1 when not applicable */
TB_API void tb_string_free(char* s);

/* Moments */
TB_API tb_status tb_moments_validate(const tb_moment_set* m);
TB_API tb_status tb_subtract_noise(const tb_moment_set* signal, const tb_moment_set* noise,
                                   tb_moment_set* out);
TB_API tb_status tb_photoelectron_to_photon(const tb_moment_set* m, double eta,
                                            tb_moment_set* out);
TB_API tb_status tb_photon_to_photoelectron(const tb_moment_set* n, double eta,
                                            tb_moment_set* out);
TB_API tb_status tb_photon_to_intensity(const tb_moment_set* n, tb_moment_set* out);
TB_API tb_status tb_intensity_to_photon(const tb_moment_set* w, tb_moment_set* out);
TB_API double tb_burgess_map(double fano_photon, double eta);
/* eta and noise are optional outputs; *eta is NaN and *has_noise 0 when absent. */
TB_API tb_status tb_moments_read_json(const char* path, tb_moment_set* out, double* eta,
                                      tb_moment_set* noise, int* has_noise);
/* Returns a JSON string; release with tb_string_free. */
TB_API tb_status tb_moments_to_json(const tb_moment_set* m, char** json);

/* Shots */
TB_API tb_status tb_shots_create(const int64_t* m1, const int64_t* m2, size_t count, double eta,
                                 tb_shots** out);
TB_API tb_status tb_shots_read_csv(const char* path, double eta, tb_shots** out);
TB_API tb_status tb_shots_write_csv(const tb_shots* shots, const char* path);
TB_API size_t tb_shots_count(const tb_shots* shots);
TB_API tb_status tb_shots_get(const tb_shots* shots, size_t index, int64_t* m1, int64_t* m2);
TB_API tb_status tb_shots_reduce(const tb_shots* shots, tb_moment_set* out);
TB_API void tb_shots_free(tb_shots* shots);

/* Model */
TB_API tb_status tb_model_make(double b1, double b2, double modes, double d12, tb_model* out);
TB_API tb_status tb_fit(const tb_moment_set* intensity, tb_mode_policy policy,
                        double explicit_modes, tb_model* out);
TB_API tb_status tb_forward_moments(const tb_model* model, tb_moment_set* intensity);
TB_API tb_status tb_k_s(const tb_model* model, double s, double* out);
TB_API tb_status tb_threshold_ordering(const tb_model* model, double* out);
TB_API tb_status tb_report_compute(const tb_model* model, const tb_moment_set* photon,
                                   tb_report* out);
TB_API tb_status tb_model_read_json(const char* path, tb_model* out);
TB_API tb_status tb_model_to_json(const tb_model* model, char** json);
TB_API tb_status tb_report_to_json(const tb_model* model, const tb_moment_set* photon,
                                   char** json);
TB_API tb_status tb_report_to_text(const tb_model* model, const tb_moment_set* photon,
                                   char** text);

/* Joint photon-number distribution */
TB_API void tb_joint_options_default(tb_joint_options* options);
TB_API tb_status tb_joint_compute(const tb_model* model, const tb_joint_options* options,
                                  tb_joint** out);
TB_API tb_status tb_joint_border(double b1, double b2, double modes,
                                 const tb_joint_options* options, tb_joint** out);
TB_API long tb_joint_n1_max(const tb_joint* joint);
TB_API long tb_joint_n2_max(const tb_joint* joint);
TB_API double tb_joint_prob(const tb_joint* joint, long n1, long n2);
TB_API double tb_joint_captured_mass(const tb_joint* joint);
TB_API double tb_joint_max_digits_lost(const tb_joint* joint);
TB_API tb_status tb_joint_conditional(const tb_joint* joint, long n1, tb_conditional* out);
TB_API double tb_conditional_fano_limit(const tb_model* model);
TB_API tb_status tb_joint_moments(const tb_joint* joint, tb_moment_set* photon);
TB_API tb_status tb_joint_write_csv(const tb_joint* joint, const char* path, double threshold);
TB_API tb_status tb_joint_write_difference_csv(const tb_joint* joint, const char* path,
                                               tb_difference_stats* stats);
TB_API void tb_joint_free(tb_joint* joint);

/* Quasi-distributions */
TB_API void tb_quasi_options_default(tb_quasi_options* options);
TB_API tb_status tb_quasi_compute(const tb_model* model, const tb_quasi_options* options,
                                  tb_quasi** out);
TB_API int tb_quasi_regime(const tb_quasi* quasi);
TB_API int tb_quasi_resolved(const tb_quasi* quasi);
TB_API int tb_quasi_ridge_limit(const tb_quasi* quasi);
TB_API double tb_quasi_a_param(const tb_quasi* quasi);
TB_API size_t tb_quasi_n1(const tb_quasi* quasi);
TB_API size_t tb_quasi_n2(const tb_quasi* quasi);
TB_API double tb_quasi_w1(const tb_quasi* quasi, size_t i);
TB_API double tb_quasi_w2(const tb_quasi* quasi, size_t j);
TB_API double tb_quasi_value(const tb_quasi* quasi, size_t i, size_t j);
TB_API double tb_quasi_min(const tb_quasi* quasi);
TB_API double tb_quasi_integral(const tb_quasi* quasi);
TB_API tb_status tb_quasi_write_csv(const tb_quasi* quasi, const char* path);
/* Difference quasi-distribution P_{s,-}; min_value and integral are optional. */
TB_API tb_status tb_quasi_write_difference_csv(const tb_quasi* quasi, const char* path,
                                               double* min_value, double* integral);
TB_API void tb_quasi_free(tb_quasi* quasi);

/* Simulation */
TB_API tb_status tb_simulate(const tb_model* model, double eta, long shots, uint64_t seed,
                             unsigned threads, tb_shots** out);

/* Re-emits a JSON document with 17 significant digits for every float. */
TB_API tb_status tb_json_format(const char* json, char** out);

#ifdef __cplusplus
}
#endif

#endif
