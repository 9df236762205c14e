#ifndef REVCLT_REVCLT_H
#define REVCLT_REVCLT_H

/* C interface to the revclt toolkit. Every function returns a revclt_status;
 * on failure the thread-local message from revclt_last_error() explains it.
 * Objects are opaque and released with their matching *_free function. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(REVCLT_BUILDING)
#    define REVCLT_API __declspec(dllexport)
#  else
#    define REVCLT_API __declspec(dllimport)
#  endif
#else
#  define REVCLT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum revclt_status {
  REVCLT_OK = 0,
  REVCLT_ERR_INVALID_ARGUMENT = 1,
  REVCLT_ERR_PARSE = 2, /* malformed input file */
  REVCLT_ERR_IO = 3,
  REVCLT_ERR_INVARIANT = 4, /* trajectory failed validation */
  REVCLT_ERR_USAGE = 5,     /* bad command line or config file */
  REVCLT_ERR_INTERNAL = 6,
  REVCLT_HELP = 7 /* --help was given; text in revclt_last_error() */
} revclt_status;

typedef struct revclt_trajectory revclt_trajectory;
typedef struct revclt_config revclt_config;

REVCLT_API const char* revclt_version(void);

/* Message of the last failing call on this thread; "" if none. */
REVCLT_API const char* revclt_last_error(void);

REVCLT_API const char* revclt_status_string(revclt_status status);

/* Exact quantities */
REVCLT_API revclt_status revclt_sigma2(uint64_t n, double* out);
REVCLT_API revclt_status revclt_harmonic(uint64_t n, double* out);
REVCLT_API revclt_status revclt_cond_norms(uint64_t n, double* l1, double* l2_sq);
REVCLT_API revclt_status revclt_regen_law(uint64_t y, double* tail, double* pmf, double* h);
REVCLT_API revclt_status revclt_solve_bn(uint64_t n, double* b, double* proxy);
REVCLT_API revclt_status revclt_cross_moment(uint64_t a, uint64_t b, double* out);

/* Kernel functionals at a state x in [-1, 1] */
REVCLT_API revclt_status revclt_q_power_sign(double x, uint64_t k, double* out);
REVCLT_API revclt_status revclt_cond_sum(double x, uint64_t n, double* out);
REVCLT_API revclt_status revclt_theta(uint64_t n, double x, double* out);

/* S_[n t] for each t of a sorted grid in (0, 1], from stream
 * (master_seed, stream_index) with a stationary start. */
REVCLT_API revclt_status revclt_simulate_regen_sum(uint64_t n, const double* t_grid,
                                                   size_t grid_len, uint64_t master_seed,
                                                   uint64_t stream_index, double* out);

/* Trajectories. `start` may be NULL for a stationary start. */
REVCLT_API revclt_status revclt_trajectory_simulate(uint64_t n, uint64_t master_seed,
                                                    uint64_t stream_index, const double* start,
                                                    revclt_trajectory** out);
REVCLT_API revclt_status revclt_trajectory_from_states(const double* states, size_t count,
                                                       revclt_trajectory** out);
REVCLT_API revclt_status revclt_trajectory_load(const char* path, revclt_trajectory** out);
REVCLT_API revclt_status revclt_trajectory_save(const revclt_trajectory* traj, const char* path);
REVCLT_API void revclt_trajectory_free(revclt_trajectory* traj);

/* Path length n; the arrays below hold n + 1 entries and live as long as
 * the trajectory. */
REVCLT_API uint64_t revclt_trajectory_length(const revclt_trajectory* traj);
REVCLT_API const double* revclt_trajectory_states(const revclt_trajectory* traj);
REVCLT_API const double* revclt_trajectory_x_vals(const revclt_trajectory* traj);
REVCLT_API const double* revclt_trajectory_prefix_sums(const revclt_trajectory* traj);

/* Forward and forward-backward decompositions at horizon n. Any of the
 * output pointers may be NULL. */
REVCLT_API revclt_status revclt_decompose(const revclt_trajectory* traj, uint64_t n,
                                          double* residual_fwd, double* residual_fb,
                                          double* tolerance);
REVCLT_API revclt_status revclt_decompose_write_csv(const revclt_trajectory* traj, uint64_t n,
                                                    const char* path);

/* Command line: argv[0] is the program name. */
REVCLT_API revclt_status revclt_config_parse(int argc, const char* const* argv,
                                             revclt_config** out);
/* Config echoed in config-file syntax; owned by the config. */
REVCLT_API const char* revclt_config_echo(const revclt_config* cfg);
REVCLT_API void revclt_config_free(revclt_config* cfg);

/* Runs the configured command, printing progress to stdout when `verbose`.
 * exit_code receives 0 (all theorem checks pass), 1 (a check failed) or
 * 2 (a check was inconclusive). */
REVCLT_API revclt_status revclt_run(const revclt_config* cfg, int verbose, int* exit_code);

REVCLT_API const char* revclt_usage(void);

#ifdef __cplusplus
}
#endif

#endif /* REVCLT_REVCLT_H */
