#include "revclt/revclt.h"

#include <cmath>
#include <exception>
#include <iostream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "chain_model.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "exact_analytics.hpp"
#include "martingale_decomp.hpp"
#include "runner.hpp"
#include "simulation_engine.hpp"

struct revclt_trajectory {
  revclt::sim::Trajectory traj;
};

struct revclt_config {
  revclt::cli::RunConfig cfg;
  std::string echo;
};

namespace {

thread_local std::string g_last_error;

revclt_status fail(revclt_status s, const std::string& what) {
  g_last_error = what;
  return s;
}

// Status of an exception; a wrapped exception is classified by its cause.
revclt_status classify(const std::exception_ptr& p) noexcept {
  try {
    std::rethrow_exception(p);
  } catch (const std::nested_exception& n) {
    return n.nested_ptr() ? classify(n.nested_ptr()) : REVCLT_ERR_INTERNAL;
  } catch (const revclt::cli::UsageError&) {
    return REVCLT_ERR_USAGE;
  } catch (const revclt::report::ParseError&) {
    return REVCLT_ERR_PARSE;
  } catch (const revclt::report::IoError&) {
    return REVCLT_ERR_IO;
  } catch (const revclt::sim::InvariantError&) {
    return REVCLT_ERR_INVARIANT;
  } catch (const std::invalid_argument&) {
    return REVCLT_ERR_INVALID_ARGUMENT;
  } catch (const std::out_of_range&) {
    return REVCLT_ERR_INVALID_ARGUMENT;
  } catch (...) {
    return REVCLT_ERR_INTERNAL;
  }
}

// Maps the exception in flight to a status code and records its message.
revclt_status translate() noexcept {
  const auto p = std::current_exception();
  try {
    throw;
  } catch (const std::bad_alloc&) {
    return fail(REVCLT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(classify(p), e.what());
  } catch (...) {
    return fail(REVCLT_ERR_INTERNAL, "unknown error");
  }
}

template <class F>
revclt_status guarded(F&& f) noexcept {
  try {
    f();
    return REVCLT_OK;
  } catch (...) {
    return translate();
  }
}

revclt_status null_arg(const char* name) {
  return fail(REVCLT_ERR_INVALID_ARGUMENT, std::string(name) + " must not be NULL");
}

revclt_status check_state(double x) {
  if (!(std::abs(x) <= 1.0)) return fail(REVCLT_ERR_INVALID_ARGUMENT, "state outside [-1, 1]");
  return REVCLT_OK;
}

template <class T>
void set(T* p, T v) {
  if (p) *p = v;
}

}  // namespace

extern "C" {

const char* revclt_version(void) { return revclt::cli::version(); }

const char* revclt_last_error(void) { return g_last_error.c_str(); }

const char* revclt_status_string(revclt_status status) {
  switch (status) {
    case REVCLT_OK: return "ok";
    case REVCLT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case REVCLT_ERR_PARSE: return "parse error";
    case REVCLT_ERR_IO: return "i/o error";
    case REVCLT_ERR_INVARIANT: return "invariant violation";
    case REVCLT_ERR_USAGE: return "usage error";
    case REVCLT_ERR_INTERNAL: return "internal error";
    case REVCLT_HELP: return "help requested";
  }
  return "unknown status";
}

revclt_status revclt_sigma2(uint64_t n, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = revclt::exact::sigma2(n); });
}

revclt_status revclt_harmonic(uint64_t n, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = revclt::exact::harmonic(n); });
}

revclt_status revclt_cond_norms(uint64_t n, double* l1, double* l2_sq) {
  return guarded([&] {
    auto c = revclt::exact::cond_norms(n);
    set(l1, c.l1);
    set(l2_sq, c.l2_sq);
  });
}

revclt_status revclt_regen_law(uint64_t y, double* tail, double* pmf, double* h) {
  return guarded([&] {
    auto law = revclt::exact::regen_law(y);
    set(tail, law.tail);
    set(pmf, law.pmf);
    set(h, law.H);
  });
}

revclt_status revclt_solve_bn(uint64_t n, double* b, double* proxy) {
  return guarded([&] {
    auto r = revclt::exact::solve_bn(n);
    set(b, r.b);
    set(proxy, r.proxy);
  });
}

revclt_status revclt_cross_moment(uint64_t a, uint64_t b, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = revclt::exact::cross_moment(a, b); });
}

revclt_status revclt_q_power_sign(double x, uint64_t k, double* out) {
  if (!out) return null_arg("out");
  if (auto s = check_state(x); s != REVCLT_OK) return s;
  *out = revclt::chain::q_power_f({x}, k);
  return REVCLT_OK;
}

revclt_status revclt_cond_sum(double x, uint64_t n, double* out) {
  if (!out) return null_arg("out");
  if (auto s = check_state(x); s != REVCLT_OK) return s;
  *out = revclt::chain::cond_sum({x}, n);
  return REVCLT_OK;
}

revclt_status revclt_theta(uint64_t n, double x, double* out) {
  if (!out) return null_arg("out");
  if (n == 0) return fail(REVCLT_ERR_INVALID_ARGUMENT, "n must be positive");
  if (auto s = check_state(x); s != REVCLT_OK) return s;
  *out = revclt::mart::theta_eval(n, {x});
  return REVCLT_OK;
}

revclt_status revclt_simulate_regen_sum(uint64_t n, const double* t_grid, size_t grid_len,
                                        uint64_t master_seed, uint64_t stream_index,
                                        double* out) {
  if (!t_grid || !out) return null_arg(!t_grid ? "t_grid" : "out");
  return guarded([&] {
    revclt::RngStream rng(master_seed, stream_index);
    auto v = revclt::sim::simulate_regen_sum(n, std::span(t_grid, grid_len), rng);
    std::copy(v.begin(), v.end(), out);
  });
}

revclt_status revclt_trajectory_simulate(uint64_t n, uint64_t master_seed, uint64_t stream_index,
                                         const double* start, revclt_trajectory** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  if (start) {
    if (auto s = check_state(*start); s != REVCLT_OK) return s;
  }
  return guarded([&] {
    revclt::RngStream rng(master_seed, stream_index);
    std::optional<revclt::chain::ChainState> st;
    if (start) st = revclt::chain::ChainState{*start};
    auto t = std::make_unique<revclt_trajectory>();
    t->traj = revclt::sim::simulate_direct(n, rng, st);
    *out = t.release();
  });
}

revclt_status revclt_trajectory_from_states(const double* states, size_t count,
                                            revclt_trajectory** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  if (!states) return null_arg("states");
  return guarded([&] {
    auto t = std::make_unique<revclt_trajectory>();
    t->traj = revclt::sim::trajectory_from_states({states, states + count});
    *out = t.release();
  });
}

revclt_status revclt_trajectory_load(const char* path, revclt_trajectory** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  if (!path) return null_arg("path");
  return guarded([&] {
    auto t = std::make_unique<revclt_trajectory>();
    t->traj = revclt::sim::load_trajectory(path);
    *out = t.release();
  });
}

revclt_status revclt_trajectory_save(const revclt_trajectory* traj, const char* path) {
  if (!traj || !path) return null_arg(!traj ? "traj" : "path");
  return guarded([&] { revclt::sim::save_trajectory(traj->traj, path); });
}

void revclt_trajectory_free(revclt_trajectory* traj) { delete traj; }

uint64_t revclt_trajectory_length(const revclt_trajectory* traj) {
  return traj ? traj->traj.length() : 0;
}

const double* revclt_trajectory_states(const revclt_trajectory* traj) {
  return traj ? traj->traj.states.data() : nullptr;
}

const double* revclt_trajectory_x_vals(const revclt_trajectory* traj) {
  return traj ? traj->traj.x_vals.data() : nullptr;
}

const double* revclt_trajectory_prefix_sums(const revclt_trajectory* traj) {
  return traj ? traj->traj.prefix_sums.data() : nullptr;
}

revclt_status revclt_decompose(const revclt_trajectory* traj, uint64_t n, double* residual_fwd,
                               double* residual_fb, double* tolerance) {
  if (!traj) return null_arg("traj");
  return guarded([&] {
    auto rec = revclt::mart::decompose_fb(traj->traj, n);
    set(residual_fwd, rec.residual_fwd);
    set(residual_fb, rec.residual_fb);
    set(tolerance, rec.tolerance());
  });
}

revclt_status revclt_decompose_write_csv(const revclt_trajectory* traj, uint64_t n,
                                         const char* path) {
  if (!traj || !path) return null_arg(!traj ? "traj" : "path");
  return guarded([&] {
    auto rec = revclt::mart::decompose_fb(traj->traj, n);
    revclt::mart::write_decomposition_csv(traj->traj, rec, path);
  });
}

revclt_status revclt_config_parse(int argc, const char* const* argv, revclt_config** out) {
  if (!out) return null_arg("out");
  *out = nullptr;
  if (!argv) return null_arg("argv");
  revclt_status status = REVCLT_OK;
  auto s = guarded([&] {
    auto parsed = revclt::cli::parse_config(argc, argv);
    if (parsed.help) {
      g_last_error = parsed.help_text;
      status = REVCLT_HELP;
      return;
    }
    auto c = std::make_unique<revclt_config>();
    c->cfg = std::move(parsed.config);
    c->echo = revclt::cli::to_key_values(c->cfg);
    *out = c.release();
  });
  return s != REVCLT_OK ? s : status;
}

const char* revclt_config_echo(const revclt_config* cfg) { return cfg ? cfg->echo.c_str() : ""; }

void revclt_config_free(revclt_config* cfg) { delete cfg; }

revclt_status revclt_run(const revclt_config* cfg, int verbose, int* exit_code) {
  if (!cfg || !exit_code) return null_arg(!cfg ? "cfg" : "exit_code");
  return guarded([&] {
    std::ostringstream sink;
    std::ostream& log = verbose ? std::cout : static_cast<std::ostream&>(sink);
    *exit_code = revclt::cli::run(cfg->cfg, log).exit_code;
  });
}

const char* revclt_usage(void) {
  static const std::string text = revclt::cli::usage_text();
  return text.c_str();
}

}  // extern "C"
