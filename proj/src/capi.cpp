#include "todalab/todalab.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "todalab/csvio.hpp"
#include "todalab/error.hpp"
#include "todalab/experiment.hpp"
#include "todalab/flow.hpp"
#include "todalab/jacobi.hpp"
#include "todalab/soliton.hpp"

struct tl_state {
  todalab::LatticeState s;
};

struct tl_run {
  todalab::RunOutcome r;
};

namespace {

thread_local std::string g_last_error;

tl_status map_code(todalab::ErrorCode c) {
  switch (c) {
    case todalab::ErrorCode::kInvalidArgument: return TL_ERR_INVALID_ARGUMENT;
    case todalab::ErrorCode::kDomain: return TL_ERR_DOMAIN;
    case todalab::ErrorCode::kConfig: return TL_ERR_CONFIG;
    case todalab::ErrorCode::kNumerical: return TL_ERR_NUMERICAL;
    case todalab::ErrorCode::kIo: return TL_ERR_IO;
    case todalab::ErrorCode::kMargin: return TL_ERR_MARGIN;
  }
  return TL_ERR_INTERNAL;
}

template <class F>
tl_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return TL_OK;
  } catch (const todalab::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TL_ERR_INTERNAL;
  }
}

void require(bool ok, const char* msg) {
  if (!ok) throw todalab::invalid_argument(msg);
}

}  // namespace

extern "C" {

const char* tl_version(void) { return "1.0.0"; }

const char* tl_last_error(void) { return g_last_error.c_str(); }

const char* tl_status_name(tl_status s) {
  switch (s) {
    case TL_OK: return "ok";
    case TL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TL_ERR_DOMAIN: return "domain error";
    case TL_ERR_CONFIG: return "config error";
    case TL_ERR_NUMERICAL: return "numerical error";
    case TL_ERR_IO: return "i/o error";
    case TL_ERR_MARGIN: return "margin error";
    case TL_ERR_VERIFICATION: return "verification failure";
    case TL_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

tl_status tl_state_create(size_t n, long offset, const double* a, const double* b,
                          tl_state** out) {
  return guarded([&] {
    require(out && a && b, "tl_state_create: null pointer");
    *out = nullptr;
    todalab::LatticeState s;
    s.offset = offset;
    s.a.assign(a, a + n);
    s.b.assign(b, b + n);
    s.validate();
    *out = new tl_state{std::move(s)};
  });
}

tl_status tl_state_from_soliton(double kappa, int sign, double q, double delta, size_t n,
                                long offset, double t, tl_state** out) {
  return guarded([&] {
    require(out != nullptr, "tl_state_from_soliton: null pointer");
    *out = nullptr;
    todalab::SolitonSpec sp{kappa, sign, q, delta};
    sp.validate();
    *out = new tl_state{todalab::soliton_state(sp, n, offset, t)};
  });
}

tl_status tl_state_load_csv(const char* path, tl_state** out) {
  return guarded([&] {
    require(out && path, "tl_state_load_csv: null pointer");
    *out = nullptr;
    *out = new tl_state{todalab::read_state_csv(std::string(path))};
  });
}

tl_status tl_state_save_csv(const tl_state* s, const char* path) {
  return guarded([&] {
    require(s && path, "tl_state_save_csv: null pointer");
    todalab::write_trajectory_csv(std::string(path), {0.0}, {s->s});
  });
}

void tl_state_destroy(tl_state* s) { delete s; }

size_t tl_state_size(const tl_state* s) { return s ? s->s.size() : 0; }

long tl_state_offset(const tl_state* s) { return s ? s->s.offset : 0; }

tl_status tl_state_get(const tl_state* s, double* a, double* b) {
  return guarded([&] {
    require(s && a && b, "tl_state_get: null pointer");
    std::memcpy(a, s->s.a.data(), s->s.size() * sizeof(double));
    std::memcpy(b, s->s.b.data(), s->s.size() * sizeof(double));
  });
}

tl_status tl_jacobi_norm(const tl_state* s, double* out) {
  return guarded([&] {
    require(s && out, "tl_jacobi_norm: null pointer");
    *out = todalab::jacobi_norm(s->s);
  });
}

tl_status tl_hamiltonian(const tl_state* s, double* out) {
  return guarded([&] {
    require(s && out, "tl_hamiltonian: null pointer");
    *out = todalab::hamiltonian_ab(s->s);
  });
}

tl_status tl_optimal_mu(double* mu, double* factor) {
  return guarded([&] {
    require(mu && factor, "tl_optimal_mu: null pointer");
    const auto o = todalab::optimal_mu();
    *mu = o.mu;
    *factor = o.f;
  });
}

tl_status tl_velocity_toda(double mu, double lnorm, double* out) {
  return guarded([&] {
    require(out != nullptr, "tl_velocity_toda: null pointer");
    *out = todalab::velocity_toda(mu, lnorm);
  });
}

tl_status tl_integrate(tl_state* s, double t, const char* method, double tolerance,
                       double step) {
  return guarded([&] {
    require(s && method, "tl_integrate: null pointer");
    require(t >= 0.0 && std::isfinite(t), "tl_integrate: t must be finite and >= 0");
    todalab::IntegratorConfig cfg;
    cfg.method = todalab::IntegratorConfig::parse_method(method);
    if (cfg.method == todalab::Method::kRkAdaptive) {
      cfg.tolerance = tolerance;
    } else {
      cfg.step = step;
      cfg.max_step = std::max(cfg.max_step, step);
    }
    cfg.validate();
    const auto tr = todalab::integrate(s->s, todalab::FlaschkaFlow::toda(), {0.0, t}, cfg);
    s->s = tr.states.back();
  });
}

tl_status tl_default_config_json(char** out) {
  return guarded([&] {
    require(out != nullptr, "tl_default_config_json: null pointer");
    const std::string j = todalab::default_config_json();
    char* p = static_cast<char*>(std::malloc(j.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, j.c_str(), j.size() + 1);
    *out = p;
  });
}

void tl_string_free(char* s) { std::free(s); }

tl_status tl_run_config(const char* config_json, const char* origin, const char* out_dir,
                        tl_run** out) {
  return guarded([&] {
    require(config_json && out, "tl_run_config: null pointer");
    *out = nullptr;
    *out = new tl_run{todalab::run_config_text(config_json, origin ? origin : "<config>",
                                               out_dir ? out_dir : "")};
  });
}

tl_status tl_sweep_config(const char* config_json, const char* origin, const char* axis,
                          const double* values, size_t n_values, const char* out_dir,
                          unsigned jobs, tl_run** out) {
  return guarded([&] {
    require(config_json && axis && out && (values || n_values == 0),
            "tl_sweep_config: null pointer");
    *out = nullptr;
    *out = new tl_run{todalab::run_sweep_text(config_json, origin ? origin : "<config>", axis,
                                              std::vector<double>(values, values + n_values),
                                              out_dir ? out_dir : "", jobs)};
  });
}

int tl_run_exit_code(const tl_run* r) { return r ? r->r.exit_code : 2; }

const char* tl_run_summary_json(const tl_run* r) { return r ? r->r.summary_json.c_str() : ""; }

const char* tl_run_message(const tl_run* r) { return r ? r->r.message.c_str() : ""; }

void tl_run_destroy(tl_run* r) { delete r; }

}  // extern "C"
