#include "kerrsim/kerrsim.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "kerrsim/dynamics.hpp"
#include "kerrsim/error.hpp"
#include "kerrsim/exactness.hpp"
#include "kerrsim/gaussianity.hpp"
#include "kerrsim/liouville.hpp"
#include "kerrsim/meanfield.hpp"
#include "kerrsim/operators.hpp"
#include "kerrsim/phasespace.hpp"
#include "kerrsim/runner.hpp"

struct ks_model {
  kerrsim::ModelParams params;
};

struct ks_liouvillian {
  kerrsim::Superoperator L;
};

struct ks_state {
  kerrsim::DensityMatrix rho;
};

struct ks_trajectory {
  kerrsim::Trajectory traj;
};

struct ks_config {
  kerrsim::RunConfig cfg;
  std::string experiment;
};

struct ks_manifest {
  kerrsim::RunManifest manifest;
  std::vector<std::string> files;
};

namespace {

thread_local std::string last_error;

ks_status record(ks_status status, const char* what) {
  last_error = what;
  return status;
}

// Runs `body` and converts any exception into a status code.
template <class F>
ks_status guarded(F&& body) noexcept {
  try {
    last_error.clear();
    body();
    return KS_OK;
  } catch (const kerrsim::Error& e) {
    return record(static_cast<ks_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return record(KS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(KS_ERR_INTERNAL, e.what());
  } catch (...) {
    return record(KS_ERR_INTERNAL, "unknown exception");
  }
}

#define KS_REQUIRE(ptr)                                            \
  do {                                                             \
    if (!(ptr)) return record(KS_ERR_NULL_POINTER, #ptr " is NULL"); \
  } while (0)

}  // namespace

extern "C" {

const char* ks_version(void) { return KERRSIM_VERSION; }

const char* ks_last_error(void) { return last_error.c_str(); }

const char* ks_status_name(ks_status status) {
  if (status == KS_OK) return "ok";
  if (status == KS_ERR_NULL_POINTER) return "null-pointer";
  if (status >= KS_ERR_INVALID_ARGUMENT && status <= KS_ERR_INTERNAL)
    return kerrsim::to_string(static_cast<kerrsim::ErrorCode>(status));
  return "unknown";
}

void ks_string_free(char* s) { std::free(s); }

ks_status ks_model_create(double delta, double kappa, double u, ks_model** out) {
  KS_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    kerrsim::ModelParams p;
    p.delta = delta;
    p.kappa = kappa;
    p.u = u;
    p.validate();
    *out = new ks_model{p};
  });
}

ks_status ks_model_set_pump(ks_model* model, double eps, double N) {
  KS_REQUIRE(model);
  return guarded([&] {
    const kerrsim::ModelParams p = model->params.with_epsilon(eps).with_scale(N);
    p.validate();
    model->params = p;
  });
}

void ks_model_destroy(ks_model* model) { delete model; }

ks_status ks_bistability_edges(const ks_model* model, double* eps_lo, double* eps_hi) {
  KS_REQUIRE(model);
  KS_REQUIRE(eps_lo);
  KS_REQUIRE(eps_hi);
  return guarded([&] {
    const kerrsim::BistabilityEdges e = kerrsim::bistability_edges(model->params);
    *eps_lo = e.eps_lo;
    *eps_hi = e.eps_hi;
  });
}

ks_status ks_critical_pump(const ks_model* model, double N, double* eps_c) {
  KS_REQUIRE(model);
  KS_REQUIRE(eps_c);
  return guarded([&] { *eps_c = kerrsim::critical_pump(model->params, N); });
}

ks_status ks_exact_moment(const ks_model* model, int n, int m, double* re, double* im) {
  KS_REQUIRE(model);
  KS_REQUIRE(re);
  KS_REQUIRE(im);
  return guarded([&] {
    const kerrsim::Complex v = kerrsim::exact_moment(n, m, model->params);
    *re = v.real();
    *im = v.imag();
  });
}

ks_status ks_truncation(const ks_model* model, int* n_max) {
  KS_REQUIRE(model);
  KS_REQUIRE(n_max);
  return guarded([&] { *n_max = kerrsim::choose_truncation(model->params); });
}

ks_status ks_liouvillian_create(const ks_model* model, int fock_dim, ks_liouvillian** out) {
  KS_REQUIRE(model);
  KS_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    const int d = fock_dim > 0 ? fock_dim : kerrsim::choose_truncation(model->params) + 1;
    *out = new ks_liouvillian{kerrsim::build_liouvillian(model->params, d)};
  });
}

ks_status ks_liouvillian_fock_dim(const ks_liouvillian* L, int* fock_dim) {
  KS_REQUIRE(L);
  KS_REQUIRE(fock_dim);
  *fock_dim = L->L.fock_dim();
  return KS_OK;
}

void ks_liouvillian_destroy(ks_liouvillian* L) { delete L; }

ks_status ks_ness(const ks_liouvillian* L, ks_state** out, double* residual) {
  KS_REQUIRE(L);
  KS_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    kerrsim::NessResult r = kerrsim::solve_ness(L->L);
    if (residual) *residual = r.residual;
    *out = new ks_state{std::move(r.state)};
  });
}

ks_status ks_spectrum(const ks_liouvillian* L, int k, double* re, double* im, int* count, double* gap) {
  KS_REQUIRE(L);
  KS_REQUIRE(re);
  KS_REQUIRE(im);
  KS_REQUIRE(count);
  if (k < 2) return record(KS_ERR_INVALID_ARGUMENT, "k must be >= 2");
  return guarded([&] {
    const kerrsim::SpectrumResult s = kerrsim::spectrum(L->L, k);
    const int n = std::min<int>(k, static_cast<int>(s.eigenvalues.size()));
    for (int i = 0; i < n; ++i) {
      re[i] = s.eigenvalues[i].real();
      im[i] = s.eigenvalues[i].imag();
    }
    *count = n;
    if (gap) *gap = s.gap;
  });
}

ks_status ks_state_fock_dim(const ks_state* state, int* fock_dim) {
  KS_REQUIRE(state);
  KS_REQUIRE(fock_dim);
  *fock_dim = state->rho.dim();
  return KS_OK;
}

ks_status ks_state_moments(const ks_state* state, double* re_a, double* im_a, double* n) {
  KS_REQUIRE(state);
  return guarded([&] {
    const kerrsim::Complex a = state->rho.mean_a();
    if (re_a) *re_a = a.real();
    if (im_a) *im_a = a.imag();
    if (n) *n = state->rho.mean_n();
  });
}

ks_status ks_state_entropy(const ks_state* state, const ks_model* model, ks_entropy* out) {
  KS_REQUIRE(state);
  KS_REQUIRE(model);
  KS_REQUIRE(out);
  return guarded([&] {
    const kerrsim::EntropyRecord r = kerrsim::instantaneous_entropy(state->rho, model->params);
    *out = ks_entropy{r.s_q, r.pi_j, r.pi_ext, r.pi_d, r.pi_u, r.phi, r.phi_ext, r.phi_q, r.norm};
  });
}

ks_status ks_state_non_gaussianity(const ks_state* state, double* g) {
  KS_REQUIRE(state);
  KS_REQUIRE(g);
  return guarded([&] { *g = kerrsim::non_gaussianity(state->rho).value; });
}

void ks_state_destroy(ks_state* state) { delete state; }

void ks_quench_spec_default(ks_quench_spec* spec) {
  if (!spec) return;
  const kerrsim::QuenchSpec d;
  *spec = ks_quench_spec{d.eps_i, d.eps_f, d.N,  d.t_max,         d.dt_out, d.tol, d.n_max, d.phasespace ? 1 : 0,
                         d.gaussianity ? 1 : 0, d.grid.spacing};
}

ks_status ks_quench_run(const ks_model* model, const ks_quench_spec* spec, ks_trajectory** out) {
  KS_REQUIRE(model);
  KS_REQUIRE(spec);
  KS_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    kerrsim::QuenchSpec q;
    q.eps_i = spec->eps_i;
    q.eps_f = spec->eps_f;
    q.N = spec->N;
    q.t_max = spec->t_max;
    q.dt_out = spec->dt_out;
    q.tol = spec->tol;
    q.n_max = spec->n_max;
    q.phasespace = spec->phasespace != 0;
    q.gaussianity = spec->gaussianity != 0;
    q.grid.spacing = spec->grid_spacing;
    *out = new ks_trajectory{kerrsim::run_quench(model->params, q)};
  });
}

ks_status ks_trajectory_length(const ks_trajectory* traj, size_t* length) {
  KS_REQUIRE(traj);
  KS_REQUIRE(length);
  *length = traj->traj.points.size();
  return KS_OK;
}

ks_status ks_trajectory_row(const ks_trajectory* traj, size_t index, double row[KS_TRAJECTORY_COLUMNS]) {
  KS_REQUIRE(traj);
  KS_REQUIRE(row);
  if (index >= traj->traj.points.size()) return record(KS_ERR_INVALID_ARGUMENT, "row index out of range");
  const auto r = kerrsim::timeseries_row(traj->traj.points[index]);
  std::copy(r.begin(), r.end(), row);
  return KS_OK;
}

ks_status ks_trajectory_write_csv(const ks_trajectory* traj, const char* path) {
  KS_REQUIRE(traj);
  KS_REQUIRE(path);
  return guarded([&] { kerrsim::emit_timeseries(traj->traj, path); });
}

void ks_trajectory_destroy(ks_trajectory* traj) { delete traj; }

ks_status ks_config_parse(const char* text, const char* subcommand, ks_config** out) {
  KS_REQUIRE(text);
  KS_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    kerrsim::RunConfig cfg = kerrsim::parse_config(text, subcommand ? subcommand : "");
    std::string name(kerrsim::experiment_name(cfg.experiment));
    *out = new ks_config{std::move(cfg), std::move(name)};
  });
}

ks_status ks_config_load(const char* path, const char* subcommand, ks_config** out) {
  KS_REQUIRE(path);
  KS_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    kerrsim::RunConfig cfg = kerrsim::load_config(path, subcommand ? subcommand : "");
    std::string name(kerrsim::experiment_name(cfg.experiment));
    *out = new ks_config{std::move(cfg), std::move(name)};
  });
}

ks_status ks_config_set_output(ks_config* config, const char* dir) {
  KS_REQUIRE(config);
  KS_REQUIRE(dir);
  if (!*dir) return record(KS_ERR_INVALID_ARGUMENT, "output directory is empty");
  config->cfg.out_dir = dir;
  return KS_OK;
}

ks_status ks_config_set_jobs(ks_config* config, int jobs) {
  KS_REQUIRE(config);
  if (jobs < 1) return record(KS_ERR_INVALID_ARGUMENT, "jobs must be >= 1");
  config->cfg.jobs = jobs;
  return KS_OK;
}

ks_status ks_config_output(const ks_config* config, const char** dir) {
  KS_REQUIRE(config);
  KS_REQUIRE(dir);
  *dir = config->cfg.out_dir.c_str();
  return KS_OK;
}

ks_status ks_config_experiment(const ks_config* config, const char** name) {
  KS_REQUIRE(config);
  KS_REQUIRE(name);
  *name = config->experiment.c_str();
  return KS_OK;
}

ks_status ks_config_job_count(const ks_config* config, size_t* count) {
  KS_REQUIRE(config);
  KS_REQUIRE(count);
  *count = config->cfg.job_list.size();
  return KS_OK;
}

void ks_config_destroy(ks_config* config) { delete config; }

ks_status ks_run(const ks_config* config, ks_manifest** out) {
  KS_REQUIRE(config);
  KS_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto* m = new ks_manifest{kerrsim::run(config->cfg), {}};
    for (const auto& job : m->manifest.jobs)
      for (const auto& f : job.files) m->files.push_back(f.path);
    *out = m;
  });
}

ks_status ks_manifest_failed(const ks_manifest* manifest, int* failed) {
  KS_REQUIRE(manifest);
  KS_REQUIRE(failed);
  *failed = manifest->manifest.failed();
  return KS_OK;
}

ks_status ks_manifest_json(const ks_manifest* manifest, char** json) {
  KS_REQUIRE(manifest);
  KS_REQUIRE(json);
  *json = nullptr;
  return guarded([&] {
    const std::string s = manifest->manifest.to_json();
    char* buf = static_cast<char*>(std::malloc(s.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, s.c_str(), s.size() + 1);
    *json = buf;
  });
}

ks_status ks_manifest_file_count(const ks_manifest* manifest, size_t* count) {
  KS_REQUIRE(manifest);
  KS_REQUIRE(count);
  *count = manifest->files.size();
  return KS_OK;
}

ks_status ks_manifest_file(const ks_manifest* manifest, size_t index, const char** path) {
  KS_REQUIRE(manifest);
  KS_REQUIRE(path);
  if (index >= manifest->files.size()) return record(KS_ERR_INVALID_ARGUMENT, "file index out of range");
  *path = manifest->files[index].c_str();
  return KS_OK;
}

void ks_manifest_destroy(ks_manifest* manifest) { delete manifest; }

}  // extern "C"
