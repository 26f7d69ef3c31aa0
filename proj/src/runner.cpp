#include "kerrsim/runner.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "json.hpp"
#include "kerrsim/error.hpp"
#include "kerrsim/exactness.hpp"
#include "kerrsim/gaussianity.hpp"
#include "kerrsim/liouville.hpp"
#include "kerrsim/meanfield.hpp"
#include "kerrsim/operators.hpp"

namespace kerrsim {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void put(std::string& line, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  if (!line.empty()) line += ',';
  line += buf;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& header) : path_(path), out_(path, std::ios::binary) {
    if (!out_) fail(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
    out_ << header << '\n';
  }
  void row(std::initializer_list<double> values) {
    std::string line;
    for (double v : values) put(line, v);
    out_ << line << '\n';
  }
  void row(const std::vector<double>& values) {
    std::string line;
    for (double v : values) put(line, v);
    out_ << line << '\n';
  }
  void close() {
    out_.close();
    if (out_.fail()) fail(ErrorCode::io, "write to '" + path_.string() + "' failed");
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

std::string hex(const unsigned char* data, unsigned len) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < len; ++i) {
    s += digits[data[i] >> 4];
    s += digits[data[i] & 15];
  }
  return s;
}

struct JobContext {
  const RunConfig& cfg;
  fs::path dir;
  std::map<std::string, double> resolved;
  JobRecord& record;

  fs::path file(const std::string& name) {
    record.files.push_back({name, {}, 0});
    return dir / name;
  }
  void metric(const std::string& key, double v) { record.metrics[key] = v; }
};

double resolve_pump(const PumpSpec& e, const std::map<std::string, double>& resolved) {
  if (!e.symbolic()) return e.value;
  auto it = resolved.find(e.label);
  if (it == resolved.end() || !std::isfinite(it->second))
    fail(ErrorCode::invalid_parameter, "pump '" + e.label + "' could not be resolved for this model");
  return it->second;
}

int truncation_for(const RunConfig& cfg, const ModelParams& p) {
  return cfg.numerics.n_max > 0 ? cfg.numerics.n_max : choose_truncation(p);
}

void run_meanfield(JobContext& ctx) {
  const ModelParams& m = ctx.cfg.model;
  CsvWriter table(ctx.file("meanfield.csv"), "eps,branch,n,re_alpha,im_alpha,stable");
  for (double eps : ctx.cfg.eps) {
    const MeanFieldResult r = mf_steady_states(eps, m);
    for (std::size_t b = 0; b < r.n.size(); ++b)
      table.row({eps, double(b), r.n[b], r.alpha[b].real(), r.alpha[b].imag(), r.stable[b] ? 1.0 : 0.0});
  }
  table.close();
  try {
    const BistabilityEdges e = bistability_edges(m);
    CsvWriter edges(ctx.file("edges.csv"), "eps_lo,eps_hi,n_at_lo,n_at_hi");
    edges.row({e.eps_lo, e.eps_hi, e.n_at_lo, e.n_at_hi});
    edges.close();
    ctx.metric("eps_lo", e.eps_lo);
    ctx.metric("eps_hi", e.eps_hi);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::no_bistability) throw;
    ctx.metric("bistable", 0.0);
  }
}

void run_ness_sweep(JobContext& ctx, const JobSpec& job) {
  const RunConfig& cfg = ctx.cfg;
  std::string header = "eps,re_a,im_a,abs_alpha,n,residual,fock_dim";
  if (cfg.entropy) header += ",s_q,pi_j,pi_ext,pi_d,pi_u,phi";
  CsvWriter table(ctx.file("ness_" + job.id + ".csv"), header);
  double worst = 0.0, tail = 0.0;
  for (double eps : job.eps) {
    const ModelParams p = cfg.model.with_scale(job.N).with_epsilon(eps);
    const int d = truncation_for(cfg, p) + 1;
    const NessResult ness = solve_ness(build_liouvillian(p, d));
    ness.state.check();
    const Complex a = ness.state.mean_a();
    std::vector<double> row{eps, a.real(), a.imag(), std::abs(a) / std::sqrt(job.N), ness.state.mean_n(),
                            ness.residual, double(d)};
    if (cfg.entropy) {
      const EntropyRecord r = instantaneous_entropy(ness.state, p, cfg.numerics.grid);
      row.insert(row.end(), {r.s_q, r.pi_j, r.pi_ext, r.pi_d, r.pi_u, r.phi});
    }
    table.row(row);
    worst = std::max(worst, ness.residual);
    tail = std::max(tail, ness.state.tail_population());
  }
  table.close();
  ctx.metric("max_ness_residual", worst);
  ctx.metric("max_tail_population", tail);
}

void run_spectrum(JobContext& ctx, const JobSpec& job) {
  const ModelParams p = ctx.cfg.model.with_scale(job.N).with_epsilon(job.eps.front());
  const int d = truncation_for(ctx.cfg, p) + 1;
  const SpectrumResult s = spectrum(build_liouvillian(p, d), ctx.cfg.numerics.spectrum_count);
  CsvWriter table(ctx.file("spectrum_" + job.id + ".csv"), "index,re,im");
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
    table.row({double(i), s.eigenvalues[i].real(), s.eigenvalues[i].imag()});
  table.close();
  ctx.metric("gap", s.gap);
  ctx.metric("fock_dim", d);
}

void run_exact_moments(JobContext& ctx, const JobSpec& job) {
  const RunConfig& cfg = ctx.cfg;
  std::string header = "eps,n,m,re,im";
  if (cfg.compare) header += ",re_ness,im_ness,rel_diff";
  CsvWriter table(ctx.file("exact_" + job.id + ".csv"), header);
  double worst = 0.0;
  for (double eps : job.eps) {
    const ModelParams p = cfg.model.with_scale(job.N).with_epsilon(eps);
    std::optional<DensityMatrix> rho;
    if (cfg.compare) rho = solve_ness(build_liouvillian(p, truncation_for(cfg, p) + 1)).state;
    for (const auto& [n, m] : cfg.moments) {
      const Complex v = exact_moment(n, m, p);
      std::vector<double> row{eps, double(n), double(m), v.real(), v.imag()};
      if (rho) {
        const int d = rho->dim();
        CMatrix op = CMatrix::Identity(d, d);
        for (int k = 0; k < n; ++k) op = op * creation(d).matrix();
        for (int k = 0; k < m; ++k) op = op * annihilation(d).matrix();
        const Complex num = rho->expect(op);
        const double rel = std::abs(num - v) / std::max(std::abs(v), 1e-300);
        row.insert(row.end(), {num.real(), num.imag(), rel});
        worst = std::max(worst, rel);
      }
      table.row(row);
    }
  }
  table.close();
  if (cfg.compare) ctx.metric("max_rel_diff", worst);
}

void run_quench_job(JobContext& ctx, const JobSpec& job) {
  const RunConfig& cfg = ctx.cfg;
  QuenchSpec spec;
  spec.eps_i = cfg.eps_i;
  spec.eps_f = resolve_pump(job.eps_f, ctx.resolved);
  spec.N = job.N;
  spec.t_max = cfg.t_max;
  spec.dt_out = cfg.dt_out;
  spec.tol = cfg.numerics.tol;
  spec.n_max = cfg.numerics.n_max;
  spec.grid = cfg.numerics.grid;
  spec.phasespace = cfg.phasespace;
  spec.gaussianity = cfg.gaussianity;
  const Trajectory traj = run_quench(cfg.model, spec);
  emit_timeseries(traj, ctx.file("quench_" + job.id + ".csv").string());

  double balance = 0.0;
  for (const auto& pt : traj.points)
    if (pt.entropy) {
      const double scale = std::max({pt.entropy->pi_j, pt.entropy->phi, 1e-300});
      balance = std::max(balance, pt.entropy->balance_residual / scale);
    }
  ctx.metric("eps_f", spec.eps_f);
  ctx.metric("fock_dim", traj.fock_dim);
  ctx.metric("ness_residual", traj.ness_residual);
  ctx.metric("max_tail_population", traj.max_tail);
  ctx.metric("max_trace_drift", traj.propagation.max_trace_drift);
  ctx.metric("krylov_substeps", traj.propagation.substeps);
  if (cfg.phasespace) {
    ctx.metric("max_grid_norm_error", traj.max_norm_error);
    ctx.metric("max_relative_balance_residual", balance);
  }
}

void run_validate(JobContext& ctx) {
  const std::vector<ValidationCheck> checks = validation_suite(ctx.cfg.model);
  std::ofstream out(ctx.file("validate.csv"), std::ios::binary);
  out << "check,value,tolerance,pass\n";
  std::string failed;
  for (const auto& c : checks) {
    std::string line = c.name;
    put(line, c.value);
    put(line, c.tolerance);
    out << line << ',' << (c.pass ? 1 : 0) << '\n';
    if (!c.pass) failed += (failed.empty() ? "" : ", ") + c.name;
  }
  out.close();
  if (!out) fail(ErrorCode::io, "write to validate.csv failed");
  ctx.metric("checks", double(checks.size()));
  if (!failed.empty()) fail(ErrorCode::internal, "invariant checks failed: " + failed);
}

void execute(JobContext& ctx, const JobSpec& job) {
  switch (ctx.cfg.experiment) {
    case Experiment::meanfield: return run_meanfield(ctx);
    case Experiment::ness_sweep: return run_ness_sweep(ctx, job);
    case Experiment::spectrum: return run_spectrum(ctx, job);
    case Experiment::exact_moments: return run_exact_moments(ctx, job);
    case Experiment::quench: return run_quench_job(ctx, job);
    case Experiment::validate: return run_validate(ctx);
  }
}

std::map<std::string, double> resolve_symbols(const RunConfig& cfg) {
  std::map<std::string, double> out;
  for (const auto& e : cfg.eps_f) {
    if (!e.symbolic() || out.count(e.label)) continue;
    double v = std::nan("");
    try {
      if (e.label == "eps_plus") v = bistability_edges(cfg.model).eps_hi;
      if (e.label == "eps_c") v = critical_pump(cfg.model, cfg.numerics.eps_c_scale);
    } catch (const Error&) {
      // jobs that need the value report the failure themselves
    }
    out[e.label] = v;
  }
  return out;
}

}  // namespace

std::array<double, 14> timeseries_row(const TrajectoryPoint& pt) {
  const double nan = std::nan("");
  const EntropyRecord* r = pt.entropy ? &*pt.entropy : nullptr;
  return {pt.t, pt.alpha.real(), pt.alpha.imag(), pt.n, pt.flux.phi, pt.flux.phi_ext, pt.flux.phi_q,
          r ? r->pi_j : nan, r ? r->pi_ext : nan, r ? r->pi_d : nan, r ? r->pi_u : nan, r ? r->s_q : nan,
          pt.gaussianity ? pt.gaussianity->value : nan, r ? r->balance_residual : nan};
}

void emit_timeseries(const Trajectory& traj, const std::string& path) {
  CsvWriter out(path, kTimeseriesHeader);
  for (const auto& pt : traj.points) {
    const auto row = timeseries_row(pt);
    out.row(std::vector<double>(row.begin(), row.end()));
  }
  out.close();
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot read '" + path + "'");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    fail(ErrorCode::internal, "SHA-256 initialisation failed");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  return hex(md, len);
}

int RunManifest::failed() const {
  return static_cast<int>(std::count_if(jobs.begin(), jobs.end(), [](const JobRecord& j) { return !j.ok; }));
}

std::string RunManifest::to_json() const {
  using nlohmann::json;
  json doc;
  doc["version"] = version;
  doc["experiment"] = experiment;
  doc["config"] = config_echo.empty() ? json::object() : json::parse(config_echo);
  doc["resolved"] = json::object();
  for (const auto& [k, v] : resolved) doc["resolved"][k] = std::isfinite(v) ? json(v) : json(nullptr);
  doc["seconds"] = seconds;
  doc["failed"] = failed();
  json jobs_json = json::array();
  for (const auto& j : jobs) {
    json jj;
    jj["id"] = j.id;
    jj["status"] = j.ok ? "ok" : "failed";
    if (!j.ok) {
      jj["error"] = j.error_code;
      jj["reason"] = j.reason;
    }
    jj["seconds"] = j.seconds;
    jj["files"] = json::array();
    for (const auto& f : j.files) jj["files"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    jj["metrics"] = json::object();
    for (const auto& [k, v] : j.metrics) jj["metrics"][k] = std::isfinite(v) ? json(v) : json(nullptr);
    jobs_json.push_back(std::move(jj));
  }
  doc["jobs"] = std::move(jobs_json);
  return doc.dump(2) + "\n";
}

RunManifest run(const RunConfig& config) {
  const auto t0 = Clock::now();
  const fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create output directory '" + dir.string() + "': " + ec.message());

  RunManifest manifest;
  manifest.version = KERRSIM_VERSION;
  manifest.experiment = std::string(experiment_name(config.experiment));
  manifest.config_echo = config.echo;
  manifest.resolved = resolve_symbols(config);
  manifest.jobs.resize(config.job_list.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < config.job_list.size(); i = next++) {
      const JobSpec& job = config.job_list[i];
      JobRecord& rec = manifest.jobs[i];
      rec.id = job.id;
      JobContext ctx{config, dir, manifest.resolved, rec};
      const auto start = Clock::now();
      try {
        execute(ctx, job);
        rec.ok = true;
      } catch (const Error& e) {
        rec.error_code = to_string(e.code());
        rec.reason = e.what();
      } catch (const std::exception& e) {
        rec.error_code = to_string(ErrorCode::internal);
        rec.reason = e.what();
      }
      rec.seconds = seconds_since(start);
      for (auto& f : rec.files) {
        const fs::path full = dir / f.path;
        if (!fs::exists(full)) continue;
        f.sha256 = sha256_file(full.string());
        f.bytes = static_cast<long>(fs::file_size(full));
      }
      std::erase_if(rec.files, [](const FileRecord& f) { return f.sha256.empty(); });
    }
  };

  const int threads = std::clamp(config.jobs, 1, std::max<int>(1, static_cast<int>(config.job_list.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  manifest.seconds = seconds_since(t0);
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  out << manifest.to_json();
  out.close();
  if (!out) fail(ErrorCode::io, "cannot write manifest in '" + dir.string() + "'");
  return manifest;
}

}  // namespace kerrsim
