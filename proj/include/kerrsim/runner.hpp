#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kerrsim/dynamics.hpp"
#include "kerrsim/params.hpp"
#include "kerrsim/phasespace.hpp"

namespace kerrsim {

enum class Experiment { ness_sweep, spectrum, meanfield, exact_moments, quench, validate };

std::string_view experiment_name(Experiment e);
std::optional<Experiment> experiment_from_name(std::string_view name);

// A pump value that is either literal or resolved at run time
// ("eps_c" is the critical pump, "eps_plus" the upper bistability edge).
struct PumpSpec {
  double value = 0.0;
  std::string label;
  bool symbolic() const { return !label.empty(); }
};

struct NumericsConfig {
  double tol = 1e-8;            // Krylov propagation tolerance
  GridOptions grid{};
  int n_max = 0;                // 0: automatic truncation
  double eps_c_scale = 20.0;    // N at which "eps_c" is located
  int spectrum_count = 6;
};

struct JobSpec {
  std::string id;
  std::vector<double> eps;  // ness-sweep, exact-moments: whole list; spectrum: one value
  PumpSpec eps_f;           // quench only
  double N = 1.0;
};

struct RunConfig {
  ModelParams model{};
  Experiment experiment = Experiment::validate;
  std::vector<double> eps;
  std::vector<double> N{1.0};
  std::vector<PumpSpec> eps_f;
  double eps_i = 0.5;
  double t_max = 10.0;
  double dt_out = 0.2;
  bool phasespace = true;
  bool gaussianity = true;
  bool entropy = false;  // ness-sweep: add the entropy columns
  bool compare = false;  // exact-moments: add the numerical NESS columns
  std::vector<std::pair<int, int>> moments{{0, 1}, {1, 1}};
  NumericsConfig numerics{};
  std::string out_dir = "out";
  int jobs = 1;
  std::string echo;  // canonical JSON of the parsed document
  std::vector<JobSpec> job_list;
};

// Parses a JSON document with sections model, experiment, numerics, output.
// When `subcommand` is empty the experiment block must name exactly one experiment.
RunConfig parse_config(std::string_view text, std::string_view subcommand = {});
RunConfig load_config(const std::string& path, std::string_view subcommand = {});

struct FileRecord {
  std::string path;  // relative to the output directory
  std::string sha256;
  long bytes = 0;
};

struct JobRecord {
  std::string id;
  bool ok = false;
  std::string error_code;
  std::string reason;
  double seconds = 0.0;
  std::vector<FileRecord> files;
  std::map<std::string, double> metrics;
};

struct RunManifest {
  std::string version;
  std::string experiment;
  std::string config_echo;
  std::map<std::string, double> resolved;  // symbolic pumps
  std::vector<JobRecord> jobs;
  double seconds = 0.0;

  int failed() const;
  std::string to_json() const;
};

RunManifest run(const RunConfig& config);

inline constexpr const char* kTimeseriesHeader =
    "t,re_alpha,im_alpha,n,phi,phi_ext,phi_q,pi_j,pi_ext,pi_d,pi_u,s_q,g,residual";
// One CSV row in header order; quantities that were not computed are NaN.
std::array<double, 14> timeseries_row(const TrajectoryPoint& pt);
void emit_timeseries(const Trajectory& traj, const std::string& path);
std::string sha256_file(const std::string& path);

struct ValidationCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Invariant suite on small systems; cheap enough for routine use.
std::vector<ValidationCheck> validation_suite(const ModelParams& model);

}  // namespace kerrsim
