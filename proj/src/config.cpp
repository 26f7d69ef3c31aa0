#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "kerrsim/error.hpp"
#include "kerrsim/runner.hpp"

namespace kerrsim {

using nlohmann::json;

namespace {

constexpr std::pair<Experiment, std::string_view> kNames[] = {
    {Experiment::ness_sweep, "ness-sweep"}, {Experiment::spectrum, "spectrum"},
    {Experiment::meanfield, "meanfield"},   {Experiment::exact_moments, "exact-moments"},
    {Experiment::quench, "quench"},         {Experiment::validate, "validate"},
};

std::string id_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Collects every problem in the document before failing, so one run
// reports all of them.
class Problems {
 public:
  void add(const std::string& where, const std::string& what) { items_.push_back(where + ": " + what); }
  bool empty() const { return items_.empty(); }
  [[noreturn]] void raise() const {
    std::ostringstream os;
    os << "invalid configuration";
    for (const auto& s : items_) os << "\n  " << s;
    throw Error(ErrorCode::config, os.str());
  }

 private:
  std::vector<std::string> items_;
};

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed,
                Problems& problems) {
  std::vector<std::string> unknown;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool found = false;
    for (auto a : allowed) found = found || it.key() == a;
    if (!found) unknown.push_back(it.key());
  }
  if (unknown.empty()) return;
  std::string list;
  for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
  problems.add(where, "unknown keys: " + list);
}

std::optional<double> get_number(const json& obj, const char* key, const std::string& where, Problems& problems) {
  if (!obj.contains(key)) return std::nullopt;
  const json& v = obj.at(key);
  if (!v.is_number()) {
    problems.add(where + "." + key, "expected a number");
    return std::nullopt;
  }
  return v.get<double>();
}

std::optional<bool> get_bool(const json& obj, const char* key, const std::string& where, Problems& problems) {
  if (!obj.contains(key)) return std::nullopt;
  if (!obj.at(key).is_boolean()) {
    problems.add(where + "." + key, "expected true or false");
    return std::nullopt;
  }
  return obj.at(key).get<bool>();
}

// Accepts a number, an array of numbers or an inclusive {start, stop, step} range.
std::vector<double> number_list(const json& v, const std::string& where, Problems& problems) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number()) {
        problems.add(where, "list entries must be numbers");
        return {};
      }
      out.push_back(x.get<double>());
    }
  } else if (v.is_object()) {
    check_keys(v, where, {"start", "stop", "step"}, problems);
    if (!v.contains("start") || !v.contains("stop") || !v.contains("step") || !v["start"].is_number() ||
        !v["stop"].is_number() || !v["step"].is_number()) {
      problems.add(where, "a range needs numeric start, stop and step");
      return {};
    }
    const double a = v["start"], b = v["stop"], h = v["step"];
    if (!(h > 0.0) || b < a) {
      problems.add(where, "a range needs step > 0 and stop >= start");
      return {};
    }
    const long count = static_cast<long>(std::floor((b - a) / h + 1e-9)) + 1;
    if (count > 100000) {
      problems.add(where, "range has more than 100000 entries");
      return {};
    }
    for (long i = 0; i < count; ++i) out.push_back(std::round((a + static_cast<double>(i) * h) * 1e12) / 1e12);
  } else {
    problems.add(where, "expected a number, a list or a range");
  }
  if (out.empty() && !v.is_object()) problems.add(where, "list is empty");
  return out;
}

std::vector<PumpSpec> pump_list(const json& v, const std::string& where, Problems& problems) {
  std::vector<PumpSpec> out;
  auto one = [&](const json& x) {
    if (x.is_number()) {
      out.push_back({x.get<double>(), {}});
    } else if (x.is_string() && (x == "eps_c" || x == "eps_plus")) {
      out.push_back({std::nan(""), x.get<std::string>()});
    } else {
      problems.add(where, "entries must be numbers, \"eps_c\" or \"eps_plus\"");
    }
  };
  if (v.is_array()) {
    for (const auto& x : v) one(x);
    if (v.empty()) problems.add(where, "list is empty");
  } else {
    one(v);
  }
  return out;
}

void require_all(const std::vector<double>& xs, bool (*ok)(double), const std::string& where, const char* msg,
                 Problems& problems) {
  for (double x : xs) {
    if (!ok(x)) {
      problems.add(where, msg);
      return;
    }
  }
}

bool nonneg(double x) { return std::isfinite(x) && x >= 0.0; }
bool at_least_one(double x) { return std::isfinite(x) && x >= 1.0; }

void parse_experiment(const json& block, RunConfig& cfg, const std::string& where, Problems& problems) {
  if (!block.is_object()) {
    problems.add(where, "expected an object");
    return;
  }
  auto eps_from = [&](const char* key, bool required) {
    if (block.contains(key)) {
      cfg.eps = number_list(block[key], where + "." + key, problems);
      require_all(cfg.eps, nonneg, where + "." + key, "pump amplitudes must be >= 0", problems);
    } else if (required) {
      problems.add(where, std::string("missing '") + key + "'");
    }
  };
  auto n_from = [&]() {
    if (!block.contains("N")) return;
    cfg.N = number_list(block["N"], where + ".N", problems);
    require_all(cfg.N, at_least_one, where + ".N", "N must be >= 1", problems);
  };

  switch (cfg.experiment) {
    case Experiment::ness_sweep:
      check_keys(block, where, {"eps", "N", "entropy"}, problems);
      eps_from("eps", true);
      n_from();
      if (auto b = get_bool(block, "entropy", where, problems)) cfg.entropy = *b;
      break;
    case Experiment::spectrum:
      check_keys(block, where, {"eps", "N", "count"}, problems);
      eps_from("eps", true);
      n_from();
      if (auto k = get_number(block, "count", where, problems)) {
        if (*k < 1 || *k != std::floor(*k)) problems.add(where + ".count", "must be a positive integer");
        cfg.numerics.spectrum_count = static_cast<int>(*k);
      }
      break;
    case Experiment::meanfield:
      check_keys(block, where, {"eps"}, problems);
      eps_from("eps", false);
      if (cfg.eps.empty()) cfg.eps = number_list(json{{"start", 0.0}, {"stop", 1.5}, {"step", 0.01}}, where, problems);
      break;
    case Experiment::exact_moments:
      check_keys(block, where, {"eps", "N", "moments", "compare"}, problems);
      eps_from("eps", true);
      n_from();
      if (auto b = get_bool(block, "compare", where, problems)) cfg.compare = *b;
      if (block.contains("moments")) {
        cfg.moments.clear();
        const json& m = block["moments"];
        bool good = m.is_array() && !m.empty();
        for (const auto& pair : m) {
          good = good && pair.is_array() && pair.size() == 2 && pair[0].is_number_integer() &&
                 pair[1].is_number_integer() && pair[0].get<int>() >= 0 && pair[1].get<int>() >= 0;
          if (good) cfg.moments.emplace_back(pair[0].get<int>(), pair[1].get<int>());
        }
        if (!good) problems.add(where + ".moments", "expected a list of [n, m] pairs of nonnegative integers");
      }
      break;
    case Experiment::quench:
      check_keys(block, where, {"eps_i", "eps_f", "N", "t_max", "dt_out", "phasespace", "gaussianity"}, problems);
      if (auto v = get_number(block, "eps_i", where, problems)) cfg.eps_i = *v;
      if (!(cfg.eps_i >= 0.0)) problems.add(where + ".eps_i", "must be >= 0");
      if (block.contains("eps_f")) {
        cfg.eps_f = pump_list(block["eps_f"], where + ".eps_f", problems);
        for (const auto& e : cfg.eps_f)
          if (!e.symbolic() && !(e.value >= 0.0)) problems.add(where + ".eps_f", "pump amplitudes must be >= 0");
      } else {
        problems.add(where, "missing 'eps_f'");
      }
      n_from();
      if (auto v = get_number(block, "t_max", where, problems)) cfg.t_max = *v;
      if (auto v = get_number(block, "dt_out", where, problems)) cfg.dt_out = *v;
      if (!(cfg.t_max > 0.0)) problems.add(where + ".t_max", "must be > 0");
      if (!(cfg.dt_out > 0.0 && cfg.dt_out <= cfg.t_max)) problems.add(where + ".dt_out", "need 0 < dt_out <= t_max");
      if (auto b = get_bool(block, "phasespace", where, problems)) cfg.phasespace = *b;
      if (auto b = get_bool(block, "gaussianity", where, problems)) cfg.gaussianity = *b;
      break;
    case Experiment::validate:
      check_keys(block, where, {}, problems);
      break;
  }
}

void expand_jobs(RunConfig& cfg) {
  cfg.job_list.clear();
  switch (cfg.experiment) {
    case Experiment::meanfield:
    case Experiment::validate:
      cfg.job_list.push_back({std::string(experiment_name(cfg.experiment)), cfg.eps, {}, 1.0});
      break;
    case Experiment::ness_sweep:
    case Experiment::exact_moments:
      for (double N : cfg.N) cfg.job_list.push_back({"N" + id_number(N), cfg.eps, {}, N});
      break;
    case Experiment::spectrum:
      for (double N : cfg.N)
        for (double e : cfg.eps) cfg.job_list.push_back({"eps" + id_number(e) + "_N" + id_number(N), {e}, {}, N});
      break;
    case Experiment::quench:
      for (const auto& ef : cfg.eps_f)
        for (double N : cfg.N) {
          const std::string tag = ef.symbolic() ? ef.label : id_number(ef.value);
          cfg.job_list.push_back({"epsf" + tag + "_N" + id_number(N), {}, ef, N});
        }
      break;
  }
  std::set<std::string> seen;
  for (const auto& j : cfg.job_list)
    if (!seen.insert(j.id).second) fail(ErrorCode::config, "duplicate job '" + j.id + "' (repeated list entries?)");
}

}  // namespace

std::string_view experiment_name(Experiment e) {
  for (const auto& [k, name] : kNames)
    if (k == e) return name;
  return "unknown";
}

std::optional<Experiment> experiment_from_name(std::string_view name) {
  for (const auto& [k, n] : kNames)
    if (n == name) return k;
  return std::nullopt;
}

RunConfig parse_config(std::string_view text, std::string_view subcommand) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::config, std::string("malformed configuration: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::config, "configuration must be a JSON object");

  Problems problems;
  RunConfig cfg;
  check_keys(doc, "config", {"model", "experiment", "numerics", "output"}, problems);

  if (doc.contains("model")) {
    const json& m = doc["model"];
    if (!m.is_object()) {
      problems.add("model", "expected an object");
    } else {
      check_keys(m, "model", {"delta", "kappa", "u"}, problems);
      if (auto v = get_number(m, "delta", "model", problems)) cfg.model.delta = *v;
      if (auto v = get_number(m, "kappa", "model", problems)) cfg.model.kappa = *v;
      if (auto v = get_number(m, "u", "model", problems)) cfg.model.u = *v;
      if (!std::isfinite(cfg.model.delta)) problems.add("model.delta", "must be finite");
      if (!(cfg.model.kappa > 0.0) || !std::isfinite(cfg.model.kappa)) problems.add("model.kappa", "must be > 0");
      if (!(cfg.model.u >= 0.0) || !std::isfinite(cfg.model.u)) problems.add("model.u", "must be >= 0");
    }
  }

  if (doc.contains("numerics")) {
    const json& n = doc["numerics"];
    if (!n.is_object()) {
      problems.add("numerics", "expected an object");
    } else {
      check_keys(n, "numerics",
                 {"tol", "grid_spacing", "norm_tolerance", "max_grid_points", "n_max", "eps_c_scale"}, problems);
      auto& num = cfg.numerics;
      if (auto v = get_number(n, "tol", "numerics", problems)) num.tol = *v;
      if (auto v = get_number(n, "grid_spacing", "numerics", problems)) num.grid.spacing = *v;
      if (auto v = get_number(n, "norm_tolerance", "numerics", problems)) num.grid.norm_tolerance = *v;
      if (auto v = get_number(n, "max_grid_points", "numerics", problems)) num.grid.max_points = static_cast<long>(*v);
      if (auto v = get_number(n, "n_max", "numerics", problems)) num.n_max = static_cast<int>(*v);
      if (auto v = get_number(n, "eps_c_scale", "numerics", problems)) num.eps_c_scale = *v;
      if (!(num.tol > 0.0 && num.tol < 1.0)) problems.add("numerics.tol", "must lie in (0, 1)");
      if (!(num.grid.spacing > 0.0)) problems.add("numerics.grid_spacing", "must be > 0");
      if (!(num.grid.norm_tolerance > 0.0)) problems.add("numerics.norm_tolerance", "must be > 0");
      if (num.grid.max_points < 1) problems.add("numerics.max_grid_points", "must be >= 1");
      if (num.n_max < 0) problems.add("numerics.n_max", "must be >= 0");
      if (!(num.eps_c_scale >= 1.0)) problems.add("numerics.eps_c_scale", "must be >= 1");
    }
  }

  if (doc.contains("output")) {
    const json& o = doc["output"];
    if (!o.is_object()) {
      problems.add("output", "expected an object");
    } else {
      check_keys(o, "output", {"dir", "jobs"}, problems);
      if (o.contains("dir")) {
        if (o["dir"].is_string() && !o["dir"].get<std::string>().empty())
          cfg.out_dir = o["dir"].get<std::string>();
        else
          problems.add("output.dir", "expected a non-empty string");
      }
      if (auto v = get_number(o, "jobs", "output", problems)) {
        if (*v < 1 || *v != std::floor(*v)) problems.add("output.jobs", "must be a positive integer");
        cfg.jobs = static_cast<int>(*v);
      }
    }
  }

  const json* experiments = doc.contains("experiment") ? &doc["experiment"] : nullptr;
  if (experiments && !experiments->is_object()) {
    problems.add("experiment", "expected an object");
    problems.raise();
  }
  if (!experiments || experiments->empty()) fail(ErrorCode::config, "no experiment specified");

  std::vector<std::string> unknown;
  for (auto it = experiments->begin(); it != experiments->end(); ++it)
    if (!experiment_from_name(it.key())) unknown.push_back(it.key());
  if (!unknown.empty()) {
    std::string list;
    for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
    problems.add("experiment", "unknown keys: " + list);
  }

  std::string chosen;
  if (!subcommand.empty()) {
    if (!experiment_from_name(subcommand)) fail(ErrorCode::config, "unknown subcommand '" + std::string(subcommand) + "'");
    chosen = subcommand;
    if (!experiments->contains(chosen)) problems.add("experiment", "no '" + chosen + "' block for this subcommand");
  } else if (experiments->size() == 1) {
    chosen = experiments->begin().key();
  } else {
    problems.add("experiment", "several experiments given; choose one with a subcommand");
  }

  if (auto e = experiment_from_name(chosen); e && experiments->contains(chosen)) {
    cfg.experiment = *e;
    parse_experiment((*experiments)[chosen], cfg, "experiment." + chosen, problems);
  }
  if (!problems.empty()) problems.raise();

  // Every parameter set the run will touch must satisfy the model invariants.
  std::vector<double> pumps = cfg.eps;
  for (const auto& e : cfg.eps_f)
    if (!e.symbolic()) pumps.push_back(e.value);
  if (cfg.experiment == Experiment::quench) pumps.push_back(cfg.eps_i);
  for (double N : cfg.N)
    for (double e : pumps) {
      try {
        cfg.model.with_scale(N).with_epsilon(e).validate();
      } catch (const Error& err) {
        problems.add("experiment", err.what());
      }
    }
  if (!problems.empty()) problems.raise();

  cfg.echo = doc.dump(2);
  expand_jobs(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path, std::string_view subcommand) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open configuration '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), subcommand);
}

}  // namespace kerrsim
