#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "kerrsim/error.hpp"
#include "kerrsim/runner.hpp"

using namespace kerrsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string* header = nullptr) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(row);
  }
  return rows;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::current_path() / "runner_scratch" / name;
  fs::remove_all(dir);
  return dir;
}

std::string config_error(const std::string& text, std::string_view sub = {}) {
  try {
    parse_config(text, sub);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
    return e.what();
  }
  FAIL("expected a configuration error");
  return {};
}

}  // namespace

TEST_CASE("quench block expands over N") {
  const RunConfig cfg = parse_config(R"({"experiment": {"quench": {"eps_f": 1.1, "N": [1, 5, 10], "t_max": 100}}})");
  CHECK(cfg.experiment == Experiment::quench);
  REQUIRE(cfg.job_list.size() == 3);
  CHECK(cfg.job_list[0].id == "epsf1.1_N1");
  CHECK(cfg.job_list[2].N == 10.0);
  CHECK(cfg.t_max == 100.0);
}

TEST_CASE("defaults follow the reference parameter set") {
  const RunConfig cfg = parse_config(R"({"experiment": {"quench": {"eps_f": 0.6}}})");
  CHECK(cfg.model.kappa == 0.5);
  CHECK(cfg.model.delta == -2.0);
  CHECK(cfg.model.u == 1.0);
  CHECK(cfg.eps_i == 0.5);
  CHECK(cfg.dt_out == 0.2);
}

TEST_CASE("configuration errors") {
  CHECK(config_error(R"({"experiment": {}})") == "no experiment specified");
  CHECK(config_error(R"({"model": {}})") == "no experiment specified");
  CHECK(config_error(R"({"model": {"kappa": -1}, "experiment": {"validate": {}}})").find("model.kappa: must be > 0") !=
        std::string::npos);
  const std::string unknown = config_error(R"({"model": {"kapa": 1, "detla": 2}, "experiment": {"validate": {}}})");
  CHECK(unknown.find("kapa") != std::string::npos);
  CHECK(unknown.find("detla") != std::string::npos);
  CHECK(config_error(R"({"experiment": {"quench": {"eps_f": "eps_x"}}})").find("eps_f") != std::string::npos);
  CHECK(config_error(R"({"experiment": {"quench": {"eps_f": 1, "N": 0.5}}})").find("N must be >= 1") !=
        std::string::npos);
  CHECK(config_error("{ not json").find("malformed") != std::string::npos);
  CHECK(config_error(R"({"experiment": {"validate": {}}})", "quench").find("no 'quench' block") != std::string::npos);
  CHECK(config_error(R"({"experiment": {"validate": {}, "meanfield": {}}})").find("several") != std::string::npos);
  // several problems are reported together
  const std::string many =
      config_error(R"({"model": {"kappa": 0, "u": -1}, "experiment": {"quench": {"eps_f": 1, "t_max": -2}}})");
  CHECK(many.find("model.kappa") != std::string::npos);
  CHECK(many.find("model.u") != std::string::npos);
  CHECK(many.find("t_max") != std::string::npos);
}

TEST_CASE("ranges, symbolic pumps and subcommand selection") {
  const RunConfig sweep = parse_config(
      R"({"experiment": {"ness-sweep": {"eps": {"start": 0.1, "stop": 1.4, "step": 0.02}, "N": 20}, "validate": {}}})",
      "ness-sweep");
  REQUIRE(sweep.eps.size() == 66);
  CHECK(sweep.eps.front() == 0.1);
  CHECK(sweep.eps.back() == 1.4);
  CHECK(sweep.eps[10] == 0.3);
  CHECK(sweep.job_list.size() == 1);

  const RunConfig q = parse_config(R"({"experiment": {"quench": {"eps_f": [0.6, "eps_c", "eps_plus"], "N": [1, 5]}}})");
  REQUIRE(q.job_list.size() == 6);
  CHECK(q.job_list[2].id == "epsfeps_c_N1");
  CHECK(q.job_list[2].eps_f.symbolic());
}

TEST_CASE("meanfield run writes the bistability table") {
  RunConfig cfg = parse_config(R"({"experiment": {"meanfield": {"eps": [0.5, 0.9, 1.3]}}})");
  cfg.out_dir = scratch("meanfield").string();
  const RunManifest m = run(cfg);
  REQUIRE(m.failed() == 0);
  const auto edges = read_csv(fs::path(cfg.out_dir) / "edges.csv");
  REQUIRE(edges.size() == 1);
  CHECK(std::abs(edges[0][0] - 0.701373) < 1e-5);
  CHECK(std::abs(edges[0][1] - 1.16616) < 1e-5);
  const auto branches = read_csv(fs::path(cfg.out_dir) / "meanfield.csv");
  CHECK(branches.size() == 5);  // one, three and one roots
}

TEST_CASE("time series header, precision and stationary trajectory") {
  RunConfig cfg =
      parse_config(R"({"experiment": {"quench": {"eps_i": 0.7, "eps_f": 0.7, "N": 1, "t_max": 1.0}}})");
  cfg.out_dir = scratch("stationary").string();
  const RunManifest m = run(cfg);
  REQUIRE(m.failed() == 0);
  std::string header;
  const auto rows = read_csv(fs::path(cfg.out_dir) / "quench_epsf0.7_N1.csv", &header);
  CHECK(header == "t,re_alpha,im_alpha,n,phi,phi_ext,phi_q,pi_j,pi_ext,pi_d,pi_u,s_q,g,residual");
  REQUIRE(rows.size() == 6);
  for (std::size_t c = 1; c < 13; ++c)
    for (const auto& r : rows) CHECK(r[c] == doctest::Approx(rows[0][c]).epsilon(1e-7));
  const std::string text = slurp(fs::path(cfg.out_dir) / "quench_epsf0.7_N1.csv");
  const std::string second = text.substr(text.find('\n') + 1);
  const std::string re_alpha = second.substr(second.find(',') + 1, second.find(',', second.find(',') + 1) - second.find(',') - 1);
  CHECK(std::strtod(re_alpha.c_str(), nullptr) == rows[0][1]);
  CHECK(re_alpha.find('.') != std::string::npos);
  CHECK(re_alpha.size() >= 17);
}

TEST_CASE("undriven vacuum has no entropy flux") {
  RunConfig cfg = parse_config(R"({"experiment": {"quench": {"eps_i": 0, "eps_f": 0, "N": 2, "t_max": 0.6}}})");
  cfg.out_dir = scratch("vacuum").string();
  REQUIRE(run(cfg).failed() == 0);
  for (const auto& r : read_csv(fs::path(cfg.out_dir) / "quench_epsf0_N2.csv")) CHECK(r[4] == 0.0);
}

TEST_CASE("reruns are byte-identical and the manifest checksums match") {
  const std::string text =
      R"({"experiment": {"quench": {"eps_f": [0.6, 1.3], "N": [1, 2], "t_max": 0.6}}, "output": {"jobs": 2}})";
  RunConfig a = parse_config(text);
  RunConfig b = parse_config(text);
  a.out_dir = scratch("det_a").string();
  b.out_dir = scratch("det_b").string();
  b.jobs = 1;
  const RunManifest ma = run(a);
  const RunManifest mb = run(b);
  REQUIRE(ma.failed() == 0);
  REQUIRE(ma.jobs.size() == 4);
  for (std::size_t j = 0; j < ma.jobs.size(); ++j) {
    REQUIRE(ma.jobs[j].files.size() == 1);
    const std::string& f = ma.jobs[j].files[0].path;
    CHECK(slurp(fs::path(a.out_dir) / f) == slurp(fs::path(b.out_dir) / f));
    CHECK(ma.jobs[j].files[0].sha256 == mb.jobs[j].files[0].sha256);
    CHECK(ma.jobs[j].files[0].sha256 == sha256_file((fs::path(a.out_dir) / f).string()));
    CHECK(ma.jobs[j].files[0].sha256.size() == 64);
  }
  const auto doc = nlohmann::json::parse(slurp(fs::path(a.out_dir) / "manifest.json"));
  CHECK(doc["failed"] == 0);
  CHECK(doc["jobs"].size() == 4);
  CHECK(doc["config"]["experiment"]["quench"]["t_max"] == 0.6);
  CHECK(doc["jobs"][0]["metrics"].contains("max_relative_balance_residual"));
}

TEST_CASE("known digest") {
  const fs::path p = scratch("digest") / "abc.txt";
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << "abc";
  CHECK(sha256_file(p.string()) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("job failures land in the manifest") {
  RunConfig cfg = parse_config(
      R"({"experiment": {"quench": {"eps_f": [0.6, 1.3], "N": 5, "t_max": 4}}, "numerics": {"n_max": 14}})");
  cfg.out_dir = scratch("failing").string();
  const RunManifest m = run(cfg);
  CHECK(m.failed() >= 1);
  bool saw_truncation = false;
  for (const auto& j : m.jobs)
    if (!j.ok) saw_truncation = saw_truncation || j.error_code == "truncation";
  CHECK(saw_truncation);
  const auto doc = nlohmann::json::parse(slurp(fs::path(cfg.out_dir) / "manifest.json"));
  CHECK(doc["failed"].get<int>() == m.failed());
}

TEST_CASE("symbolic pumps resolve in the manifest") {
  RunConfig cfg = parse_config(R"({"experiment": {"quench": {"eps_f": "eps_plus", "N": 1, "t_max": 0.4}}})");
  cfg.out_dir = scratch("symbolic").string();
  const RunManifest m = run(cfg);
  REQUIRE(m.failed() == 0);
  CHECK(std::abs(m.resolved.at("eps_plus") - 1.16616) < 1e-5);
  CHECK(m.jobs[0].metrics.at("eps_f") == m.resolved.at("eps_plus"));
}

TEST_CASE("validation suite passes for the reference model") {
  for (const auto& c : validation_suite(ModelParams{})) {
    INFO(c.name << " = " << c.value << " (tol " << c.tolerance << ")");
    CHECK(c.pass);
  }
}

TEST_CASE("exact-moments comparison columns") {
  RunConfig cfg = parse_config(
      R"({"experiment": {"exact-moments": {"eps": [0.3, 0.8], "N": [1, 2], "compare": true}}})");
  cfg.out_dir = scratch("exact").string();
  const RunManifest m = run(cfg);
  REQUIRE(m.failed() == 0);
  for (const auto& j : m.jobs) CHECK(j.metrics.at("max_rel_diff") < 1e-6);
}
