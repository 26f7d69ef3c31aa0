// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "kerrsim/dynamics.hpp"
#include "kerrsim/exactness.hpp"
#include "kerrsim/liouville.hpp"
#include "kerrsim/meanfield.hpp"
#include "kerrsim/operators.hpp"
#include "kerrsim/phasespace.hpp"
#include "oracles.hpp"

using namespace kerrsim;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void report(int id, const char* title, const std::function<Verdict()>& body) {
  const auto t0 = Clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!v.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str(), secs);
  std::fflush(stdout);
}

const ModelParams kModel{};  // delta = -2, kappa = 1/2, u = 1

Trajectory quench(double eps_f, double N, double t_max, bool phasespace) {
  QuenchSpec spec;
  spec.eps_i = 0.5;
  spec.eps_f = eps_f;
  spec.N = N;
  spec.t_max = t_max;
  spec.phasespace = phasespace;
  spec.gaussianity = true;
  return run_quench(kModel, spec);
}

// dS/dt from the sampled Wehrl entropy: central differences inside,
// second-order one-sided differences at both ends.
std::vector<double> entropy_rate(const Trajectory& tr) {
  const std::size_t n = tr.points.size();
  const double h = tr.dt_out;
  auto S = [&](std::size_t i) { return tr.points[i].entropy->s_q; };
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0)
      out[i] = (-3 * S(0) + 4 * S(1) - S(2)) / (2 * h);
    else if (i + 1 == n)
      out[i] = (3 * S(n - 1) - 4 * S(n - 2) + S(n - 3)) / (2 * h);
    else
      out[i] = (S(i + 1) - S(i - 1)) / (2 * h);
  }
  return out;
}

double max_g(const Trajectory& tr) {
  double g = 0.0;
  for (const auto& pt : tr.points) g = std::max(g, pt.gaussianity->value);
  return g;
}

// Last output time outside a 2% band around the final steady occupation;
// returns t_max when the trajectory never enters the band for good.
double settle_time(const Trajectory& tr, bool* settled) {
  const DensityMatrix ness = solve_ness(build_liouvillian(tr.final, tr.fock_dim)).state;
  const double target = ness.mean_n();
  double last_out = 0.0;
  for (const auto& pt : tr.points)
    if (std::abs(pt.n - target) > 0.02 * target) last_out = pt.t;
  *settled = last_out < tr.points.back().t;
  return last_out;
}

}  // namespace

int main() {
  std::printf("kerrsim acceptance suite, version %s\n", KERRSIM_VERSION);

  report(1, "bistability edges", [] {
    const BistabilityEdges e = bistability_edges(kModel);
    const bool ok = std::abs(e.eps_lo - 0.701373) <= 1e-5 && std::abs(e.eps_hi - 1.16616) <= 1e-5;
    return Verdict{ok, fmt("eps_lo=%.7f eps_hi=%.7f, targets 0.701373 / 1.16616 within 1e-5", e.eps_lo, e.eps_hi)};
  });

  double eps_c = std::nan("");
  report(2, "critical pump at N=20", [&] {
    eps_c = critical_pump(kModel, 20.0);
    return Verdict{std::abs(eps_c - 0.933) <= 0.02, fmt("eps_c=%.5f, target 0.933 +- 0.02", eps_c)};
  });

  report(3, "exact moments vs numerical steady state", [] {
    double worst = 0.0;
    for (double N : {1.0, 2.0, 5.0})
      for (double eps : {0.3, 0.5, 0.8}) {
        const ModelParams p = kModel.with_scale(N).with_epsilon(eps);
        const int d = choose_truncation(p) + 1;
        const oracle::Mat rho = solve_ness(build_liouvillian(p, d)).state.matrix();
        const oracle::Mat a = oracle::ladder(d);
        const Complex num_a = oracle::expect(rho, a);
        const Complex num_n = oracle::expect(rho, a.adjoint() * a);
        worst = std::max(worst, std::abs(exact_moment(0, 1, p) - num_a) / std::abs(num_a));
        worst = std::max(worst, std::abs(exact_moment(1, 1, p) - num_n) / std::abs(num_n));
      }
    return Verdict{worst <= 1e-6, fmt("max relative deviation %.2e over 9 points x 2 moments (tol 1e-6)", worst)};
  });

  report(4, "linear cavity analytics", [] {
    double worst_state = 0.0, worst_rate = 0.0, worst_pu = 0.0, worst_s = 0.0;
    for (double N : {1.0, 5.0})
      for (double eps : {0.5, 1.0}) {
        ModelParams p = kModel.with_scale(N).with_epsilon(eps);
        p.u = 0.0;
        const int d = choose_truncation(p) + 1;
        const DensityMatrix rho = solve_ness(build_liouvillian(p, d)).state;
        const Complex alpha = oracle::linear_amplitude(p.delta, p.kappa, p.pump());
        const oracle::Vec v = oracle::coherent(d, alpha);
        worst_state = std::max(worst_state, 1.0 - (v.adjoint() * rho.matrix() * v)(0, 0).real());
        const EntropyRecord r = instantaneous_entropy(rho, p);
        const double target = 2.0 * p.kappa * std::norm(alpha);
        worst_rate = std::max({worst_rate, std::abs(r.phi - target) / target, std::abs(r.pi_j - target) / target});
        worst_pu = std::max(worst_pu, std::abs(r.pi_u));
        worst_s = std::max(worst_s, std::abs(r.s_q - (1.0 + std::log(std::numbers::pi))));
      }
    const bool ok = worst_state <= 1e-6 && worst_rate <= 1e-3 && worst_pu <= 1e-3 && worst_s <= 1e-3;
    return Verdict{ok, fmt("1-fidelity %.1e, Phi/Pi_J rel %.1e, |Pi_U| %.1e, |S_Q-(1+ln pi)| %.1e (tol 1e-3)",
                           worst_state, worst_rate, worst_pu, worst_s)};
  });

  // Six quench panels at N=5 with the full phase-space pipeline.
  const double eps_plus = bistability_edges(kModel).eps_hi;
  const double ec = std::isfinite(eps_c) ? eps_c : critical_pump(kModel, 20.0);
  const std::vector<std::pair<std::string, double>> panels = {
      {"a", 0.6}, {"b", 0.8}, {"c", ec}, {"d", 1.1}, {"e", eps_plus}, {"f", 1.3}};
  std::map<std::string, Trajectory> runs;
  std::string panel_error;
  {
    const auto t0 = Clock::now();
    for (const auto& [name, ef] : panels) {
      try {
        runs.emplace(name, quench(ef, 5.0, 60.0, true));
      } catch (const std::exception& e) {
        panel_error += "panel " + name + ": " + e.what() + "; ";
      }
    }
    std::printf("   (six N=5 panels, t <= 60, computed in %.0fs)\n",
                std::chrono::duration<double>(Clock::now() - t0).count());
  }

  report(5, "entropy balance along quench (a), N=5", [&] {
    if (!runs.count("a")) return Verdict{false, panel_error};
    const Trajectory& tr = runs.at("a");
    const std::vector<double> dsdt = entropy_rate(tr);
    double worst = 0.0, worst_t = 0.0;
    for (std::size_t i = 0; i < tr.points.size(); ++i) {
      const EntropyRecord& r = *tr.points[i].entropy;
      const double ratio = std::abs(dsdt[i] - (r.pi_u + r.pi_j - r.phi)) / std::max(r.pi_j, r.phi);
      if (ratio > worst) {
        worst = ratio;
        worst_t = tr.points[i].t;
      }
    }
    return Verdict{worst <= 2e-2, fmt("max |dS/dt - (Pi_U+Pi_J-Phi)| / max(Pi_J,Phi) = %.2e at t=%.1f over %zu steps "
                                      "(tol 2e-2)", worst, worst_t, tr.points.size())};
  });

  report(6, "nonnegative production rates, six panels, N=5", [&] {
    if (runs.size() != panels.size()) return Verdict{false, panel_error};
    double min_j = 1e300, min_d = 1e300;
    std::size_t steps = 0;
    for (const auto& [name, tr] : runs)
      for (const auto& pt : tr.points) {
        min_j = std::min(min_j, pt.entropy->pi_j);
        min_d = std::min(min_d, pt.entropy->pi_d);
        ++steps;
      }
    return Verdict{min_j >= -1e-6 && min_d >= -1e-6,
                   fmt("min Pi_J %.3e, min Pi_d %.3e over %zu steps (tol -1e-6)", min_j, min_d, steps)};
  });

  report(7, "steady-state entropy balance, N=5", [] {
    double worst = 0.0;
    for (double eps : {0.5, 1.3}) {
      const ModelParams p = kModel.with_scale(5.0).with_epsilon(eps);
      const DensityMatrix rho = solve_ness(build_liouvillian(p, choose_truncation(p) + 1)).state;
      const EntropyRecord r = instantaneous_entropy(rho, p);
      worst = std::max(worst, std::abs(r.pi_u + r.pi_j - r.phi) / r.phi);
    }
    return Verdict{worst <= 1e-2, fmt("max |Pi_U+Pi_J-Phi|/Phi = %.2e (tol 1e-2)", worst)};
  });

  report(8, "Liouvillian gap phenomenology", [] {
    auto gap = [](double eps, double N) {
      const ModelParams p = kModel.with_scale(N).with_epsilon(eps);
      return spectrum(build_liouvillian(p, choose_truncation(p) + 1), 4).gap;
    };
    const double g95 = gap(0.9, 5.0), g35 = gap(0.3, 5.0), g92 = gap(0.9, 2.0);
    return Verdict{g95 < g35 && g95 < g92,
                   fmt("lambda(0.9,5)=%.5f, lambda(0.3,5)=%.5f, lambda(0.9,2)=%.5f", g95, g35, g92)};
  });

  // N=10 runs are shared by criteria 9 and 10.
  std::map<double, Trajectory> d_runs;
  report(9, "non-Gaussianity phenomenology", [&] {
    for (double N : {1.0, 5.0, 10.0}) d_runs.emplace(N, quench(1.1, N, 100.0, false));
    const double g1 = max_g(d_runs.at(1.0)), g5 = max_g(d_runs.at(5.0)), g10 = max_g(d_runs.at(10.0));
    double ga5 = runs.count("a") ? max_g(runs.at("a")) : std::nan("");
    const double ga10 = max_g(quench(0.6, 10.0, 60.0, false));
    const bool ok = g1 < g5 && g5 < g10 && ga5 < 0.15 && ga10 < 0.15;
    return Verdict{ok, fmt("quench (d) max G: N=1 %.4f, N=5 %.4f, N=10 %.4f; quench (a) max G: N=5 %.4f, N=10 %.4f "
                           "(bound 0.15)", g1, g5, g10, ga5, ga10)};
  });

  report(10, "relaxation contrast at N=10", [&] {
    if (!d_runs.count(10.0)) d_runs.emplace(10.0, quench(1.1, 10.0, 100.0, false));
    const Trajectory fast = quench(1.3, 10.0, 100.0, false);
    bool settled_slow = false, settled_fast = false;
    const double t_slow = settle_time(d_runs.at(10.0), &settled_slow);
    const double t_fast = settle_time(fast, &settled_fast);
    const bool ok = settled_fast && t_slow > t_fast;
    return Verdict{ok, fmt("2%% settle time: eps_f=1.1 %s%.1f, eps_f=1.3 %s%.1f", settled_slow ? "" : ">= ", t_slow,
                           settled_fast ? "" : ">= ", t_fast)};
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
