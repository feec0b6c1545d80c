// One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.
// Criterion names given as arguments restrict the run to those.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "snl/edm.hpp"
#include "snl/experiment.hpp"
#include "snl/landscape.hpp"
#include "snl/random.hpp"
#include "snl/theory.hpp"

using namespace snl;

namespace {

using clock_type = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
    }
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;
std::vector<std::string> selected;  // empty: run everything

void criterion(const std::string& name, double time_budget, const std::function<void(Outcome&)>& body) {
  if (!selected.empty() && std::find(selected.begin(), selected.end(), name) == selected.end()) {
    return;
  }
  const auto t0 = clock_type::now();
  Outcome out;
  try {
    body(out);
  } catch (const std::exception& e) {
    out.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
  if (time_budget > 0.0) {
    out.require(secs < time_budget, "runtime " + fmt("%.2f", secs) + " s < " + fmt("%.0f", time_budget) + " s");
  }
  std::printf("%s %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", name.c_str(), secs);
  for (const auto& d : out.details) {
    std::printf("    %s\n", d.c_str());
  }
  std::fflush(stdout);
  failures += out.pass ? 0 : 1;
}

// Runs body(i) for i in [0, count) on worker_count() threads.
void parallel_for(int count, const std::function<void(int)>& body) {
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      body(i);
    }
  };
  const unsigned threads = std::min<unsigned>(worker_count(), static_cast<unsigned>(count));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) {
    pool.emplace_back(work);
  }
  work();
  for (auto& t : pool) {
    t.join();
  }
}

// Random-init solves on complete noiseless instances; returns the worst final cost.
double worst_random_init_cost(Index n, Index dg, Index k, int runs, std::uint64_t seed, const SolverOptions& opts,
                              int& converged) {
  std::vector<double> cost(static_cast<std::size_t>(runs));
  std::vector<int> ok(static_cast<std::size_t>(runs));
  parallel_for(runs, [&](int r) {
    const std::uint64_t s = mix(seed, static_cast<std::uint64_t>(r));
    const Configuration y = sample_ground_truth(n, dg, mix(s, 0));
    Rng rng(mix(s, 3));
    const Matrix z0 = gaussian_matrix(n, k, rng);
    const SolveResult res = minimize(Configuration(z0), Objective::complete(y), opts);
    cost[static_cast<std::size_t>(r)] = res.final_cost;
    ok[static_cast<std::size_t>(r)] = res.status == SolveStatus::converged;
  });
  converged = 0;
  double worst = 0.0;
  for (int r = 0; r < runs; ++r) {
    worst = std::max(worst, cost[static_cast<std::size_t>(r)]);
    converged += ok[static_cast<std::size_t>(r)];
  }
  return worst;
}

std::string csv_of(const std::vector<TrialRecord>& rs) {
  std::ostringstream os;
  write_csv(os, rs);
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  selected.assign(argv + 1, argv + argc);
  std::printf("acceptance: %u worker thread(s)\n", worker_count());

  criterion("operator-calculus", 5.0, [](Outcome& o) {
    for (Index n = 4; n <= 10; ++n) {
      const Matrix m = operator_matrix(n, [](const Matrix& x) { return kernel::delta_star_delta_centered(x); });
      const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly)
                            .eigenvalues();
      const double nd = static_cast<double>(n);
      const double targets[3] = {1.0, nd / 2.0, nd};
      const Index expected[3] = {n * (n - 3) / 2, n - 1, 1};
      Index count[3] = {0, 0, 0};
      double worst = 0.0;
      for (Index i = 0; i < ev.size(); ++i) {
        int best = 0;
        for (int t = 1; t < 3; ++t) {
          if (std::abs(ev(i) - targets[t]) < std::abs(ev(i) - targets[best])) {
            best = t;
          }
        }
        worst = std::max(worst, std::abs(ev(i) - targets[best]));
        ++count[best];
      }
      const bool mult = count[0] == expected[0] && count[1] == expected[1] && count[2] == expected[2];
      o.require(mult && worst <= 1e-9, "n=" + std::to_string(n) + " spectrum {1, n/2, n} multiplicities " +
                                           std::to_string(count[0]) + "/" + std::to_string(count[1]) + "/" +
                                           std::to_string(count[2]) + ", max deviation " + fmt("%.2e", worst));
      Rng rng(mix(1, static_cast<std::uint64_t>(n)));
      const Matrix x = random_centered_symmetric(n, rng);
      const CenteredSymmetric cx(x);
      const double e1 = (delta_star_delta_inv(delta_star_delta(cx)).matrix() - x).norm() / x.norm();
      const double e2 = (delta_star_delta(delta_star_delta_inv(cx)).matrix() - x).norm() / x.norm();
      o.require(std::max(e1, e2) <= 1e-12, "n=" + std::to_string(n) + " inverse composition error " +
                                               fmt("%.2e", std::max(e1, e2)));
    }
  });

  criterion("property-suite", 0.0, [](Outcome& o) {
    for (Index n : {5, 10, 20}) {
      for (const auto& r : check_P1_to_P5(n, 1000, 2024)) {
        const double tol = r.id == "P5" ? 1e-11 : 1e-10;
        o.require(r.pass && r.trials == 1000 && r.max_violation <= tol && r.tolerance <= tol,
                  "n=" + std::to_string(n) + " " + r.id + " max violation " + fmt("%.2e", r.max_violation) +
                      " (tol " + fmt("%.0e", tol) + ")");
      }
    }
  });

  criterion("rip-failure", 0.0, [](Outcome& o) {
    for (Index n : {4, 6, 100}) {
      const RipBound b = rip_lower_bound(n);
      const double nd = static_cast<double>(n);
      const double err = std::abs(b.bound - (1.0 - 4.0 / (nd + 2.0)));
      o.require(err <= 4.0 * std::numeric_limits<double>::epsilon(),
                "n=" + std::to_string(n) + " bound " + fmt("%.17g", b.bound) + " vs 1-4/(n+2), error " +
                    fmt("%.1e", err));
      o.require(std::abs(b.quotient_scaled - nd / 2.0) <= 1e-10 && std::abs(b.quotient_hollow - 1.0) <= 1e-10,
                "n=" + std::to_string(n) + " witnesses " + fmt("%.12g", b.quotient_scaled) + ", " +
                    fmt("%.12g", b.quotient_hollow));
    }
  });

  criterion("counterexample-certificates", 0.0, [](Outcome& o) {
    const std::vector<std::pair<std::string, Verdict>> cases = {
        {"planar7", Verdict::strict_2_critical},
        {"simplex5", Verdict::strict_2_critical},
        {"simplex4", Verdict::non_strict_2_critical},
        {"mixed7-3", Verdict::strict_2_critical},
        {"mixed7-4", Verdict::strict_2_critical}};
    for (const auto& [name, want] : cases) {
      const auto t0 = clock_type::now();
      const Preset p = preset(name);
      const CriticalityReport r = certify(p.construction.z, Objective::complete(p.construction.y));
      const double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
      std::string line = name + " n=" + std::to_string(p.construction.y.n()) + " verdict " + to_string(r.verdict) +
                         ", grad " + fmt("%.1e", r.grad_norm) + ", kernel " +
                         std::to_string(r.observed_kernel_dim) + ", " + fmt("%.3f", secs) + " s";
      bool ok = r.verdict == want && secs < 2.0;
      if (name == "planar7") {
        ok = ok && r.grad_norm <= 1e-12 * r.scale && r.observed_kernel_dim == 3;
      }
      o.require(ok, line);
    }
    o.require(preset("simplex5").construction.y.n() == 7 && preset("simplex4").construction.y.n() == 6,
              "simplex sizes n = dg + 2");
  });

  criterion("spurious-point-certificates", 0.0, [](Outcome& o) {
    const Preset p = planar7();
    const CertificateMatrices cm = certificate_matrices(p.construction.z, p.construction.y);
    o.require(cm.c_max_eig <= 1e-10, "lambda_max(C) = " + fmt("%.2e", cm.c_max_eig));
    o.require(cm.cz_norm <= 1e-9, "||C Z|| = " + fmt("%.2e", cm.cz_norm));
    o.require(cm.trace_p <= cm.trace_s + 1e-9,
              "tr P = " + fmt("%.6g", cm.trace_p) + " <= tr S = " + fmt("%.6g", cm.trace_s));
  });

  criterion("rank-n-minus-1", 120.0, [](Outcome& o) {
    int converged = 0;
    const double worst = worst_random_init_cost(10, 2, 9, 50, 910, SolverOptions{}, converged);
    o.require(worst <= 1e-10, "50 runs n=10 k=9, worst cost " + fmt("%.2e", worst) + ", converged " +
                                  std::to_string(converged) + "/50");
  });

  criterion("sqrt-n-regime", 0.0, [](Outcome& o) {
    const Index k = sqrtn_threshold(2, 30);
    o.require(k == 11, "sqrtn_threshold(2, 30) = " + std::to_string(k));
    int converged = 0;
    const double worst = worst_random_init_cost(30, 2, k, 50, 3011, SolverOptions{}, converged);
    o.require(worst <= 1e-10, "50 runs n=30 k=" + std::to_string(k) + ", worst cost " + fmt("%.2e", worst) +
                                  ", converged " + std::to_string(converged) + "/50");
  });

  criterion("gaussian-regime", 0.0, [](Outcome& o) {
    const int instances = 100, solves = 20;
    const Index n = 200;
    SolverOptions opts;
    opts.tcg_theta = 0.5;
    std::vector<Index> ks(instances);
    std::vector<int> cond_ok(instances);
    std::vector<double> worst(instances, 0.0);
    parallel_for(instances, [&](int i) {
      const std::uint64_t s = mix(5200, static_cast<std::uint64_t>(i));
      const Configuration y = sample_ground_truth(n, 2, s);
      const auto k = smallest_gaussian_k(y);
      if (!k) {
        ks[static_cast<std::size_t>(i)] = 0;
        cond_ok[static_cast<std::size_t>(i)] = 0;
        worst[static_cast<std::size_t>(i)] = std::numeric_limits<double>::infinity();
        return;
      }
      ks[static_cast<std::size_t>(i)] = *k;
      cond_ok[static_cast<std::size_t>(i)] =
          gaussian_condition(y, *k).holds && (*k == 1 || !gaussian_condition(y, *k - 1).holds);
      const Objective obj = Objective::complete(y);
      for (int j = 0; j < solves; ++j) {
        Rng rng(mix(s, 3, static_cast<std::uint64_t>(j)));
        const SolveResult r = minimize(Configuration(gaussian_matrix(n, *k, rng)), obj, opts);
        worst[static_cast<std::size_t>(i)] = std::max(worst[static_cast<std::size_t>(i)], r.final_cost);
      }
    });
    int good_cond = 0, good_inst = 0;
    double overall = 0.0;
    Index kmin = std::numeric_limits<Index>::max(), kmax = 0;
    for (int i = 0; i < instances; ++i) {
      good_cond += cond_ok[static_cast<std::size_t>(i)];
      good_inst += worst[static_cast<std::size_t>(i)] <= 1e-10 ? 1 : 0;
      overall = std::max(overall, worst[static_cast<std::size_t>(i)]);
      kmin = std::min(kmin, ks[static_cast<std::size_t>(i)]);
      kmax = std::max(kmax, ks[static_cast<std::size_t>(i)]);
    }
    o.require(good_cond == instances, "condition holds at the smallest k and fails below it: " +
                                          std::to_string(good_cond) + "/100 (k in [" + std::to_string(kmin) + ", " +
                                          std::to_string(kmax) + "])");
    o.require(good_inst == instances, "instances with all 20 solves at cost <= 1e-10: " + std::to_string(good_inst) +
                                          "/100, worst cost " + fmt("%.2e", overall) + " (tcg_theta 0.5)");
  });

  criterion("figure4-desk-reproduction", 1800.0, [](Outcome& o) {
    for (Index dg : {1, 2}) {
      SweepSpec s;
      s.experiment_id = "figure4_dg" + std::to_string(dg);
      s.n = 10;
      s.dg = dg;
      s.k_values = {dg, dg + 1};
      s.densities.clear();
      for (int d = 1; d <= 10; ++d) {
        s.densities.push_back(d / 10.0);
      }
      s.trials_per_cell = 100;
      s.base_seed = 42;
      const auto records = run_sweep(s);
      std::ofstream(s.experiment_id + ".csv") << csv_of(records);
      const auto cells = summarize(s, records);
      std::map<double, double> low, high;
      for (const auto& c : cells) {
        (c.k == dg ? low : high)[c.density] = c.success_rate;
      }
      std::string rates;
      for (const auto& [d, r] : low) {
        rates += fmt(" %.1f:", d) + fmt("%.2f", r) + "/" + fmt("%.2f", high[d]);
      }
      o.details.push_back("dg=" + std::to_string(dg) + " density:rate(k=dg)/rate(k=dg+1)" + rates);
      o.require(high[1.0] == 1.0, "(a) dg=" + std::to_string(dg) + " rate(k=dg+1) at density 1.0 = " +
                                       fmt("%.2f", high[1.0]));
      for (const auto& [d, r] : low) {
        o.require(high[d] >= r - 0.02 - 1e-12, "(b) dg=" + std::to_string(dg) + " density " + fmt("%.1f", d) +
                                                   ": " + fmt("%.2f", high[d]) + " >= " + fmt("%.2f", r) +
                                                   " - 0.02");
      }
    }
  });

  criterion("trapping-witness", 0.0, [](Outcome& o) {
    const Preset p = planar7();
    const Objective obj = Objective::complete(p.construction.y);
    const Matrix z = p.construction.z.points();
    int trapped = 0;
    double best_trapped = std::numeric_limits<double>::infinity();
    for (int r = 0; r < 100; ++r) {
      Rng rng(mix(7700, static_cast<std::uint64_t>(r)));
      const Matrix z0 = z + 1e-6 * gaussian_matrix(z.rows(), 2, rng);
      const SolveResult res = minimize(Configuration(z0), obj, {});
      if (res.final_cost > 1e-6) {
        ++trapped;
        best_trapped = std::min(best_trapped, res.final_cost);
      }
    }
    o.require(trapped >= 95, "k=2 perturbed starts ending above 1e-6: " + std::to_string(trapped) +
                                 "/100 (lowest trapped cost " + fmt("%.4g", best_trapped) + ")");
    const Matrix lifted = Configuration(z).padded(3).points();
    int escaped = 0;
    double worst = 0.0;
    for (int r = 0; r < 20; ++r) {
      Rng rng(mix(7701, static_cast<std::uint64_t>(r)));
      const Matrix z0 = lifted + 1e-6 * gaussian_matrix(z.rows(), 3, rng);
      const SolveResult res = minimize(Configuration(z0), obj, {});
      escaped += res.final_cost <= 1e-10 ? 1 : 0;
      worst = std::max(worst, res.final_cost);
    }
    o.require(escaped == 20, "k=3 lifted starts (perturbation 1e-6) reaching cost <= 1e-10: " +
                                 std::to_string(escaped) + "/20, worst " + fmt("%.2e", worst));
  });

  criterion("noise-protocol", 0.0, [](Outcome& o) {
    SweepSpec s;
    s.experiment_id = "noise";
    s.n = 10;
    s.dg = 2;
    s.k_values = {2};
    s.densities = {1.0};
    s.trials_per_cell = 20;
    s.base_seed = 1010;
    s.noise_variance = 0.1;
    s.success_mode = SuccessMode::cost;
    int positive = 0;
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& r : run_noisy_protocol(s)) {
      positive += r.proxy_cost > 0.0 && r.status != "proxy_failed" ? 1 : 0;
      smallest = std::min(smallest, r.proxy_cost);
    }
    o.require(positive == 20, "variance 0.1: proxy cost > 0 in " + std::to_string(positive) +
                                  "/20 (smallest " + fmt("%.4g", smallest) + ")");
    s.noise_variance = 0.0;
    const std::string noisy_path = csv_of(run_noisy_protocol(s));
    const std::string plain = csv_of(run_sweep(s));
    o.require(noisy_path == plain, "variance 0: noisy protocol CSV byte-identical to the noiseless sweep");
  });

  std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
