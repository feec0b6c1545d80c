// snl: command-line front end for sweeps, single solves, spurious-point
// certification and the property validators.
//
// Exit codes: 0 ok, 1 verification failure, 2 invalid input, 3 I/O error.

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "snl/experiment.hpp"
#include "snl/landscape.hpp"
#include "snl/theory.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kInvalidInput = 2;
constexpr int kIoError = 3;

int cmd_sweep(const std::string& config, const std::string& out) {
  const snl::SweepSpec spec = snl::load_sweep_spec(config);
  const auto records = snl::sweep(spec, out);
  std::cout << snl::format_summary(spec, snl::summarize(spec, records));
  std::cout << "wrote " << records.size() << " records to " << out << "\n";
  return kOk;
}

int cmd_solve(snl::Index n, snl::Index dg, snl::Index k, double density, std::uint64_t seed, double variance,
              double time_limit, bool no_polish) {
  snl::SweepSpec spec;
  spec.experiment_id = "solve";
  spec.n = n;
  spec.dg = dg;
  spec.k_values = {k};
  spec.densities = {density};
  spec.base_seed = seed;
  spec.noise_variance = variance;
  spec.trial_time_limit_seconds = time_limit;
  spec.polish = !no_polish;
  spec.record_runtime = true;
  spec.validate();
  const snl::TrialRecord rec = snl::run_trial(spec, 0, 0);
  std::cout << snl::format_record(rec);
  return kOk;
}

int cmd_counterexample(const std::string& name, bool verify) {
  const snl::Preset p = snl::preset(name);
  const auto& rc = p.construction;
  const snl::Objective obj = snl::Objective::complete(rc.y);
  const snl::CriticalityReport rep = snl::certify(rc.z, obj);
  std::cout << "preset: " << p.name << "\n"
            << "n: " << rc.y.n() << "\n"
            << "dg: " << rc.y.k() << "\n"
            << "cost: " << snl::format_double(obj.cost(rc.z.points())) << "\n"
            << "alpha: " << snl::format_double(rc.alpha) << "\n"
            << "condition_margin: " << snl::format_double(rc.condition_margin) << "\n"
            << "condition: " << snl::to_string(rc.condition) << "\n"
            << snl::format_report(rep) << "claimed: " << snl::to_string(p.claimed) << "\n";
  if (verify) {
    const bool ok = rep.verdict == p.claimed;
    std::cout << (ok ? "VERIFIED" : "MISMATCH") << "\n";
    return ok ? kOk : kVerifyFailed;
  }
  return kOk;
}

bool emit(const snl::PropertyReport& r) {
  std::cout << snl::format_report(r) << "\n";
  return r.pass;
}

snl::PropertyReport report(const std::string& id, double violation, double tol, const std::string& note = "") {
  snl::PropertyReport r;
  r.id = id;
  r.trials = 1;
  r.max_violation = violation;
  r.tolerance = tol;
  r.pass = violation <= tol;
  r.margin = std::nan("");
  r.note = note;
  return r;
}

int cmd_check_properties(snl::Index n, int trials, std::uint64_t seed, const std::string& set) {
  if (trials < 1) {
    throw snl::InvalidInput("--trials must be >= 1");
  }
  const bool all = set.empty();
  if (!all && set != "P" && set != "Q" && set != "rip" && set != "cute" && set != "certificates") {
    throw snl::InvalidInput("--set must be one of P, Q, cute, rip, certificates");
  }
  bool ok = true;
  if (all || set == "P") {
    for (const auto& r : snl::check_P1_to_P5(n, trials, seed)) {
      ok = emit(r) && ok;
    }
  }
  if (all || set == "Q") {
    const snl::Index m = n * (n - 1);
    const snl::AltSensingMap map = snl::make_alt_map(n, m, seed);
    for (const auto& r : snl::check_Q4_Q5(map, trials, seed)) {
      ok = emit(r) && ok;
    }
  }
  if (all || set == "rip") {
    const snl::RipBound b = snl::rip_lower_bound(n);
    const double nd = static_cast<double>(n);
    ok = emit(report("rip-bound", std::abs(b.bound - (1.0 - 4.0 / (nd + 2.0))), 1e-14)) && ok;
    ok = emit(report("rip-witness-scaled", std::abs(b.quotient_scaled - nd / 2.0), 1e-10)) && ok;
    ok = emit(report("rip-witness-hollow", std::abs(b.quotient_hollow - 1.0), 1e-10)) && ok;
  }
  if (all || set == "cute" || set == "certificates") {
    const snl::Preset p = snl::planar7();
    const auto& rc = p.construction;
    if (all || set == "cute") {
      const snl::Objective obj = snl::Objective::complete(rc.y);
      ok = emit(snl::check_lemma_cute(rc.z, obj, trials, seed)) && ok;
    }
    if (all || set == "certificates") {
      const snl::CertificateMatrices cm = snl::certificate_matrices(rc.z, rc.y);
      ok = emit(report("C-negsemidef", std::max(0.0, cm.c_max_eig), 1e-10, "planar7")) && ok;
      ok = emit(report("CZ", cm.cz_norm, 1e-9, "planar7")) && ok;
      ok = emit(report("traceP", std::max(0.0, cm.trace_p - cm.trace_s), 1e-9, "planar7")) && ok;
    }
  }
  return ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensor network localization landscape toolkit"};
  app.require_subcommand(1);

  std::string config, out;
  auto* sweep = app.add_subcommand("sweep", "run a rank-relaxation sweep from a JSON config");
  sweep->add_option("--config", config, "sweep config (JSON)")->required();
  sweep->add_option("--out", out, "output CSV path")->required();

  snl::Index n = 10, dg = 2, k = 2;
  double density = 1.0, variance = 0.0, time_limit = 60.0;
  std::uint64_t seed = 0;
  bool no_polish = false;
  auto* solve = app.add_subcommand("solve", "run one trial and print its record");
  solve->add_option("--n", n, "number of points")->required();
  solve->add_option("--dg", dg, "ground-truth dimension")->required();
  solve->add_option("--k", k, "optimization dimension")->required();
  solve->add_option("--density", density, "edge probability")->required();
  solve->add_option("--seed", seed, "base seed")->required();
  solve->add_option("--noise-variance", variance, "variance of the distance noise");
  solve->add_option("--time-limit", time_limit, "wall-clock cap in seconds");
  solve->add_flag("--no-polish", no_polish, "skip the rank-reduction refinement");

  std::string name;
  bool verify = false;
  auto* counter = app.add_subcommand("counterexample", "build and certify a spurious configuration");
  counter->add_option("preset", name, "planar7, simplex<dg>, mixed7-<dg>")->required();
  counter->add_flag("--verify", verify, "exit 1 unless the verdict matches the claim");

  snl::Index pn = 5;
  int trials = 100;
  std::uint64_t pseed = 0;
  std::string set;
  auto* props = app.add_subcommand("check-properties", "run the operator and landscape validators");
  props->add_option("--n", pn, "matrix size")->required();
  props->add_option("--trials", trials, "samples per report")->required();
  props->add_option("--seed", pseed, "seed")->required();
  props->add_option("--set", set, "P, Q, cute, rip or certificates (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalidInput;
  }

  try {
    if (*sweep) return cmd_sweep(config, out);
    if (*solve) return cmd_solve(n, dg, k, density, seed, variance, time_limit, no_polish);
    if (*counter) return cmd_counterexample(name, verify);
    if (*props) return cmd_check_properties(pn, trials, pseed, set);
  } catch (const snl::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const snl::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const snl::UnsupportedSize& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const snl::PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return kVerifyFailed;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kVerifyFailed;
  }
  return kOk;
}
