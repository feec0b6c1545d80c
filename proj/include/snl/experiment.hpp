#pragma once

// Random instances, Erdos-Renyi measurement graphs, single trials, the noisy
// proxy protocol, and parallel sweeps with deterministic CSV output.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "snl/common.hpp"
#include "snl/configuration.hpp"
#include "snl/objective.hpp"
#include "snl/trust_region.hpp"

namespace snl {

enum class SuccessMode { recovery, cost };

std::string to_string(SuccessMode m);
SuccessMode parse_success_mode(const std::string& s);

struct SweepSpec {
  std::string experiment_id = "sweep";
  Index n = 10;
  Index dg = 2;
  std::vector<Index> k_values{2};
  std::vector<double> densities{1.0};
  int trials_per_cell = 1;
  std::uint64_t base_seed = 0;
  double noise_variance = 0.0;
  SuccessMode success_mode = SuccessMode::recovery;
  double cost_tol = 1e-10;              // absolute, noiseless cost success
  double recovery_tol = 1e-10;          // times sqrt(n dg)
  double noisy_cost_factor = 1e-10;     // success if g(Z) <= (1 + factor) g(proxy)
  double trial_time_limit_seconds = 60.0;
  bool polish = true;                   // rank-reduction refinement when k > dg
  double polish_max_ratio = 1e-3;       // only when sigma_{dg+1} / sigma_1 of centered Z is below this
  bool record_runtime = false;          // runtime_ms is 0 unless set
  SolverOptions solver = default_solver();

  static SolverOptions default_solver();
  /// Throws InvalidInput.
  void validate() const;
  std::size_t num_cells() const { return k_values.size() * densities.size(); }
};

/// JSON document with exactly the SweepSpec fields (solver as a nested object).
/// Unknown keys and type mismatches raise InvalidInput.
SweepSpec parse_sweep_spec(const std::string& json_text);
SweepSpec load_sweep_spec(const std::string& path);
std::string to_json(const SweepSpec& spec);

struct TrialRecord {
  std::string experiment_id;
  Index n = 0;
  Index dg = 0;
  Index k = 0;
  double density = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  bool connected = false;
  double final_cost = 0.0;
  double grad_norm = 0.0;
  bool recovery_success = false;
  bool cost_success = false;
  double proxy_cost = 0.0;
  double runtime_ms = 0.0;
  // Not part of the CSV.
  std::size_t cell_index = 0;
  std::string status;
  double alignment_distance = 0.0;
};

inline constexpr const char* kCsvHeader =
    "experiment_id,n,dg,k,density,trial,seed,connected,final_cost,grad_norm,recovery_success,cost_success,"
    "proxy_cost,runtime_ms";

std::string format_double(double v);
std::string csv_row(const TrialRecord& r);
std::string format_record(const TrialRecord& r);

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t cell_index, std::uint64_t trial_index);

/// n x dg standard Gaussian points.
Configuration sample_ground_truth(Index n, Index dg, std::uint64_t seed);

struct RandomGraph {
  Index n = 0;
  std::vector<std::pair<Index, Index>> edges;  // i < j, lexicographic
  bool connected = false;
};

RandomGraph sample_er_graph(Index n, double p, std::uint64_t seed);
/// Breadth-first traversal from vertex 0; n <= 1 counts as connected.
bool is_connected(Index n, const std::vector<std::pair<Index, Index>>& edges);

/// Squared distances of y on the given edges, plus N(0, variance) noise drawn
/// per edge in order when variance > 0.
MeasurementGraph measure(const Configuration& y, const std::vector<std::pair<Index, Index>>& edges,
                         double noise_variance, std::uint64_t noise_seed);

/// sigma_{d+1} / sigma_1 of the centered configuration (0 when rank <= d).
double trailing_ratio(const Matrix& z, Index d);

/// One trial; never throws for solver failures (they show up in `status`).
TrialRecord run_trial(const SweepSpec& spec, std::size_t cell_index, int trial_index);

struct ProxyResult {
  Configuration proxy;
  double cost = 0.0;
  bool valid = false;
};

/// Minimizes the corrupted instance from Z0 = Y in dimension dg.
ProxyResult compute_proxy(const Configuration& y, const Objective& objective, const SolverOptions& opts);

/// All trials of a noisy spec, each scored against its own proxy. A spec with
/// variance 0 is scored by the noiseless path.
std::vector<TrialRecord> run_noisy_protocol(const SweepSpec& spec);

struct CellSummary {
  Index k = 0;
  double density = 0.0;
  int trials = 0;
  double success_rate = 0.0;
  double recovery_rate = 0.0;
  double cost_rate = 0.0;
  double connectivity_rate = 0.0;
};

std::vector<CellSummary> summarize(const SweepSpec& spec, const std::vector<TrialRecord>& records);
std::string format_summary(const SweepSpec& spec, const std::vector<CellSummary>& cells);

/// Thread count used by sweeps: SNL_THREADS if set (>= 1), else the hardware concurrency.
unsigned worker_count();

/// Runs every trial (in parallel), sorted by (cell, trial).
std::vector<TrialRecord> run_sweep(const SweepSpec& spec);

void write_csv(std::ostream& os, const std::vector<TrialRecord>& records);

/// Checks that `csv_path` is writable before computing, then runs, writes and
/// summarizes. Throws IoError on unwritable output.
std::vector<TrialRecord> sweep(const SweepSpec& spec, const std::string& csv_path);

}  // namespace snl
