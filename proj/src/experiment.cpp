#include "snl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <queue>
#include <sstream>
#include <thread>
#include <tuple>

#include <Eigen/SVD>

#include "snl/edm.hpp"
#include "snl/landscape.hpp"
#include "snl/random.hpp"

namespace snl {

std::string to_string(SuccessMode m) { return m == SuccessMode::recovery ? "recovery" : "cost"; }

SuccessMode parse_success_mode(const std::string& s) {
  if (s == "recovery") {
    return SuccessMode::recovery;
  }
  if (s == "cost") {
    return SuccessMode::cost;
  }
  throw InvalidInput("success_mode must be 'recovery' or 'cost', got '" + s + "'");
}

SolverOptions SweepSpec::default_solver() { return SolverOptions{}; }

void SweepSpec::validate() const {
  if (experiment_id.empty() || experiment_id.find_first_of(",\"\n\r") != std::string::npos) {
    throw InvalidInput("experiment_id must be non-empty and free of commas, quotes and newlines");
  }
  if (n < 2 || dg < 1) {
    throw InvalidInput("need n >= 2 and dg >= 1");
  }
  if (k_values.empty() || densities.empty()) {
    throw InvalidInput("k_values and densities must be non-empty");
  }
  for (Index k : k_values) {
    if (k < dg) {
      throw InvalidInput("every k must satisfy k >= dg");
    }
  }
  for (double p : densities) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidInput("densities must lie in [0, 1]");
    }
  }
  if (trials_per_cell < 1) {
    throw InvalidInput("trials_per_cell must be >= 1");
  }
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw InvalidInput("noise_variance must be finite and nonnegative");
  }
  if (!(cost_tol > 0.0) || !(recovery_tol > 0.0) || !(noisy_cost_factor >= 0.0)) {
    throw InvalidInput("tolerances must be positive");
  }
  if (!(polish_max_ratio >= 0.0 && polish_max_ratio <= 1.0)) {
    throw InvalidInput("polish_max_ratio must lie in [0, 1]");
  }
  if (!(trial_time_limit_seconds >= 0.0)) {
    throw InvalidInput("trial_time_limit_seconds must be nonnegative");
  }
  solver.validate();
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_row(const TrialRecord& r) {
  std::ostringstream os;
  os << r.experiment_id << ',' << r.n << ',' << r.dg << ',' << r.k << ',' << format_double(r.density) << ','
     << r.trial << ',' << r.seed << ',' << (r.connected ? 1 : 0) << ',' << format_double(r.final_cost) << ','
     << format_double(r.grad_norm) << ',' << (r.recovery_success ? 1 : 0) << ',' << (r.cost_success ? 1 : 0)
     << ',' << format_double(r.proxy_cost) << ',' << format_double(r.runtime_ms);
  return os.str();
}

std::string format_record(const TrialRecord& r) {
  std::ostringstream os;
  os << "experiment_id: " << r.experiment_id << "\n"
     << "n: " << r.n << "\n"
     << "dg: " << r.dg << "\n"
     << "k: " << r.k << "\n"
     << "density: " << format_double(r.density) << "\n"
     << "trial: " << r.trial << "\n"
     << "seed: " << r.seed << "\n"
     << "connected: " << (r.connected ? 1 : 0) << "\n"
     << "status: " << r.status << "\n"
     << "final_cost: " << format_double(r.final_cost) << "\n"
     << "grad_norm: " << format_double(r.grad_norm) << "\n"
     << "alignment_distance: " << format_double(r.alignment_distance) << "\n"
     << "recovery_success: " << (r.recovery_success ? 1 : 0) << "\n"
     << "cost_success: " << (r.cost_success ? 1 : 0) << "\n"
     << "proxy_cost: " << format_double(r.proxy_cost) << "\n"
     << "runtime_ms: " << format_double(r.runtime_ms) << "\n";
  return os.str();
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t cell_index, std::uint64_t trial_index) {
  return mix(base_seed, cell_index, trial_index);
}

Configuration sample_ground_truth(Index n, Index dg, std::uint64_t seed) {
  if (n < 1 || dg < 1) {
    throw InvalidInput("sample_ground_truth needs n, dg >= 1");
  }
  Rng rng(seed);
  return Configuration(gaussian_matrix(n, dg, rng));
}

bool is_connected(Index n, const std::vector<std::pair<Index, Index>>& edges) {
  if (n <= 1) {
    return true;
  }
  std::vector<std::vector<Index>> adj(static_cast<std::size_t>(n));
  for (const auto& [i, j] : edges) {
    adj[static_cast<std::size_t>(i)].push_back(j);
    adj[static_cast<std::size_t>(j)].push_back(i);
  }
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::queue<Index> q;
  q.push(0);
  seen[0] = 1;
  Index reached = 1;
  while (!q.empty()) {
    const Index v = q.front();
    q.pop();
    for (Index w : adj[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        ++reached;
        q.push(w);
      }
    }
  }
  return reached == n;
}

RandomGraph sample_er_graph(Index n, double p, std::uint64_t seed) {
  if (n < 1) {
    throw InvalidInput("sample_er_graph needs n >= 1");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidInput("edge probability must lie in [0, 1]");
  }
  Rng rng(seed);
  std::bernoulli_distribution coin(p);
  RandomGraph g;
  g.n = n;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (coin(rng)) {
        g.edges.emplace_back(i, j);
      }
    }
  }
  g.connected = is_connected(n, g.edges);
  return g;
}

MeasurementGraph measure(const Configuration& y, const std::vector<std::pair<Index, Index>>& edges,
                         double noise_variance, std::uint64_t noise_seed) {
  MeasurementGraph exact = MeasurementGraph::from_pairs(edges, y);
  if (noise_variance <= 0.0) {
    return exact;
  }
  Rng rng(noise_seed);
  std::normal_distribution<double> noise(0.0, std::sqrt(noise_variance));
  std::vector<Edge> noisy = exact.edges();
  for (auto& e : noisy) {
    e.target += noise(rng);
  }
  return MeasurementGraph(y.n(), std::move(noisy));
}

ProxyResult compute_proxy(const Configuration& y, const Objective& objective, const SolverOptions& opts) {
  ProxyResult out;
  try {
    const SolveResult res = minimize(y.points(), make_problem(objective), opts);
    out.proxy = Configuration(res.z_final);
    out.cost = res.final_cost;
    out.valid = res.status == SolveStatus::converged;
  } catch (const NumericalFailure&) {
    out.valid = false;
  }
  return out;
}

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// Remaining budget for a follow-up solve; a non-positive limit means unlimited.
double remaining(double limit, clock_type::time_point t0) {
  if (limit <= 0.0) {
    return 0.0;
  }
  return std::max(1e-3, limit - seconds_since(t0));
}

}  // namespace

double trailing_ratio(const Matrix& z, Index d) {
  const Matrix zc = kernel::center_columns(z);
  const Vector sv = Eigen::JacobiSVD<Matrix>(zc).singularValues();
  if (sv.size() <= d || sv(0) == 0.0) {
    return 0.0;
  }
  return sv(d) / sv(0);
}

TrialRecord run_trial(const SweepSpec& spec, std::size_t cell_index, int trial_index) {
  if (cell_index >= spec.num_cells() || trial_index < 0) {
    throw InvalidInput("cell or trial index out of range");
  }
  const auto t0 = clock_type::now();
  const std::size_t nd = spec.densities.size();
  TrialRecord rec;
  rec.experiment_id = spec.experiment_id;
  rec.n = spec.n;
  rec.dg = spec.dg;
  rec.k = spec.k_values[cell_index / nd];
  rec.density = spec.densities[cell_index % nd];
  rec.trial = trial_index;
  rec.cell_index = cell_index;
  rec.seed = trial_seed(spec.base_seed, cell_index, static_cast<std::uint64_t>(trial_index));

  const Configuration y = sample_ground_truth(spec.n, spec.dg, mix(rec.seed, 0));
  const RandomGraph graph = sample_er_graph(spec.n, rec.density, mix(rec.seed, 1));
  rec.connected = graph.connected;
  const Objective objective =
      Objective::masked(measure(y, graph.edges, spec.noise_variance, mix(rec.seed, 2)), cost_scale(y));
  const Problem problem = make_problem(objective);

  SolverOptions opts = spec.solver;
  opts.time_limit_seconds = spec.trial_time_limit_seconds;

  Configuration reference = y;
  const bool noisy = spec.noise_variance > 0.0;
  if (noisy) {
    const ProxyResult proxy = compute_proxy(y, objective, opts);
    rec.proxy_cost = proxy.cost;
    if (!proxy.valid) {
      rec.status = "proxy_failed";
      rec.final_cost = proxy.cost;
      if (spec.record_runtime) {
        rec.runtime_ms = 1e3 * seconds_since(t0);
      }
      return rec;
    }
    reference = proxy.proxy;
  }

  Rng z_rng(mix(rec.seed, 3));
  const Matrix z0 = gaussian_matrix(spec.n, rec.k, z_rng);
  Matrix best;
  bool failed = false;
  try {
    opts.time_limit_seconds = remaining(spec.trial_time_limit_seconds, t0);
    const SolveResult res = minimize(z0, problem, opts);
    best = res.z_final;
    rec.final_cost = res.final_cost;
    rec.grad_norm = res.final_grad_norm;
    rec.status = res.time_limit_hit ? "stalled:time_limit" : to_string(res.status);
    failed = res.time_limit_hit;

    if (spec.polish && rec.k > spec.dg && !failed && trailing_ratio(best, spec.dg) <= spec.polish_max_ratio) {
      // The relaxed iterate is numerically of rank dg: drop the residual
      // directions and refine in dimension dg, where convergence is fast.
      // The padded result is an equally valid rank-k configuration.
      opts.time_limit_seconds = remaining(spec.trial_time_limit_seconds, t0);
      const SolveResult low = minimize(principal_projection(best, spec.dg), problem, opts);
      if (low.time_limit_hit) {
        failed = true;
        rec.status = "stalled:time_limit";
      } else if (low.final_cost < rec.final_cost) {
        best = Matrix::Zero(spec.n, rec.k);
        best.leftCols(spec.dg) = low.z_final;
        rec.final_cost = low.final_cost;
        rec.grad_norm = low.final_grad_norm;
        rec.status = to_string(low.status) + "+polished";
      }
    }
  } catch (const NumericalFailure& e) {
    failed = true;
    rec.status = "numerical_failure";
    best = e.last_iterate();
    rec.final_cost = objective.cost(best);
    rec.grad_norm = objective.gradient(best).norm();
  }

  rec.alignment_distance = align(Configuration(best), reference).distance;
  if (!failed) {
    const double recovery_threshold = spec.recovery_tol * std::sqrt(static_cast<double>(spec.n * spec.dg));
    rec.recovery_success = rec.alignment_distance <= recovery_threshold;
    rec.cost_success = noisy ? rec.final_cost <= (1.0 + spec.noisy_cost_factor) * rec.proxy_cost
                             : rec.final_cost <= spec.cost_tol;
  }
  if (spec.record_runtime) {
    rec.runtime_ms = 1e3 * seconds_since(t0);
  }
  return rec;
}

unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SNL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) {
      return static_cast<unsigned>(std::min<long>(v, 1024));
    }
    throw InvalidInput(std::string("SNL_THREADS must be a positive integer, got '") + env + "'");
  }
  return hw;
}

std::vector<TrialRecord> run_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<std::pair<std::size_t, int>> tasks;
  for (std::size_t c = 0; c < spec.num_cells(); ++c) {
    for (int t = 0; t < spec.trials_per_cell; ++t) {
      tasks.emplace_back(c, t);
    }
  }
  std::vector<TrialRecord> out(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) {
        return;
      }
      try {
        out[i] = run_trial(spec, tasks[i].first, tasks[i].second);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
        next.store(tasks.size());
      }
    }
  };
  const unsigned threads = std::min<unsigned>(worker_count(), static_cast<unsigned>(std::max<std::size_t>(1, tasks.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& th : pool) {
    th.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
  std::sort(out.begin(), out.end(), [](const TrialRecord& a, const TrialRecord& b) {
    return std::tie(a.cell_index, a.trial) < std::tie(b.cell_index, b.trial);
  });
  return out;
}

std::vector<TrialRecord> run_noisy_protocol(const SweepSpec& spec) { return run_sweep(spec); }

std::vector<CellSummary> summarize(const SweepSpec& spec, const std::vector<TrialRecord>& records) {
  const std::size_t nd = spec.densities.size();
  std::vector<CellSummary> cells(spec.num_cells());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    cells[c].k = spec.k_values[c / nd];
    cells[c].density = spec.densities[c % nd];
  }
  for (const auto& r : records) {
    if (r.cell_index >= cells.size()) {
      continue;
    }
    auto& cell = cells[r.cell_index];
    ++cell.trials;
    cell.recovery_rate += r.recovery_success ? 1.0 : 0.0;
    cell.cost_rate += r.cost_success ? 1.0 : 0.0;
    cell.connectivity_rate += r.connected ? 1.0 : 0.0;
  }
  for (auto& cell : cells) {
    if (cell.trials > 0) {
      const double t = static_cast<double>(cell.trials);
      cell.recovery_rate /= t;
      cell.cost_rate /= t;
      cell.connectivity_rate /= t;
    }
    cell.success_rate = spec.success_mode == SuccessMode::recovery ? cell.recovery_rate : cell.cost_rate;
  }
  return cells;
}

std::string format_summary(const SweepSpec& spec, const std::vector<CellSummary>& cells) {
  std::ostringstream os;
  os << "success mode: " << to_string(spec.success_mode) << "\n";
  os << std::setw(5) << "k" << std::setw(10) << "density" << std::setw(8) << "trials" << std::setw(10) << "success"
     << std::setw(10) << "recovery" << std::setw(8) << "cost" << std::setw(11) << "connected" << "\n";
  os << std::fixed << std::setprecision(3);
  for (const auto& c : cells) {
    os << std::setw(5) << c.k << std::setw(10) << c.density << std::setw(8) << c.trials << std::setw(10)
       << c.success_rate << std::setw(10) << c.recovery_rate << std::setw(8) << c.cost_rate << std::setw(11)
       << c.connectivity_rate << "\n";
  }
  return os.str();
}

void write_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  os << kCsvHeader << "\n";
  for (const auto& r : records) {
    os << csv_row(r) << "\n";
  }
}

std::vector<TrialRecord> sweep(const SweepSpec& spec, const std::string& csv_path) {
  spec.validate();
  std::ofstream out(csv_path, std::ios::out | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + csv_path + "' for writing");
  }
  std::vector<TrialRecord> records = run_sweep(spec);
  write_csv(out, records);
  out.flush();
  if (!out) {
    throw IoError("failed while writing '" + csv_path + "'");
  }
  return records;
}

}  // namespace snl
