#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gsphqc/analysis.hpp"
#include "gsphqc/errors.hpp"
#include "gsphqc/filter.hpp"
#include "gsphqc/graph.hpp"
#include "gsphqc/msd.hpp"
#include "gsphqc/noise.hpp"
#include "gsphqc/sampling.hpp"
#include "gsphqc/spectral.hpp"
#include "gsphqc/station_csv.hpp"

namespace gsphqc {

/// Where the graph nodes come from: a station CSV file or a seeded box of
/// random coordinates.
struct GraphSource {
  enum class Kind { synthetic, csv };
  Kind kind = Kind::synthetic;
  std::string csv_path;
  int node_count = 0;
  std::uint64_t seed = 0;
  double lat_lo = -25.0, lat_hi = -20.0;
  double lon_lo = -48.0, lon_hi = -43.0;
};

/// The clean reference signal: a seeded Gaussian vector or a dataset
/// snapshot. The tracked truth is always its bandlimited projection.
struct SignalSource {
  enum class Kind { synthetic, snapshot };
  Kind kind = Kind::synthetic;
  std::uint64_t seed = 0;
  double scale = 1.0;
  Eigen::Index snapshot_index = 0;
};

/// From `start` onward the step size is re-derived every iteration as
/// k_multiple times the mean-square stability bound evaluated at the
/// current error weights.
struct StepSwitch {
  long start = 0;
  double k_multiple = 1.0;
};

struct SweepGrid {
  std::vector<double> tau;
  std::vector<double> mu;
};

struct AnalysisRequest {
  double mu = 0.0;
  double tau = 0.0;
  double c_constant = 1.0;
};

struct OutputSpec {
  std::string directory = ".";
  std::string prefix = "run";
};

struct ExperimentConfig {
  int schema_version = 1;
  GraphSource graph;
  int k_nearest = 0;
  double theta_km = 0.0;
  SignalSource signal;
  Eigen::Index f_count = 0;
  Eigen::Index sample_count = 0;
  SamplingStrategy sampling_strategy = SamplingStrategy::random_seeded;
  std::uint64_t sampling_seed = 0;
  NoiseModel noise = PureGaussianParams{0.0};
  long iterations = 0;
  int trial_count = 0;
  int workers = 1;
  std::vector<AlgorithmSpec> algorithms;
  std::optional<ChangeSchedule> change_schedule;
  std::optional<StepSwitch> step_switch;
  std::optional<Eigen::VectorXd> initial_estimate;
  std::optional<SweepGrid> sweep;
  std::optional<AnalysisRequest> analysis;
  OutputSpec output;
};

/// Semantic validation that needs no file access.
inline void validate_config(const ExperimentConfig& c) {
  if (c.schema_version != 1) {
    throw ConfigError("unsupported schema_version " +
                      std::to_string(c.schema_version));
  }
  if (c.graph.kind == GraphSource::Kind::synthetic && c.graph.node_count < 2) {
    throw ConfigError("synthetic graph needs node_count >= 2");
  }
  if (c.graph.kind == GraphSource::Kind::csv && c.graph.csv_path.empty()) {
    throw ConfigError("csv graph source needs csv_path");
  }
  if (c.k_nearest < 1) throw ConfigError("k_nearest must be >= 1");
  if (!(c.theta_km > 0.0)) throw ConfigError("theta_km must be > 0");
  if (c.f_count < 1) throw ConfigError("f_count must be >= 1");
  if (c.sample_count < c.f_count) {
    throw ConfigError("sample_count must be >= f_count");
  }
  if (c.iterations < 1) throw ConfigError("iterations must be >= 1");
  if (c.trial_count < 1) throw ConfigError("trial_count must be >= 1");
  if (c.workers < 1) throw ConfigError("workers must be >= 1");
  if (c.algorithms.empty()) throw ConfigError("at least one algorithm required");
  std::set<std::string> labels;
  for (const auto& a : c.algorithms) {
    validate_spec(a);
    const std::string label = a.label.empty() ? kind_name(a.kind) : a.label;
    if (!labels.insert(label).second) {
      throw ConfigError("duplicate algorithm label: " + label);
    }
  }
  validate_noise(c.noise);
  if (c.change_schedule) {
    if (c.change_schedule->iteration < 0 ||
        c.change_schedule->iteration >= c.iterations) {
      throw ConfigError("change_schedule iteration out of range");
    }
  }
  if (c.step_switch) {
    if (c.step_switch->start < 0 || c.step_switch->start >= c.iterations) {
      throw ConfigError("step_switch start out of range");
    }
    if (c.step_switch->k_multiple < 0.0) {
      throw ConfigError("step_switch k_multiple must be >= 0");
    }
  }
  if (c.sweep && c.sweep->tau.empty() && c.sweep->mu.empty()) {
    throw ConfigError("sweep grids must not both be empty");
  }
}

inline std::string algorithm_label(const AlgorithmSpec& a) {
  return a.label.empty() ? kind_name(a.kind) : a.label;
}

/// Materialised scene shared by all subcommands: graph, basis restricted to
/// the selected frequencies, sampling set, and the bandlimited truth.
struct ExperimentSetup {
  Graph graph;
  SpectralBasis basis;
  SamplingSet sampling;
  GraphSignal x_true;
  std::optional<StationDataset> dataset;
};

inline ExperimentSetup build_setup(const ExperimentConfig& c,
                                   std::ostream* warnings = nullptr) {
  validate_config(c);
  ExperimentSetup setup;

  std::vector<GeoPoint> points;
  if (c.graph.kind == GraphSource::Kind::csv) {
    setup.dataset = load_station_csv(c.graph.csv_path, warnings);
    if (setup.dataset->station_count() < 2) {
      throw ConfigError("dataset has fewer than 2 usable stations");
    }
    points = setup.dataset->points();
  } else {
    points = random_geo_points(c.graph.node_count, c.graph.seed, c.graph.lat_lo,
                               c.graph.lat_hi, c.graph.lon_lo, c.graph.lon_hi);
  }
  setup.graph = build_knn_graph(points, c.k_nearest, c.theta_km);

  const Eigen::Index n = setup.graph.node_count();
  if (c.f_count > n) throw ConfigError("f_count exceeds node count");
  if (c.sample_count > n) throw ConfigError("sample_count exceeds node count");

  GraphSignal reference;
  if (c.signal.kind == SignalSource::Kind::snapshot) {
    if (!setup.dataset) {
      throw ConfigError("snapshot signal source requires a csv graph source");
    }
    reference = setup.dataset->snapshot(c.signal.snapshot_index);
  } else {
    RandomStream rng(c.signal.seed);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      v[i] = c.signal.scale * rng.gaussian();
    }
    reference = vertex_signal(std::move(v));
  }

  SpectralBasis full = spectral_decompose(setup.graph);
  setup.basis = select_frequency_set(full, reference, c.f_count);
  setup.sampling = build_sampling_set(setup.basis, c.sample_count,
                                      c.sampling_strategy, c.sampling_seed);
  setup.x_true = bandlimit_project(setup.basis, reference);
  return setup;
}

/// Per-iteration deviation statistics over the trial ensemble. Mean and
/// standard deviation are formed in the linear domain and only then
/// converted to dB; the lower band clamps to the floor when mean - std is
/// non-positive.
struct LearningCurve {
  std::vector<double> msd_mean_linear;
  std::vector<double> msd_std_linear;
  std::vector<double> msd_mean_db;
  std::vector<double> band_lower_db;
  std::vector<double> band_upper_db;

  std::size_t size() const { return msd_mean_linear.size(); }
};

/// Reduce per-trial traces (indexed [trial][iteration]) in trial order; the
/// result is independent of the schedule that produced the traces.
/// The standard deviation uses the (n - 1) divisor; a single trial reports 0.
inline LearningCurve aggregate_trials(
    const std::vector<std::vector<double>>& per_trial) {
  if (per_trial.empty()) throw InputError("aggregate_trials: no trials");
  const std::size_t iterations = per_trial.front().size();
  const auto n = static_cast<double>(per_trial.size());
  LearningCurve curve;
  curve.msd_mean_linear.resize(iterations);
  curve.msd_std_linear.resize(iterations);
  curve.msd_mean_db.resize(iterations);
  curve.band_lower_db.resize(iterations);
  curve.band_upper_db.resize(iterations);

  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < iterations; ++i) {
    double sum = 0.0;
    bool finite = true;
    for (const auto& trace : per_trial) {
      if (trace.size() != iterations) {
        throw InputError("aggregate_trials: ragged traces");
      }
      sum += trace[i];
      if (!std::isfinite(trace[i])) finite = false;
    }
    const double mean = sum / n;
    double sd = 0.0;
    if (!finite) {
      sd = inf;
    } else if (per_trial.size() > 1) {
      double acc = 0.0;
      for (const auto& trace : per_trial) {
        const double d = trace[i] - mean;
        acc += d * d;
      }
      sd = std::sqrt(acc / (n - 1.0));
    }
    curve.msd_mean_linear[i] = finite ? mean : inf;
    curve.msd_std_linear[i] = sd;
    curve.msd_mean_db[i] = finite ? to_db(mean) : inf;
    curve.band_lower_db[i] = finite ? to_db(mean - sd) : inf;
    curve.band_upper_db[i] = finite ? to_db(mean + sd) : inf;
  }
  return curve;
}

/// The truth active at `iteration` under an optional abrupt-change schedule.
inline GraphSignal apply_change_schedule(
    const GraphSignal& truth, long iteration,
    const std::optional<ChangeSchedule>& schedule) {
  if (!schedule || iteration < schedule->iteration) return truth;
  return vertex_signal(schedule->factor * truth.values);
}

namespace detail {

/// One seeded trial of one algorithm, honouring the change schedule and the
/// optional per-iteration step-size switch. Returns the linear deviation
/// trace.
inline std::vector<double> run_single_trial(const ExperimentSetup& setup,
                                            const ExperimentConfig& cfg,
                                            const AlgorithmSpec& spec,
                                            std::uint64_t seed) {
  const Eigen::Index n = setup.basis.node_count();
  GraphFilter filter(setup.basis, setup.sampling, spec);
  RandomStream rng(seed);

  FilterState state;
  if (cfg.initial_estimate) {
    if (cfg.initial_estimate->size() != n) {
      throw ConfigError("initial_estimate length mismatch");
    }
    state.estimate = setup.basis.basis_matrix *
                     (setup.basis.basis_matrix.transpose() *
                      (*cfg.initial_estimate));
  } else {
    state.estimate = Eigen::VectorXd::Zero(n);
  }

  std::vector<double> trace(static_cast<std::size_t>(cfg.iterations));
  const double inf = std::numeric_limits<double>::infinity();
  bool diverged = false;
  for (long i = 0; i < cfg.iterations; ++i) {
    const GraphSignal truth =
        apply_change_schedule(setup.x_true, i, cfg.change_schedule);
    const Eigen::VectorXd w = sample_noise(cfg.noise, n, rng);
    const Eigen::VectorXd observed = truth.values + w;

    if (!diverged) {
      if (cfg.step_switch && i >= cfg.step_switch->start) {
        const Eigen::VectorXd e = filter.masked_error(state, observed);
        const ErrorWeights weights = error_weights(e, spec);
        const WeightedOperator op =
            weighted_operator(setup.basis, setup.sampling, weights);
        const double lmax = op.lambda_max();
        if (!(lmax > 1e-300) || !std::isfinite(lmax)) {
          // Weights collapsed: the estimator has run away.
          diverged = true;
        } else {
          const double mu_i = cfg.step_switch->k_multiple / lmax;
          state = filter.step_with_mu(state, observed, mu_i);
        }
      } else {
        state = filter.step(state, observed);
      }
      if (!diverged && !state.estimate.allFinite()) diverged = true;
    }
    trace[static_cast<std::size_t>(i)] =
        diverged ? inf : msd_linear(state.estimate, truth.values);
  }
  return trace;
}

/// Execute all (algorithm, trial) pairs over a small worker pool. Trial r
/// uses seed r, 1-based; results are stored by index so the aggregate never
/// depends on scheduling.
inline std::map<std::string, LearningCurve> run_all(
    const ExperimentSetup& setup, const ExperimentConfig& cfg) {
  const std::size_t algo_count = cfg.algorithms.size();
  const auto trials = static_cast<std::size_t>(cfg.trial_count);
  std::vector<std::vector<std::vector<double>>> traces(algo_count);
  for (auto& t : traces) t.resize(trials);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;

  auto work = [&]() {
    for (std::size_t t; (t = next.fetch_add(1)) < trials;) {
      if (failed.load()) return;
      try {
        for (std::size_t a = 0; a < algo_count; ++a) {
          traces[a][t] = run_single_trial(setup, cfg, cfg.algorithms[a],
                                          static_cast<std::uint64_t>(t + 1));
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) error_message = e.what();
        return;
      }
    }
  };

  const auto workers = static_cast<std::size_t>(
      std::min<long>(cfg.workers, static_cast<long>(trials)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t i = 0; i + 1 < workers; ++i) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw NumericError("trial failed: " + error_message);

  std::map<std::string, LearningCurve> out;
  for (std::size_t a = 0; a < algo_count; ++a) {
    out[algorithm_label(cfg.algorithms[a])] = aggregate_trials(traces[a]);
  }
  return out;
}

}  // namespace detail

/// Seeded multi-trial learning curves, one per configured algorithm.
/// Trial r (1-based) seeds its noise stream with r; all algorithms see the
/// same noise within a trial. Deterministic for a given config, whatever
/// the worker count.
inline std::map<std::string, LearningCurve> run_trials(
    const ExperimentConfig& cfg, const ExperimentSetup& setup) {
  return detail::run_all(setup, cfg);
}

inline std::map<std::string, LearningCurve> run_trials(
    const ExperimentConfig& cfg) {
  const ExperimentSetup setup = build_setup(cfg);
  return run_trials(cfg, setup);
}

/// run_trials with a mandatory step_switch block (the step size is re-derived
/// from the current error weights once the switch engages).
inline std::map<std::string, LearningCurve> step_switch_run(
    const ExperimentConfig& cfg, const ExperimentSetup& setup) {
  if (!cfg.step_switch) throw ConfigError("step_switch block required");
  return detail::run_all(setup, cfg);
}

inline std::map<std::string, LearningCurve> step_switch_run(
    const ExperimentConfig& cfg) {
  const ExperimentSetup setup = build_setup(cfg);
  return step_switch_run(cfg, setup);
}

/// First iteration whose mean deviation drops below the threshold.
struct ThresholdCrossing {
  double threshold_db = 0.0;
  std::optional<long> first_iteration;
  std::string rule = "absolute";
};

inline ThresholdCrossing first_crossing(const LearningCurve& curve,
                                        double threshold_db) {
  ThresholdCrossing out;
  out.threshold_db = threshold_db;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve.msd_mean_db[i] < threshold_db) {
      out.first_iteration = static_cast<long>(i);
      break;
    }
  }
  return out;
}

/// Steady state over the final 10% of iterations plus the 1.03x reference
/// threshold derived from it (computed in the linear domain, then converted).
struct SteadyStateSummary {
  double steady_linear = 0.0;
  double steady_db = 0.0;
  double threshold_db = 0.0;  // 1.03 x steady, in dB
};

inline SteadyStateSummary steady_state_summary(const LearningCurve& curve) {
  if (curve.size() == 0) throw InputError("empty curve");
  const std::size_t window = std::max<std::size_t>(1, curve.size() / 10);
  double sum = 0.0;
  for (std::size_t i = curve.size() - window; i < curve.size(); ++i) {
    sum += curve.msd_mean_linear[i];
  }
  SteadyStateSummary out;
  out.steady_linear = sum / static_cast<double>(window);
  out.steady_db = to_db(out.steady_linear);
  out.threshold_db = to_db(1.03 * out.steady_linear);
  return out;
}

inline ThresholdCrossing first_crossing_steady(const LearningCurve& curve) {
  ThresholdCrossing out =
      first_crossing(curve, steady_state_summary(curve).threshold_db);
  out.rule = "1.03x_steady_state";
  return out;
}

/// One grid point of a (tau, mu) sweep. Unstable points (non-finite or
/// grossly growing deviation) carry no finite steady-state value.
struct SweepPoint {
  double tau = 0.0;
  double mu = 0.0;
  bool stable = false;
  double steady_linear = 0.0;
  double steady_db = 0.0;
};

/// Run one multi-trial experiment per (tau, mu) grid point, using the first
/// configured algorithm as the template. A tau grid requires an hqc
/// template. A point is flagged unstable when its steady level is not
/// finite or exceeds the initial deviation a thousandfold.
inline std::vector<SweepPoint> parameter_sweep(const ExperimentConfig& cfg,
                                               const ExperimentSetup& setup) {
  if (!cfg.sweep) throw ConfigError("sweep block required");
  if (cfg.algorithms.empty()) throw ConfigError("sweep needs an algorithm");
  const AlgorithmSpec base = cfg.algorithms.front();
  std::vector<double> taus = cfg.sweep->tau;
  std::vector<double> mus = cfg.sweep->mu;
  if (taus.empty()) taus.push_back(base.tau);
  if (mus.empty()) mus.push_back(base.mu);
  if (cfg.sweep->tau.size() > 0 && base.kind != AlgorithmKind::hqc) {
    throw ConfigError("tau sweep requires an hqc algorithm template");
  }

  std::vector<SweepPoint> out;
  for (double tau : taus) {
    for (double mu : mus) {
      ExperimentConfig point = cfg;
      point.sweep.reset();
      AlgorithmSpec spec = base;
      spec.tau = tau;
      spec.mu = mu;
      point.algorithms = {spec};
      const auto curves = detail::run_all(setup, point);
      const LearningCurve& curve = curves.begin()->second;
      SweepPoint sp;
      sp.tau = tau;
      sp.mu = mu;
      const SteadyStateSummary steady = steady_state_summary(curve);
      const double initial = curve.msd_mean_linear.front();
      sp.stable = std::isfinite(steady.steady_linear) &&
                  steady.steady_linear <= 1e3 * std::max(initial, 1e-300);
      if (sp.stable) {
        sp.steady_linear = steady.steady_linear;
        sp.steady_db = steady.steady_db;
      }
      out.push_back(sp);
    }
  }
  return out;
}

inline std::vector<SweepPoint> parameter_sweep(const ExperimentConfig& cfg) {
  const ExperimentSetup setup = build_setup(cfg);
  return parameter_sweep(cfg, setup);
}

}  // namespace gsphqc
