#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gsphqc/algorithms.hpp"
#include "gsphqc/errors.hpp"
#include "gsphqc/msd.hpp"
#include "gsphqc/noise.hpp"
#include "gsphqc/sampling.hpp"
#include "gsphqc/spectral.hpp"

namespace gsphqc {

/// Evolving estimate of the bandlimited signal (vertex domain, always in
/// span(U_F) provided the initial estimate is).
struct FilterState {
  Eigen::VectorXd estimate;
  long iteration = 0;
};

/// Online estimator bound to one (basis, sampling set, algorithm) triple.
///
/// One step computes the masked error e = D_s(observed - estimate), weights
/// it per the active kind, and moves the estimate along
///   estimate += mu * U_F U_F^T G(e) e.
/// The nlms kind replaces the projector with
/// U_F (U_F^T D_s U_F)^{-1} U_F^T; that normalisation matrix is inverted
/// once per sampling set at construction.
class GraphFilter {
 public:
  GraphFilter(const SpectralBasis& basis, const SamplingSet& ds,
              const AlgorithmSpec& spec)
      : basis_(basis), ds_(ds), spec_(spec) {
    validate_spec(spec_);
    if (ds_.node_count != basis_.node_count()) {
      throw InputError("sampling set and basis node counts differ");
    }
    if (spec_.kind == AlgorithmKind::nlms) {
      const Eigen::Index f = basis_.freq_count();
      Eigen::MatrixXd norm(f, f);
      const Eigen::MatrixXd masked =
          ds_.mask.asDiagonal() * basis_.basis_matrix;
      norm = basis_.basis_matrix.transpose() * masked;
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(norm);
      if (qr.rank() < f) {
        throw NumericError(
            "nlms normalisation matrix is singular; sampling set is not "
            "recoverable");
      }
      nlms_norm_inv_ = qr.inverse();
    }
  }

  const AlgorithmSpec& spec() const { return spec_; }
  const SpectralBasis& basis() const { return basis_; }
  const SamplingSet& sampling() const { return ds_; }

  /// Masked error D_s (observed - estimate); callers pass the unmasked
  /// observation.
  Eigen::VectorXd masked_error(const FilterState& state,
                               const Eigen::VectorXd& observed) const {
    if (observed.size() != basis_.node_count() ||
        state.estimate.size() != basis_.node_count()) {
      throw InputError("filter step: signal length mismatch");
    }
    return ds_.mask.cwiseProduct(observed - state.estimate);
  }

  FilterState step_with_mu(const FilterState& state,
                           const Eigen::VectorXd& observed, double mu) const {
    const Eigen::VectorXd e = masked_error(state, observed);
    Eigen::VectorXd g(e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) {
      g[i] = algorithm_score(e[i], spec_);
    }
    Eigen::VectorXd spectral = basis_.basis_matrix.transpose() * g;
    if (spec_.kind == AlgorithmKind::nlms) {
      spectral = nlms_norm_inv_ * spectral;
    }
    FilterState next;
    next.estimate = state.estimate + mu * (basis_.basis_matrix * spectral);
    next.iteration = state.iteration + 1;
    return next;
  }

  FilterState step(const FilterState& state,
                   const Eigen::VectorXd& observed) const {
    return step_with_mu(state, observed, spec_.mu);
  }

 private:
  SpectralBasis basis_;
  SamplingSet ds_;
  AlgorithmSpec spec_;
  Eigen::MatrixXd nlms_norm_inv_;
};

/// Single adaptation step; convenience wrapper over GraphFilter for one-off
/// use. observed is the unmasked noisy signal.
inline FilterState filter_step(const FilterState& state,
                               const GraphSignal& observed,
                               const SamplingSet& ds,
                               const SpectralBasis& basis,
                               const AlgorithmSpec& spec) {
  if (observed.domain != SignalDomain::vertex) {
    throw InputError("filter_step expects a vertex-domain observation");
  }
  return GraphFilter(basis, ds, spec).step(state, observed.values);
}

/// Scale the true signal by `factor` from iteration `iteration` onward
/// (abrupt-change scenario).
struct ChangeSchedule {
  long iteration = 0;
  double factor = 1.0;
};

struct RunResult {
  std::vector<double> msd_linear;  // per iteration, against the active truth
  Eigen::MatrixXd estimates;       // iterations x N when recorded, else empty
  FilterState final_state;
  bool diverged = false;
};

/// Run one seeded trial: at every iteration draw fresh noise, observe
/// x_true + w through the sampling mask, adapt, and record the squared
/// deviation against the currently active truth. A change schedule scales
/// the truth from its iteration onward and the deviation is measured
/// against the scaled truth thereafter.
///
/// If the estimate stops being finite (a genuinely divergent run), updates
/// freeze and the remaining trace is +infinity.
inline RunResult run_filter(const GraphSignal& x_true, const NoiseModel& noise,
                            const SamplingSet& ds, const SpectralBasis& basis,
                            const AlgorithmSpec& spec, long iterations,
                            std::uint64_t seed,
                            const std::optional<ChangeSchedule>& schedule = {},
                            bool record_estimates = false,
                            const Eigen::VectorXd* initial = nullptr) {
  if (x_true.domain != SignalDomain::vertex) {
    throw InputError("run_filter expects a vertex-domain truth");
  }
  if (iterations < 1) throw InputError("iterations must be >= 1");
  validate_noise(noise);

  const Eigen::Index n = basis.node_count();
  GraphFilter filter(basis, ds, spec);
  RandomStream rng(seed);

  FilterState state;
  if (initial != nullptr) {
    if (initial->size() != n) throw InputError("initial estimate length mismatch");
    // Keep the invariant: start inside span(U_F).
    state.estimate =
        basis.basis_matrix * (basis.basis_matrix.transpose() * (*initial));
  } else {
    state.estimate = Eigen::VectorXd::Zero(n);
  }

  RunResult result;
  result.msd_linear.resize(static_cast<std::size_t>(iterations));
  if (record_estimates) result.estimates.resize(iterations, n);

  const double inf = std::numeric_limits<double>::infinity();
  for (long i = 0; i < iterations; ++i) {
    const bool changed = schedule && i >= schedule->iteration;
    const double factor = changed ? schedule->factor : 1.0;
    const Eigen::VectorXd truth = factor * x_true.values;
    const Eigen::VectorXd w = sample_noise(noise, n, rng);
    if (!result.diverged) {
      state = filter.step(state, truth + w);
      if (!state.estimate.allFinite()) result.diverged = true;
    }
    result.msd_linear[static_cast<std::size_t>(i)] =
        result.diverged ? inf : msd_linear(state.estimate, truth);
    if (record_estimates) result.estimates.row(i) = state.estimate;
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace gsphqc
