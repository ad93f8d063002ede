#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gsphqc/algorithms.hpp"
#include "gsphqc/errors.hpp"
#include "gsphqc/msd.hpp"
#include "gsphqc/noise.hpp"
#include "gsphqc/sampling.hpp"
#include "gsphqc/spectral.hpp"

namespace gsphqc {

/// The symmetric operator M = U_F^T G D_s U_F driving both the mean and the
/// mean-square error recursions, together with its (real) spectrum.
struct WeightedOperator {
  Eigen::MatrixXd matrix;       // F x F, symmetric
  Eigen::VectorXd eigenvalues;  // descending

  double lambda_max() const { return eigenvalues[0]; }
};

/// Build M = U_F^T diag(w) D_s U_F; the product is symmetrised as
/// (M + M^T)/2 before eigendecomposition to shed roundoff asymmetry.
inline WeightedOperator weighted_operator(const SpectralBasis& basis,
                                          const SamplingSet& ds,
                                          const ErrorWeights& weights) {
  const Eigen::Index n = basis.node_count();
  if (ds.node_count != n || weights.diagonal.size() != n) {
    throw InputError("weighted_operator: dimension mismatch");
  }
  const Eigen::VectorXd diag = weights.diagonal.cwiseProduct(ds.mask);
  Eigen::MatrixXd m = basis.basis_matrix.transpose() *
                      diag.asDiagonal() * basis.basis_matrix;
  m = 0.5 * (m + m.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw NumericError("weighted operator eigendecomposition failed");
  }
  WeightedOperator op;
  op.matrix = std::move(m);
  op.eigenvalues = solver.eigenvalues().reverse();
  return op;
}

/// Largest step size keeping the mean error recursion contractive:
/// 0 < mu < 2 / lambda_max(M).
inline double mean_step_bound(const WeightedOperator& op) {
  const double lmax = op.lambda_max();
  if (!(lmax > 0.0)) {
    throw NumericError(
        "weighted operator has no positive eigenvalue; the signal subspace "
        "is not excitable through the sampled nodes");
  }
  return 2.0 / lmax;
}

/// Mean-square stability bound 0 < mu < 1 / lambda_max(M); always half of
/// the mean bound.
inline double mean_square_step_bound(const WeightedOperator& op) {
  return 0.5 * mean_step_bound(op);
}

struct ModeConvergence {
  Eigen::VectorXd factors;                    // |1 - c mu lambda_i| per mode
  std::vector<Eigen::Index> non_contracting;  // modes with factor >= 1
};

/// Per-mode linear convergence factor |1 - c mu lambda_i| of the homogeneous
/// error recursion; c is the linearisation constant (1 when the weights are
/// already folded into the operator).
inline ModeConvergence mode_convergence_factors(const WeightedOperator& op,
                                                double mu, double c = 1.0) {
  ModeConvergence out;
  out.factors.resize(op.eigenvalues.size());
  for (Eigen::Index i = 0; i < op.eigenvalues.size(); ++i) {
    out.factors[i] = std::abs(1.0 - c * mu * op.eigenvalues[i]);
    if (out.factors[i] >= 1.0) out.non_contracting.push_back(i);
  }
  return out;
}

struct WeightFactor {
  double value = 1.0;
  /// Set when tau times the second moment of the noise exceeds 0.1 and the
  /// small-error expansion behind the factor is no longer trustworthy.
  bool validity_warning = false;
};

/// Scalar steady-state attenuation of the half-quadratic weights under
/// impulsive noise, from the second-order expansion of 1/sqrt(1 + tau e^2)
/// at the steady-state error statistics:
///   1 - (tau/2) Pr var_gamma - (tau/2)(1 - Pr) var_eta.
/// The value may be negative when the expansion is pushed outside its
/// domain; it is returned as-is with the warning set rather than clamped.
inline WeightFactor steady_state_weight_factor(
    double tau, const BernoulliGaussianParams& noise) {
  if (!(tau > 0.0)) throw InputError("tau must be > 0");
  validate_noise(noise);
  const double second_moment = mixture_abs_moment(noise, 2);
  WeightFactor f;
  f.value = 1.0 - 0.5 * tau * second_moment * theta_moment(2);
  f.validity_warning = tau * second_moment > 0.1;
  return f;
}

/// Inputs for the closed-form steady-state deviation.
struct SteadyStateInputs {
  double mu = 0.0;
  double tau = 0.0;
  BernoulliGaussianParams noise;
  const SpectralBasis* basis = nullptr;
  const SamplingSet* sampling = nullptr;
};

struct MsdPrediction {
  double msd_linear = 0.0;
  double msd_db = kMsdFloorDb;
  bool validity_warning = false;
};

/// Closed-form steady-state deviation
///   msd = mu^2 vec(H)^T (I - R)^{-1} vec(I)
/// with the steady-state weights G = factor * D_s,
///   M = U_F^T G D_s U_F,
///   H = (var_eta + Pr var_gamma) U_F^T G D_s G U_F,
///   R = (I - mu M) kron (I - mu M).
/// Note: the background-noise term in H deliberately carries no (1 - Pr)
/// factor; the recursion charges the full background variance to every node.
/// Throws NumericError when the spectral radius of R reaches 1 (the
/// operating point is mean-square unstable at this step size).
inline MsdPrediction steady_state_msd(const SteadyStateInputs& in) {
  if (in.basis == nullptr || in.sampling == nullptr) {
    throw InputError("steady_state_msd: basis and sampling are required");
  }
  if (!(in.mu > 0.0)) throw InputError("mu must be > 0");
  const SpectralBasis& basis = *in.basis;
  const SamplingSet& ds = *in.sampling;
  const Eigen::Index f = basis.freq_count();

  const WeightFactor factor = steady_state_weight_factor(in.tau, in.noise);

  ErrorWeights w;
  w.diagonal = Eigen::VectorXd::Constant(basis.node_count(), factor.value);
  const WeightedOperator op = weighted_operator(basis, ds, w);

  double radius = 0.0;
  for (Eigen::Index i = 0; i < f; ++i) {
    radius = std::max(radius, std::abs(1.0 - in.mu * op.eigenvalues[i]));
  }
  radius *= radius;  // rho((I - mu M) kron (I - mu M))
  if (!(radius < 1.0)) {
    std::string hint;
    if (op.lambda_max() > 0.0) {
      hint = "; mean_square_step_bound = " +
             std::to_string(mean_square_step_bound(op));
    }
    throw NumericError(
        "mean-square unstable at this step size (recursion spectral radius " +
        std::to_string(radius) + " >= 1)" + hint);
  }

  const double noise_power =
      in.noise.var_eta + in.noise.pr * in.noise.var_gamma;
  // G D_s G = factor^2 D_s, so H shares M's eigenbasis.
  const Eigen::MatrixXd masked =
      ds.mask.asDiagonal() * basis.basis_matrix;
  Eigen::MatrixXd b = basis.basis_matrix.transpose() * masked;
  b = 0.5 * (b + b.transpose()).eval();
  const Eigen::MatrixXd h = noise_power * factor.value * factor.value * b;

  const Eigen::MatrixXd contraction =
      Eigen::MatrixXd::Identity(f, f) - in.mu * op.matrix;
  const Eigen::Index f2 = f * f;
  Eigen::MatrixXd r(f2, f2);
  for (Eigen::Index i = 0; i < f; ++i) {
    for (Eigen::Index j = 0; j < f; ++j) {
      r.block(i * f, j * f, f, f) = contraction(i, j) * contraction;
    }
  }

  Eigen::VectorXd vec_identity = Eigen::VectorXd::Zero(f2);
  for (Eigen::Index i = 0; i < f; ++i) vec_identity[i * f + i] = 1.0;
  Eigen::VectorXd vec_h(f2);
  for (Eigen::Index j = 0; j < f; ++j) {
    vec_h.segment(j * f, f) = h.col(j);
  }

  const Eigen::VectorXd k =
      (Eigen::MatrixXd::Identity(f2, f2) - r).partialPivLu().solve(vec_identity);

  MsdPrediction out;
  out.msd_linear = std::max(0.0, in.mu * in.mu * vec_h.dot(k));
  out.msd_db = to_db(out.msd_linear);
  out.validity_warning = factor.validity_warning;
  return out;
}

struct RecursionRadii {
  double exact = 0.0;        // rho((I - mu M) kron (I - mu M))
  double approximate = 0.0;  // rho(I - 2 (I kron mu M))
  double gap = 0.0;
};

/// Diagnostic: spectral radius of the exact second-moment recursion versus
/// the linearised one that drops the mu^2 Kronecker term. The gap is O(mu^2).
inline RecursionRadii recursion_radius_gap(const WeightedOperator& op,
                                           double mu) {
  RecursionRadii out;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < op.eigenvalues.size(); ++i) {
    worst = std::max(worst, std::abs(1.0 - mu * op.eigenvalues[i]));
    out.approximate =
        std::max(out.approximate, std::abs(1.0 - 2.0 * mu * op.eigenvalues[i]));
  }
  out.exact = worst * worst;
  out.gap = std::abs(out.exact - out.approximate);
  return out;
}

}  // namespace gsphqc
