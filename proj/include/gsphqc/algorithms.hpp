#pragma once

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "gsphqc/errors.hpp"

namespace gsphqc {

enum class AlgorithmKind { lms, nlms, mcc, gmcc, log, hqc };

inline const char* kind_name(AlgorithmKind k) {
  switch (k) {
    case AlgorithmKind::lms: return "lms";
    case AlgorithmKind::nlms: return "nlms";
    case AlgorithmKind::mcc: return "mcc";
    case AlgorithmKind::gmcc: return "gmcc";
    case AlgorithmKind::log: return "log";
    case AlgorithmKind::hqc: return "hqc";
  }
  return "?";
}

/// Which estimator to run and with which parameters. Only the parameters
/// required by the active kind are consulted:
///   mu            - step size (all kinds)
///   tau           - design parameter (hqc)
///   alpha_shape   - shape parameter (gmcc, log)
///   lambda_kernel - kernel width (mcc, gmcc)
struct AlgorithmSpec {
  AlgorithmKind kind = AlgorithmKind::lms;
  std::string label;  // name used in outputs; defaults to the kind name
  double mu = 0.0;
  double tau = 0.0;
  double alpha_shape = 0.0;
  double lambda_kernel = 0.0;
};

inline void validate_spec(const AlgorithmSpec& s) {
  if (!(s.mu > 0.0)) {
    throw ConfigError(std::string(kind_name(s.kind)) + ": mu must be > 0");
  }
  switch (s.kind) {
    case AlgorithmKind::hqc:
      if (!(s.tau > 0.0)) throw ConfigError("hqc: tau must be > 0");
      break;
    case AlgorithmKind::log:
      if (!(s.alpha_shape > 0.0)) throw ConfigError("log: alpha must be > 0");
      break;
    case AlgorithmKind::mcc:
      if (!(s.lambda_kernel > 0.0)) throw ConfigError("mcc: lambda must be > 0");
      break;
    case AlgorithmKind::gmcc:
      if (!(s.lambda_kernel > 0.0)) throw ConfigError("gmcc: lambda must be > 0");
      if (!(s.alpha_shape > 0.0)) throw ConfigError("gmcc: alpha must be > 0");
      break;
    default:
      break;
  }
}

/// Diagonal of the error-weighting matrix applied inside an update.
struct ErrorWeights {
  Eigen::VectorXd diagonal;
};

/// Half-quadratic cost: sum over components of (1/tau)(sqrt(1 + tau e^2) - 1).
/// Quadratic near zero, asymptotically linear; zero iff e = 0.
inline double hqc_cost(const Eigen::VectorXd& e, double tau) {
  if (!(tau > 0.0)) throw InputError("tau must be > 0");
  double total = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    total += (std::sqrt(1.0 + tau * e[i] * e[i]) - 1.0) / tau;
  }
  return total;
}

inline double hqc_weight(double e, double tau) {
  const double t = tau * e * e;
  if (std::isinf(t)) return 0.0;
  return 1.0 / std::sqrt(1.0 + t);
}

inline double log_weight(double e, double alpha) {
  const double t = alpha * e * e;
  if (std::isinf(t)) return 0.0;
  return 1.0 / (1.0 + t);
}

inline double mcc_weight(double e, double lambda) {
  return std::exp(-lambda * e * e);
}

/// Generalised-correntropy weight exp(-lambda |e|^a) |e|^(a-2).
/// The weight diverges as e -> 0 for a < 2; the value at e = 0 is defined
/// as 0 (its score w(e) e vanishes there), and as 1 for a = 2.
inline double gmcc_weight(double e, double lambda, double a) {
  if (e == 0.0) return a < 2.0 ? 0.0 : 1.0;
  const double ae = std::abs(e);
  return std::exp(-lambda * std::pow(ae, a)) * std::pow(ae, a - 2.0);
}

/// Weighted error w(e) e for the half-quadratic kernel, e / sqrt(1 + tau e^2).
/// Bounded by 1/sqrt(tau) in magnitude; overflow-safe for huge errors.
inline double hqc_score(double e, double tau) {
  const double t = tau * e * e;
  if (std::isinf(t)) return (e > 0.0 ? 1.0 : -1.0) / std::sqrt(tau);
  return e / std::sqrt(1.0 + t);
}

/// Weighted error w(e) e for the active kind.
inline double algorithm_score(double e, const AlgorithmSpec& s) {
  switch (s.kind) {
    case AlgorithmKind::lms:
    case AlgorithmKind::nlms:
      return e;
    case AlgorithmKind::mcc:
      return mcc_weight(e, s.lambda_kernel) * e;
    case AlgorithmKind::gmcc: {
      if (e == 0.0) return 0.0;
      const double ae = std::abs(e);
      const double mag = std::exp(-s.lambda_kernel * std::pow(ae, s.alpha_shape)) *
                         std::pow(ae, s.alpha_shape - 1.0);
      return e > 0.0 ? mag : -mag;
    }
    case AlgorithmKind::log: {
      const double t = s.alpha_shape * e * e;
      if (std::isinf(t)) return 0.0;
      return e / (1.0 + t);
    }
    case AlgorithmKind::hqc:
      return hqc_score(e, s.tau);
  }
  return e;
}

/// Per-component error weights for the active kind. LMS and NLMS use the
/// identity weighting.
inline ErrorWeights error_weights(const Eigen::VectorXd& e,
                                  const AlgorithmSpec& s) {
  validate_spec(s);
  ErrorWeights w;
  w.diagonal.resize(e.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    switch (s.kind) {
      case AlgorithmKind::lms:
      case AlgorithmKind::nlms:
        w.diagonal[i] = 1.0;
        break;
      case AlgorithmKind::mcc:
        w.diagonal[i] = mcc_weight(e[i], s.lambda_kernel);
        break;
      case AlgorithmKind::gmcc:
        w.diagonal[i] = gmcc_weight(e[i], s.lambda_kernel, s.alpha_shape);
        break;
      case AlgorithmKind::log:
        w.diagonal[i] = log_weight(e[i], s.alpha_shape);
        break;
      case AlgorithmKind::hqc:
        w.diagonal[i] = hqc_weight(e[i], s.tau);
        break;
    }
  }
  return w;
}

/// Second derivative of the scalar half-quadratic cost,
/// 1 / sqrt((1 + tau e^2)^3). Strictly positive everywhere.
inline double hqc_hessian_coeff(double e, double tau) {
  if (!(tau > 0.0)) throw InputError("tau must be > 0");
  const double t = 1.0 + tau * e * e;
  return 1.0 / std::sqrt(t * t * t);
}

/// Logarithmic-kernel curvature coefficient 2 tau (1 - tau e^2) /
/// (1 + tau e^2)^2; changes sign at |e| = sqrt(1/tau).
inline double log_hessian_coeff(double e, double tau) {
  if (!(tau > 0.0)) throw InputError("tau must be > 0");
  const double t = tau * e * e;
  const double d = 1.0 + t;
  return 2.0 * tau * (1.0 - t) / (d * d);
}

}  // namespace gsphqc
