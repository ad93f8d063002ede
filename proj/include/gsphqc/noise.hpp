#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "gsphqc/errors.hpp"
#include "gsphqc/rng.hpp"

namespace gsphqc {

/// Impulsive noise: background Gaussian plus a rare high-variance Gaussian
/// gated by a Bernoulli indicator, w = eta + b * gamma.
struct BernoulliGaussianParams {
  double pr = 0.0;         // impulse probability in [0, 1]
  double var_eta = 0.0;    // background Gaussian variance
  double var_gamma = 0.0;  // impulse Gaussian variance (typically >> var_eta)
};

/// Alpha-stable family in the standard (alpha, beta, gamma, delta)
/// parameterisation; alpha = 1, beta = 0 is Cauchy, alpha = 2 is Gaussian
/// with variance 2 gamma^2.
struct AlphaStableParams {
  double alpha = 2.0;        // stability exponent in (0, 2]
  double beta = 0.0;         // skewness in [-1, 1]
  double gamma_scale = 1.0;  // scale > 0
  double delta = 0.0;        // location
};

struct LaplaceParams {
  double mu_loc = 0.0;  // location
  double b = 1.0;       // scale > 0
};

struct PureGaussianParams {
  double var = 0.0;  // variance >= 0
};

using NoiseModel = std::variant<BernoulliGaussianParams, AlphaStableParams,
                                LaplaceParams, PureGaussianParams>;

inline void validate_noise(const BernoulliGaussianParams& p) {
  if (!(p.pr >= 0.0 && p.pr <= 1.0)) throw InputError("pr must lie in [0, 1]");
  if (!(p.var_eta >= 0.0)) throw InputError("var_eta must be >= 0");
  if (!(p.var_gamma >= 0.0)) throw InputError("var_gamma must be >= 0");
}

inline void validate_noise(const AlphaStableParams& p) {
  if (!(p.alpha > 0.0 && p.alpha <= 2.0)) {
    throw InputError("alpha must lie in (0, 2]");
  }
  if (!(p.beta >= -1.0 && p.beta <= 1.0)) {
    throw InputError("beta must lie in [-1, 1]");
  }
  if (!(p.gamma_scale > 0.0)) throw InputError("gamma_scale must be > 0");
}

inline void validate_noise(const LaplaceParams& p) {
  if (!(p.b > 0.0)) throw InputError("laplace scale b must be > 0");
}

inline void validate_noise(const PureGaussianParams& p) {
  if (!(p.var >= 0.0)) throw InputError("variance must be >= 0");
}

inline void validate_noise(const NoiseModel& m) {
  std::visit([](const auto& p) { validate_noise(p); }, m);
}

/// Per component: eta + b * gamma with eta ~ N(0, var_eta),
/// gamma ~ N(0, var_gamma), b ~ Bernoulli(pr), all independent. Both
/// Gaussians are drawn for every component so the stream layout does not
/// depend on the Bernoulli outcomes.
inline Eigen::VectorXd sample_bernoulli_gaussian(
    const BernoulliGaussianParams& p, Eigen::Index n, RandomStream& rng) {
  validate_noise(p);
  if (n < 1) throw InputError("sample length must be >= 1");
  const double sd_eta = std::sqrt(p.var_eta);
  const double sd_gamma = std::sqrt(p.var_gamma);
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double eta = sd_eta * rng.gaussian();
    const bool impulse = rng.uniform() < p.pr;
    const double gamma = sd_gamma * rng.gaussian();
    out[i] = eta + (impulse ? gamma : 0.0);
  }
  return out;
}

/// Chambers-Mallows-Stuck sampler for the alpha-stable family.
inline Eigen::VectorXd sample_alpha_stable(const AlphaStableParams& p,
                                           Eigen::Index n, RandomStream& rng) {
  validate_noise(p);
  if (n < 1) throw InputError("sample length must be >= 1");
  constexpr double kPi = std::numbers::pi;
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = kPi * (rng.uniform_strict() - 0.5);  // (-pi/2, pi/2)
    const double w = -std::log(rng.uniform_open());       // Exp(1)
    double x;
    if (p.alpha == 1.0) {
      const double a = kHalfPi + p.beta * v;
      x = (a * std::tan(v) -
           p.beta * std::log((kHalfPi * w * std::cos(v)) / a)) /
          kHalfPi;
      out[i] = p.gamma_scale * x + p.delta +
               p.beta * p.gamma_scale * std::log(p.gamma_scale) / kHalfPi;
    } else {
      const double t = p.beta * std::tan(kHalfPi * p.alpha);
      const double shift = std::atan(t) / p.alpha;
      const double scale = std::pow(1.0 + t * t, 0.5 / p.alpha);
      x = scale * std::sin(p.alpha * (v + shift)) /
          std::pow(std::cos(v), 1.0 / p.alpha) *
          std::pow(std::cos(v - p.alpha * (v + shift)) / w,
                   (1.0 - p.alpha) / p.alpha);
      out[i] = p.gamma_scale * x + p.delta;
    }
  }
  return out;
}

/// Laplace quantile (inverse CDF) at probability u in (0, 1).
inline double laplace_quantile(const LaplaceParams& p, double u) {
  validate_noise(p);
  if (!(u > 0.0 && u < 1.0)) throw InputError("quantile level must be in (0, 1)");
  const double q = u - 0.5;
  const double sgn = (q > 0.0) ? 1.0 : (q < 0.0 ? -1.0 : 0.0);
  return p.mu_loc - p.b * sgn * std::log1p(-2.0 * std::abs(q));
}

/// Inverse-CDF Laplace sampling: mean mu_loc, variance 2 b^2.
inline Eigen::VectorXd sample_laplace(const LaplaceParams& p, Eigen::Index n,
                                      RandomStream& rng) {
  validate_noise(p);
  if (n < 1) throw InputError("sample length must be >= 1");
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] = laplace_quantile(p, rng.uniform_strict());
  }
  return out;
}

inline Eigen::VectorXd sample_gaussian(const PureGaussianParams& p,
                                       Eigen::Index n, RandomStream& rng) {
  validate_noise(p);
  if (n < 1) throw InputError("sample length must be >= 1");
  const double sd = std::sqrt(p.var);
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = sd * rng.gaussian();
  return out;
}

/// Draw one length-n vector from whichever model is active.
inline Eigen::VectorXd sample_noise(const NoiseModel& m, Eigen::Index n,
                                    RandomStream& rng) {
  return std::visit(
      [&](const auto& p) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, BernoulliGaussianParams>) {
          return sample_bernoulli_gaussian(p, n, rng);
        } else if constexpr (std::is_same_v<T, AlphaStableParams>) {
          return sample_alpha_stable(p, n, rng);
        } else if constexpr (std::is_same_v<T, LaplaceParams>) {
          return sample_laplace(p, n, rng);
        } else {
          return sample_gaussian(p, n, rng);
        }
      },
      m);
}

/// k-th absolute moment of a standard normal, E|Z|^k. Exact recurrence:
/// theta(1) = sqrt(2/pi), theta(2) = 1, theta(k) = (k - 1) theta(k - 2).
inline double theta_moment(int k) {
  if (k < 1) throw InputError("moment order must be >= 1");
  double value;
  int start;
  if (k % 2 == 0) {
    value = 1.0;
    start = 2;
  } else {
    value = std::sqrt(2.0 / std::numbers::pi);
    start = 1;
  }
  for (int m = start + 2; m <= k; m += 2) value *= (m - 1);
  return value;
}

/// k-th absolute moment of the impulsive mixture:
/// Pr sd_gamma^k theta(k) + (1 - Pr) sd_eta^k theta(k), with sd = sqrt(var).
inline double mixture_abs_moment(const BernoulliGaussianParams& p, int k) {
  validate_noise(p);
  const double half_k = 0.5 * static_cast<double>(k);
  return (p.pr * std::pow(p.var_gamma, half_k) +
          (1.0 - p.pr) * std::pow(p.var_eta, half_k)) *
         theta_moment(k);
}

}  // namespace gsphqc
