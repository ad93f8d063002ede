#pragma once

#include <cmath>

#include <Eigen/Core>

#include "gsphqc/errors.hpp"

namespace gsphqc {

/// Floor applied to every dB conversion; an exact match reports -300 dB.
inline constexpr double kMsdFloorDb = -300.0;

/// Linear value to decibels, 10 log10(x), floored at kMsdFloorDb.
/// Non-positive input maps to the floor.
inline double to_db(double linear) {
  if (!(linear > 0.0)) return kMsdFloorDb;
  const double db = 10.0 * std::log10(linear);
  return db < kMsdFloorDb ? kMsdFloorDb : db;
}

/// Squared deviation ||estimate - truth||^2 in the linear domain.
inline double msd_linear(const Eigen::VectorXd& estimate,
                         const Eigen::VectorXd& truth) {
  if (estimate.size() != truth.size()) {
    throw InputError("msd: length mismatch");
  }
  return (estimate - truth).squaredNorm();
}

/// Mean-square deviation in dB: 10 log10 ||estimate - truth||^2.
inline double msd_db(const Eigen::VectorXd& estimate,
                     const Eigen::VectorXd& truth) {
  return to_db(msd_linear(estimate, truth));
}

}  // namespace gsphqc
