#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "gsphqc/errors.hpp"
#include "gsphqc/spectral.hpp"

namespace gsphqc {

/// Node subset whose values are observable. mask is the diagonal of the 0/1
/// sampling matrix; indices lists the sampled nodes in ascending order.
struct SamplingSet {
  Eigen::Index node_count = 0;
  std::vector<Eigen::Index> indices;
  Eigen::VectorXd mask;  // length node_count, entries 0 or 1

  Eigen::Index sample_count() const {
    return static_cast<Eigen::Index>(indices.size());
  }
};

enum class SamplingStrategy { random_seeded, greedy_minsv };

namespace detail {

inline Eigen::MatrixXd sampled_basis_rows(const SpectralBasis& basis,
                                          const std::vector<Eigen::Index>& s) {
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(s.size()),
                       basis.freq_count());
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    rows.row(r) = basis.basis_matrix.row(s[static_cast<std::size_t>(r)]);
  }
  return rows;
}

/// Rank of D_s U_F with the convention that a singular value counts while
/// it exceeds 1e-10 times the largest one.
inline Eigen::Index sampled_rank(const SpectralBasis& basis,
                                 const std::vector<Eigen::Index>& s) {
  if (s.empty()) return 0;
  const Eigen::MatrixXd rows = sampled_basis_rows(basis, s);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double cutoff = 1e-10 * sv[0];
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff) ++rank;
  }
  return rank;
}

inline double smallest_singular_value(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();
  return sv.size() == 0 ? 0.0 : sv[sv.size() - 1];
}

}  // namespace detail

/// True when the sampled rows of U_F have full column rank, i.e. a
/// bandlimited signal is recoverable from the sampled nodes.
inline bool is_recoverable(const SpectralBasis& basis, const SamplingSet& ds) {
  return detail::sampled_rank(basis, ds.indices) == basis.freq_count();
}

/// Build a sampling set of the requested size satisfying the recoverability
/// condition rank(D_s U_F) = F.
///
/// random_seeded draws a uniformly random subset and retries with an
/// incremented seed, up to 100 attempts. greedy_minsv grows the set one node
/// at a time, each time adding the node that maximises the smallest singular
/// value of the sampled rows of U_F (ties to the lower node index).
inline SamplingSet build_sampling_set(const SpectralBasis& basis,
                                      Eigen::Index sample_count,
                                      SamplingStrategy strategy,
                                      std::uint64_t seed = 0) {
  const Eigen::Index n = basis.node_count();
  const Eigen::Index f = basis.freq_count();
  if (sample_count < f) {
    throw InputError("sample_count must be >= freq_count for recoverability");
  }
  if (sample_count > n) {
    throw InputError("sample_count exceeds node count");
  }

  auto finish = [&](std::vector<Eigen::Index> idx) {
    std::sort(idx.begin(), idx.end());
    SamplingSet ds;
    ds.node_count = n;
    ds.indices = std::move(idx);
    ds.mask = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i : ds.indices) ds.mask[i] = 1.0;
    return ds;
  };

  if (strategy == SamplingStrategy::random_seeded) {
    for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
      RandomStream rng(seed + attempt);
      std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
      std::iota(perm.begin(), perm.end(), Eigen::Index{0});
      for (Eigen::Index i = n - 1; i > 0; --i) {
        const auto j = static_cast<Eigen::Index>(
            rng.next_word() % static_cast<std::uint64_t>(i + 1));
        std::swap(perm[static_cast<std::size_t>(i)],
                  perm[static_cast<std::size_t>(j)]);
      }
      perm.resize(static_cast<std::size_t>(sample_count));
      if (detail::sampled_rank(basis, perm) == f) return finish(perm);
    }
    throw ConstructionError(
        "no recoverable random sampling set found in 100 attempts");
  }

  // greedy_minsv
  std::vector<Eigen::Index> chosen;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Eigen::Index step = 0; step < sample_count; ++step) {
    double best = -1.0;
    Eigen::Index best_node = -1;
    for (Eigen::Index c = 0; c < n; ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      chosen.push_back(c);
      const double sv =
          detail::smallest_singular_value(detail::sampled_basis_rows(basis, chosen));
      chosen.pop_back();
      if (sv > best) {
        best = sv;
        best_node = c;
      }
    }
    chosen.push_back(best_node);
    used[static_cast<std::size_t>(best_node)] = true;
  }
  if (detail::sampled_rank(basis, chosen) != f) {
    throw ConstructionError(
        "greedy sampling could not reach full recoverability rank");
  }
  return finish(chosen);
}

/// Apply the sampling mask: values preserved at sampled nodes, zero at the
/// rest. Idempotent.
inline GraphSignal apply_sampling(const SamplingSet& ds, const GraphSignal& x) {
  if (x.domain != SignalDomain::vertex) {
    throw InputError("apply_sampling expects a vertex-domain signal");
  }
  if (x.values.size() != ds.node_count) {
    throw InputError("apply_sampling: signal length mismatch");
  }
  return vertex_signal(ds.mask.cwiseProduct(x.values));
}

}  // namespace gsphqc
