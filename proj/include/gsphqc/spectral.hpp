#pragma once

#include <algorithm>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gsphqc/errors.hpp"
#include "gsphqc/graph.hpp"

namespace gsphqc {

enum class SignalDomain { vertex, spectral };

/// Real signal attached either to graph nodes (vertex domain, length N) or
/// to the selected frequency set (spectral domain, length F).
struct GraphSignal {
  Eigen::VectorXd values;
  SignalDomain domain = SignalDomain::vertex;
};

inline GraphSignal vertex_signal(Eigen::VectorXd v) {
  return GraphSignal{std::move(v), SignalDomain::vertex};
}

inline GraphSignal spectral_signal(Eigen::VectorXd v) {
  return GraphSignal{std::move(v), SignalDomain::spectral};
}

/// Orthogonal eigenbasis of a symmetric adjacency matrix together with the
/// selected frequency subset.
///
/// eigenvectors holds U column-wise with A = U diag(eigenvalues) U^T;
/// eigenvalues are sorted descending (ties keep ascending solver order) and
/// every eigenvector is sign-normalised so its first non-negligible
/// component is positive, making the decomposition reproducible.
/// freq_set is the ascending list of retained frequency indices and
/// basis_matrix the corresponding N x F column subset U_F.
struct SpectralBasis {
  Eigen::MatrixXd eigenvectors;         // U, N x N
  Eigen::VectorXd eigenvalues;          // length N, descending
  std::vector<Eigen::Index> freq_set;   // ascending indices into columns of U
  Eigen::MatrixXd basis_matrix;         // U_F, N x |freq_set|

  Eigen::Index node_count() const { return eigenvectors.rows(); }
  Eigen::Index freq_count() const {
    return static_cast<Eigen::Index>(freq_set.size());
  }
};

/// Eigendecomposition of a symmetric adjacency matrix. The returned basis
/// keeps the full frequency set.
inline SpectralBasis spectral_decompose(const Graph& g) {
  const Eigen::MatrixXd& a = g.adjacency;
  if (a.rows() != a.cols()) throw InputError("adjacency must be square");
  const Eigen::Index n = a.rows();
  if (n < 1) throw InputError("empty graph");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw InputError("adjacency must be symmetric (undirected graph)");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigendecomposition did not converge");
  }

  // Solver returns ascending eigenvalues; reorder descending, stable in the
  // original index for repeated eigenvalues.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) {
                     return solver.eigenvalues()[i] > solver.eigenvalues()[j];
                   });

  SpectralBasis basis;
  basis.eigenvectors.resize(n, n);
  basis.eigenvalues.resize(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    basis.eigenvalues[c] = solver.eigenvalues()[order[static_cast<std::size_t>(c)]];
    Eigen::VectorXd u = solver.eigenvectors().col(order[static_cast<std::size_t>(c)]);
    for (Eigen::Index r = 0; r < n; ++r) {
      if (std::abs(u[r]) > 1e-12) {
        if (u[r] < 0.0) u = -u;
        break;
      }
    }
    basis.eigenvectors.col(c) = u;
  }
  basis.freq_set.resize(static_cast<std::size_t>(n));
  std::iota(basis.freq_set.begin(), basis.freq_set.end(), Eigen::Index{0});
  basis.basis_matrix = basis.eigenvectors;
  return basis;
}

/// Forward graph Fourier transform: s = U_F^T x. With the full frequency
/// set this is the complete transform s = U^T x.
inline GraphSignal gft(const SpectralBasis& basis, const GraphSignal& x) {
  if (x.domain != SignalDomain::vertex) {
    throw InputError("gft expects a vertex-domain signal");
  }
  if (x.values.size() != basis.node_count()) {
    throw InputError("gft: signal length does not match node count");
  }
  return spectral_signal(basis.basis_matrix.transpose() * x.values);
}

/// Inverse graph Fourier transform: x = U_F s.
inline GraphSignal igft(const SpectralBasis& basis, const GraphSignal& s) {
  if (s.domain != SignalDomain::spectral) {
    throw InputError("igft expects a spectral-domain signal");
  }
  if (s.values.size() != basis.freq_count()) {
    throw InputError("igft: signal length does not match frequency count");
  }
  return vertex_signal(basis.basis_matrix * s.values);
}

/// Restrict the basis to the f_count frequencies carrying the largest
/// spectral magnitude of the reference signal. Ties break toward the lower
/// frequency index; the result's freq_set is sorted ascending.
inline SpectralBasis select_frequency_set(const SpectralBasis& basis,
                                          const GraphSignal& reference,
                                          Eigen::Index f_count) {
  if (reference.domain != SignalDomain::vertex) {
    throw InputError("select_frequency_set expects a vertex-domain reference");
  }
  const Eigen::Index n = basis.node_count();
  if (reference.values.size() != n) {
    throw InputError("select_frequency_set: reference length mismatch");
  }
  if (f_count < 1 || f_count > n) {
    throw InputError("f_count must lie in [1, node_count]");
  }

  const Eigen::VectorXd spectrum =
      basis.eigenvectors.transpose() * reference.values;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) {
                     return std::abs(spectrum[i]) > std::abs(spectrum[j]);
                   });
  order.resize(static_cast<std::size_t>(f_count));
  std::sort(order.begin(), order.end());

  SpectralBasis out;
  out.eigenvectors = basis.eigenvectors;
  out.eigenvalues = basis.eigenvalues;
  out.freq_set = order;
  out.basis_matrix.resize(n, f_count);
  for (Eigen::Index c = 0; c < f_count; ++c) {
    out.basis_matrix.col(c) =
        basis.eigenvectors.col(order[static_cast<std::size_t>(c)]);
  }
  return out;
}

/// Orthogonal projection onto span(U_F): x -> U_F U_F^T x. Idempotent.
inline GraphSignal bandlimit_project(const SpectralBasis& basis,
                                     const GraphSignal& x) {
  if (x.domain != SignalDomain::vertex) {
    throw InputError("bandlimit_project expects a vertex-domain signal");
  }
  if (x.values.size() != basis.node_count()) {
    throw InputError("bandlimit_project: signal length mismatch");
  }
  if (basis.freq_set.empty()) {
    throw InputError("bandlimit_project: empty frequency set");
  }
  return vertex_signal(basis.basis_matrix *
                       (basis.basis_matrix.transpose() * x.values));
}

}  // namespace gsphqc
