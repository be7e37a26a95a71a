#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csr/gle.hpp"
#include "csr/graph.hpp"
#include "csr/haar.hpp"
#include "csr/lifting.hpp"

namespace csr {

// Invertible N x N representation basis with its analysis transform. psi is
// stored in sensor-index order; forward computes coefficients from a field
// vector in the same order.
struct RepresentationBasis {
  std::string name;
  Eigen::MatrixXd psi;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> forward;
};

// Ψ column j = unpermuted lift_inverse(e_j); forward permutes into
// embedding order and runs the lifted analysis.
inline RepresentationBasis assemble_basis(const LiftedWavelets& w, const Embedding& embedding) {
  w.check_shapes();
  const int N = w.partition.n;
  if (static_cast<int>(embedding.order.size()) != N)
    throw std::invalid_argument("assemble_basis: embedding size mismatch");

  RepresentationBasis basis;
  basis.name = "learned";
  basis.psi.resize(N, N);
  for (int j = 0; j < N; ++j) {
    const Eigen::VectorXd col_emb = lift_inverse(w, Eigen::VectorXd::Unit(N, j));
    for (int p = 0; p < N; ++p) basis.psi(embedding.order[p], j) = col_emb[p];
  }
  const std::vector<int> order = embedding.order;
  basis.forward = [w, order, N](const Eigen::VectorXd& x) {
    if (x.size() != N) throw std::invalid_argument("forward: length mismatch");
    Eigen::VectorXd permuted(N);
    for (int p = 0; p < N; ++p) permuted[p] = x[order[p]];
    return lift_forward(w, permuted);
  };
  return basis;
}

inline Eigen::MatrixXd dct_matrix(int N) {
  Eigen::MatrixXd C(N, N);
  for (int k = 0; k < N; ++k) {
    const double alpha = std::sqrt((k == 0 ? 1.0 : 2.0) / N);
    for (int n = 0; n < N; ++n)
      C(k, n) = alpha * std::cos(std::numbers::pi * (2 * n + 1) * k / (2.0 * N));
  }
  return C;
}

inline RepresentationBasis baseline_basis(const std::string& kind, int N) {
  if (N < 1) throw std::invalid_argument("baseline_basis: N must be >= 1");
  RepresentationBasis basis;
  basis.name = kind;
  if (kind == "haar") {
    const HierarchicalPartition part = dyadic_partition(N);
    const LiftedWavelets w = zero_lifting(part);
    Embedding identity;
    identity.order.resize(N);
    for (int i = 0; i < N; ++i) identity.order[i] = i;
    identity.walk = identity.order;
    basis = assemble_basis(w, identity);
    basis.name = "haar";
  } else if (kind == "dct") {
    const Eigen::MatrixXd C = dct_matrix(N);
    basis.psi = C.transpose();
    basis.forward = [C](const Eigen::VectorXd& x) { return Eigen::VectorXd(C * x); };
  } else if (kind == "diff") {
    // Ψ lower-triangular ones: s holds first differences, s_0 = x_0.
    basis.psi = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j <= i; ++j) basis.psi(i, j) = 1.0;
    basis.forward = [N](const Eigen::VectorXd& x) {
      if (x.size() != N) throw std::invalid_argument("forward: length mismatch");
      Eigen::VectorXd s(N);
      s[0] = x[0];
      for (int i = 1; i < N; ++i) s[i] = x[i] - x[i - 1];
      return s;
    };
  } else {
    throw std::invalid_argument("baseline_basis: unknown kind '" + kind + "'");
  }
  return basis;
}

// Keep the k largest-magnitude entries, ties resolved toward lower index.
inline Eigen::VectorXd k_term_approx(const Eigen::VectorXd& s, int k) {
  const int n = static_cast<int>(s.size());
  if (k < 0 || k > n) throw std::invalid_argument("k_term_approx: k out of range");
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(s[a]) > std::abs(s[b]);
  });
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < k; ++i) out[idx[i]] = s[idx[i]];
  return out;
}

}  // namespace csr
