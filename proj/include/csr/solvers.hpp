#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "csr/basis.hpp"

namespace csr {

struct Sl0Params {
  double sigma_decrease = 0.7;
  double mu = 2.0;
  int inner_iters = 3;
  double sigma_min_ratio = 1e-4;

  void validate() const {
    if (!(sigma_decrease > 0.0 && sigma_decrease < 1.0))
      throw std::invalid_argument("Sl0Params: sigma_decrease must be in (0, 1)");
    if (!(mu > 0.0)) throw std::invalid_argument("Sl0Params: mu must be > 0");
    if (inner_iters < 1) throw std::invalid_argument("Sl0Params: inner_iters must be >= 1");
    if (!(sigma_min_ratio > 0.0))
      throw std::invalid_argument("Sl0Params: sigma_min_ratio must be > 0");
  }
};

struct SparseSolution {
  Eigen::VectorXd s;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool used_pseudoinverse = false;
};

namespace detail {

// Affine projector onto {s : As = y}, with a pseudo-inverse fallback when
// AA^T is numerically rank deficient (routing matrices can repeat rows).
class FeasibleProjector {
 public:
  FeasibleProjector(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) : A_(A), y_(y) {
    const Eigen::MatrixXd gram = A * A.transpose();
    llt_.compute(gram);
    if (llt_.info() != Eigen::Success || llt_.rcond() < 1e-12) {
      degenerate_ = true;
      cod_.compute(A);
    }
  }

  bool degenerate() const { return degenerate_; }

  Eigen::VectorXd min_l2_solution() const {
    if (degenerate_) return cod_.solve(y_);
    return A_.transpose() * llt_.solve(y_);
  }

  Eigen::VectorXd project(const Eigen::VectorXd& s) const {
    const Eigen::VectorXd r = A_ * s - y_;
    if (degenerate_) return s - cod_.solve(r);
    return s - A_.transpose() * llt_.solve(r);
  }

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd y_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod_;
  bool degenerate_ = false;
};

}  // namespace detail

// Smoothed-l0 descent with graduated sigma and feasibility projections.
inline SparseSolution sl0_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                                const Sl0Params& params = {}) {
  params.validate();
  if (A.rows() < 1) throw std::invalid_argument("sl0_solve: empty measurement operator");
  if (A.rows() != y.size()) throw std::invalid_argument("sl0_solve: dimension mismatch");

  detail::FeasibleProjector proj(A, y);
  SparseSolution sol;
  sol.used_pseudoinverse = proj.degenerate();
  Eigen::VectorXd s = proj.min_l2_solution();

  const double sigma0 = 2.0 * s.cwiseAbs().maxCoeff();
  if (sigma0 > 0.0) {
    double sigma = sigma0;
    while (sigma >= params.sigma_min_ratio * sigma0) {
      for (int it = 0; it < params.inner_iters; ++it) {
        const Eigen::ArrayXd sa = s.array();
        const Eigen::VectorXd delta =
            (sa * (-sa.square() / (2.0 * sigma * sigma)).exp()).matrix();
        s -= params.mu * delta;
        s = proj.project(s);
        ++sol.iterations;
      }
      sigma *= params.sigma_decrease;
    }
  }
  sol.s = s;
  sol.residual_norm = (A * s - y).norm();
  sol.converged = sol.residual_norm <= 1e-8 * std::max(1.0, y.norm());
  return sol;
}

// Basis pursuit min ||s||_1 s.t. As = y via ADMM: alternate exact affine
// projection with soft thresholding. The returned iterate is the feasible
// one.
inline SparseSolution l1_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                               double tol = 1e-9, int max_iters = 20000) {
  if (A.rows() < 1) throw std::invalid_argument("l1_solve: empty measurement operator");
  if (A.rows() != y.size()) throw std::invalid_argument("l1_solve: dimension mismatch");
  if (!(tol > 0.0)) throw std::invalid_argument("l1_solve: tol must be > 0");

  detail::FeasibleProjector proj(A, y);
  const int K = static_cast<int>(A.cols());
  const double scale = std::max(1.0, y.lpNorm<Eigen::Infinity>());
  const double rho = 1.0;

  SparseSolution sol;
  sol.used_pseudoinverse = proj.degenerate();
  Eigen::VectorXd z = Eigen::VectorXd::Zero(K);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(K);
  Eigen::VectorXd s = proj.min_l2_solution();

  for (int it = 0; it < max_iters; ++it) {
    s = proj.project(z - u);
    const Eigen::VectorXd v = s + u;
    const double thresh = 1.0 / rho;
    const Eigen::VectorXd z_prev = z;
    for (int i = 0; i < K; ++i)
      z[i] = std::copysign(std::max(std::abs(v[i]) - thresh, 0.0), v[i]);
    u += s - z;
    ++sol.iterations;
    // Both the primal gap and the dual residual must be small; the primal
    // gap alone can dip transiently far from the optimum.
    if ((s - z).lpNorm<Eigen::Infinity>() <= tol * scale &&
        (z - z_prev).lpNorm<Eigen::Infinity>() <= tol * scale) {
      sol.converged = true;
      break;
    }
  }
  sol.s = s;
  sol.residual_norm = (A * s - y).norm();
  return sol;
}

inline Eigen::VectorXd recover_field(const RepresentationBasis& basis, const Eigen::VectorXd& s) {
  if (s.size() != basis.psi.cols()) throw std::invalid_argument("recover_field: length mismatch");
  return basis.psi * s;
}

}  // namespace csr
