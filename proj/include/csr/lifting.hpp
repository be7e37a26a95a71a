#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csr/haar.hpp"

namespace csr {

// Lifted unbalanced-Haar wavelets. At each level l the Haar stage produces
// (a~, d~) from the level-(l+1) approximations; lifting then applies
//   a_l = a~ + U_l d~
//   d_l = d~ - P_l a_l
// which is structurally invertible for any U_l, P_l.
struct LiftedWavelets {
  HierarchicalPartition partition;
  std::vector<Eigen::MatrixXd> update_ops;   // U_l: approx_dim(l) x detail_dim(l)
  std::vector<Eigen::MatrixXd> predict_ops;  // P_l: detail_dim(l) x approx_dim(l)

  void check_shapes() const {
    const int L = partition.l_max();
    if (static_cast<int>(update_ops.size()) != L || static_cast<int>(predict_ops.size()) != L)
      throw std::invalid_argument("LiftedWavelets: operator count mismatch");
    for (int l = 0; l < L; ++l) {
      if (update_ops[l].rows() != partition.approx_dim(l) ||
          update_ops[l].cols() != partition.detail_dim(l) ||
          predict_ops[l].rows() != partition.detail_dim(l) ||
          predict_ops[l].cols() != partition.approx_dim(l))
        throw std::invalid_argument("LiftedWavelets: operator shape mismatch at level " +
                                    std::to_string(l));
    }
  }
};

inline LiftedWavelets zero_lifting(const HierarchicalPartition& part) {
  LiftedWavelets w;
  w.partition = part;
  for (int l = 0; l < part.l_max(); ++l) {
    w.update_ops.emplace_back(Eigen::MatrixXd::Zero(part.approx_dim(l), part.detail_dim(l)));
    w.predict_ops.emplace_back(Eigen::MatrixXd::Zero(part.detail_dim(l), part.approx_dim(l)));
  }
  return w;
}

inline Eigen::VectorXd lift_forward(const LiftedWavelets& w, const Eigen::VectorXd& x) {
  const auto& part = w.partition;
  if (x.size() != part.n) throw std::invalid_argument("lift_forward: length mismatch");
  HaarCoeffs c;
  c.details.resize(std::max(part.l_max(), 0));
  Eigen::VectorXd a = x;
  for (int l = part.l_max() - 1; l >= 0; --l) {
    Eigen::VectorXd at, dt;
    ht_step(part, l, a, at, dt);
    a = at + w.update_ops[l] * dt;
    c.details[l] = dt - w.predict_ops[l] * a;
  }
  c.approx0 = a;
  return flatten_coeffs(part, c);
}

inline Eigen::VectorXd lift_inverse(const LiftedWavelets& w, const Eigen::VectorXd& s) {
  const auto& part = w.partition;
  HaarCoeffs c = unflatten_coeffs(part, s);
  Eigen::VectorXd a = c.approx0;
  for (int l = 0; l < part.l_max(); ++l) {
    const Eigen::VectorXd dt = c.details[l] + w.predict_ops[l] * a;
    const Eigen::VectorXd at = a - w.update_ops[l] * dt;
    a = ht_unstep(part, l, at, dt);
  }
  return a;
}

namespace detail {

inline double sparse_penalty(const Eigen::VectorXd& d, double epsilon) {
  double f = 0.0;
  for (int i = 0; i < d.size(); ++i) f += std::sqrt(d[i] * d[i] + epsilon);
  return f;
}

}  // namespace detail

// Greedy per-level training of the lifting operators, finest level first.
// Each level minimizes the smooth sparse penalty sum_n sum_j
// sqrt(d_j^2 + epsilon) of its lifted details over the training set by
// full-batch gradient descent from U = P = 0, with step halving whenever a
// step would increase the objective.
inline LiftedWavelets train_lifting(const HierarchicalPartition& part,
                                    const std::vector<Eigen::VectorXd>& training_fields,
                                    double epsilon = 25.0, double step = 0.1, int iters = 2000) {
  if (training_fields.empty()) throw std::invalid_argument("train_lifting: no training fields");
  if (!(epsilon > 0.0)) throw std::invalid_argument("train_lifting: epsilon must be > 0");
  if (iters < 1) throw std::invalid_argument("train_lifting: iters must be >= 1");
  for (const auto& f : training_fields)
    if (f.size() != part.n) throw std::invalid_argument("train_lifting: field length mismatch");

  LiftedWavelets w = zero_lifting(part);
  std::vector<Eigen::VectorXd> approx(training_fields.begin(), training_fields.end());

  for (int l = part.l_max() - 1; l >= 0; --l) {
    const int n_train = static_cast<int>(approx.size());
    std::vector<Eigen::VectorXd> at(n_train), dt(n_train);
    for (int n = 0; n < n_train; ++n) ht_step(part, l, approx[n], at[n], dt[n]);

    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(part.approx_dim(l), part.detail_dim(l));
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(part.detail_dim(l), part.approx_dim(l));

    auto objective = [&](const Eigen::MatrixXd& u, const Eigen::MatrixXd& p) {
      double f = 0.0;
      for (int n = 0; n < n_train; ++n) {
        const Eigen::VectorXd a = at[n] + u * dt[n];
        f += detail::sparse_penalty(dt[n] - p * a, epsilon);
      }
      return f;
    };

    double f_cur = objective(U, P);
    double t = step;
    for (int it = 0; it < iters; ++it) {
      Eigen::MatrixXd gU = Eigen::MatrixXd::Zero(U.rows(), U.cols());
      Eigen::MatrixXd gP = Eigen::MatrixXd::Zero(P.rows(), P.cols());
      for (int n = 0; n < n_train; ++n) {
        const Eigen::VectorXd a = at[n] + U * dt[n];
        const Eigen::VectorXd d = dt[n] - P * a;
        Eigen::VectorXd g(d.size());
        for (int j = 0; j < d.size(); ++j) g[j] = d[j] / std::sqrt(d[j] * d[j] + epsilon);
        gP.noalias() -= g * a.transpose();
        gU.noalias() -= (P.transpose() * g) * dt[n].transpose();
      }
      if (!gU.allFinite() || !gP.allFinite())
        throw std::runtime_error("training diverged at level " + std::to_string(l));

      bool accepted = false;
      for (int halvings = 0; halvings < 60; ++halvings) {
        const Eigen::MatrixXd Un = U - t * gU;
        const Eigen::MatrixXd Pn = P - t * gP;
        const double f_new = objective(Un, Pn);
        if (f_new <= f_cur) {
          U = Un;
          P = Pn;
          f_cur = f_new;
          t *= 1.2;
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) break;  // step underflow: converged at this level
    }

    w.update_ops[l] = U;
    w.predict_ops[l] = P;
    for (int n = 0; n < n_train; ++n) approx[n] = at[n] + U * dt[n];
  }
  return w;
}

}  // namespace csr
