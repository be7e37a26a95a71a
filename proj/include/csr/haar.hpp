#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace csr {

struct Segment {
  int start = 0;
  int size = 0;
  bool operator==(const Segment&) const = default;
};

// Dyadic hierarchy over positions 0..n-1. levels[0] is the single coarsest
// segment, levels[l_max] the n singletons. Coarsening pairs consecutive
// segments left to right; an odd trailing segment is promoted unchanged and
// produces no detail coefficient at that level.
struct HierarchicalPartition {
  int n = 0;
  std::vector<std::vector<Segment>> levels;

  int l_max() const { return static_cast<int>(levels.size()) - 1; }
  // Number of merged pairs when stepping from level l+1 to level l.
  int pairs_at(int l) const { return static_cast<int>(levels[l + 1].size()) / 2; }
  bool promoted_at(int l) const { return levels[l + 1].size() % 2 != 0; }
  int approx_dim(int l) const { return static_cast<int>(levels[l].size()); }
  int detail_dim(int l) const { return pairs_at(l); }
};

inline HierarchicalPartition dyadic_partition(int n) {
  if (n < 1) throw std::invalid_argument("dyadic_partition: n must be >= 1");
  std::vector<std::vector<Segment>> levels;
  std::vector<Segment> cur(n);
  for (int i = 0; i < n; ++i) cur[i] = {i, 1};
  levels.push_back(cur);
  while (cur.size() > 1) {
    std::vector<Segment> up;
    for (std::size_t i = 0; i + 1 < cur.size(); i += 2)
      up.push_back({cur[i].start, cur[i].size + cur[i + 1].size});
    if (cur.size() % 2 != 0) up.push_back(cur.back());
    levels.push_back(up);
    cur = up;
  }
  std::reverse(levels.begin(), levels.end());
  return {n, levels};
}

// One unbalanced-Haar analysis step: from the level-(l+1) approximation
// vector to (approx at level l, details at level l). Each pair is a planar
// rotation, so the cascade is orthonormal. Approximation coefficients carry
// segment_sum / sqrt(segment_size); for singletons that is the sample
// itself.
inline void ht_step(const HierarchicalPartition& part, int l, const Eigen::VectorXd& child_approx,
                    Eigen::VectorXd& approx, Eigen::VectorXd& detail) {
  const auto& children = part.levels[l + 1];
  if (child_approx.size() != static_cast<int>(children.size()))
    throw std::invalid_argument("ht_step: approximation length mismatch");
  const int pairs = part.pairs_at(l);
  approx.resize(part.approx_dim(l));
  detail.resize(pairs);
  for (int i = 0; i < pairs; ++i) {
    const double n1 = children[2 * i].size;
    const double n2 = children[2 * i + 1].size;
    const double c = std::sqrt(n1 / (n1 + n2));
    const double s = std::sqrt(n2 / (n1 + n2));
    approx[i] = c * child_approx[2 * i] + s * child_approx[2 * i + 1];
    detail[i] = s * child_approx[2 * i] - c * child_approx[2 * i + 1];
  }
  if (part.promoted_at(l)) approx[pairs] = child_approx[children.size() - 1];
}

inline Eigen::VectorXd ht_unstep(const HierarchicalPartition& part, int l,
                                 const Eigen::VectorXd& approx, const Eigen::VectorXd& detail) {
  const auto& children = part.levels[l + 1];
  if (approx.size() != part.approx_dim(l) || detail.size() != part.detail_dim(l))
    throw std::invalid_argument("ht_unstep: coefficient length mismatch");
  Eigen::VectorXd child(children.size());
  const int pairs = part.pairs_at(l);
  for (int i = 0; i < pairs; ++i) {
    const double n1 = children[2 * i].size;
    const double n2 = children[2 * i + 1].size;
    const double c = std::sqrt(n1 / (n1 + n2));
    const double s = std::sqrt(n2 / (n1 + n2));
    // The pair rotation [[c, s], [s, -c]] is its own inverse.
    child[2 * i] = c * approx[i] + s * detail[i];
    child[2 * i + 1] = s * approx[i] - c * detail[i];
  }
  if (part.promoted_at(l)) child[children.size() - 1] = approx[pairs];
  return child;
}

struct HaarCoeffs {
  Eigen::VectorXd approx0;                 // coarsest approximation block
  std::vector<Eigen::VectorXd> details;    // details[l], l = 0..l_max-1
};

inline HaarCoeffs haar_forward(const HierarchicalPartition& part, const Eigen::VectorXd& x) {
  if (x.size() != part.n) throw std::invalid_argument("haar_forward: length mismatch");
  HaarCoeffs out;
  out.details.resize(std::max(part.l_max(), 0));
  Eigen::VectorXd a = x;
  for (int l = part.l_max() - 1; l >= 0; --l) {
    Eigen::VectorXd next, d;
    ht_step(part, l, a, next, d);
    out.details[l] = d;
    a = next;
  }
  out.approx0 = a;
  return out;
}

inline Eigen::VectorXd haar_inverse(const HierarchicalPartition& part, const HaarCoeffs& c) {
  Eigen::VectorXd a = c.approx0;
  for (int l = 0; l < part.l_max(); ++l) a = ht_unstep(part, l, a, c.details[l]);
  return a;
}

// Fixed coefficient layout: [approx block at the coarsest level, then the
// detail blocks from coarsest to finest].
inline Eigen::VectorXd flatten_coeffs(const HierarchicalPartition& part, const HaarCoeffs& c) {
  Eigen::VectorXd s(part.n);
  int off = 0;
  s.segment(off, c.approx0.size()) = c.approx0;
  off += static_cast<int>(c.approx0.size());
  for (const auto& d : c.details) {
    s.segment(off, d.size()) = d;
    off += static_cast<int>(d.size());
  }
  return s;
}

inline HaarCoeffs unflatten_coeffs(const HierarchicalPartition& part, const Eigen::VectorXd& s) {
  if (s.size() != part.n) throw std::invalid_argument("unflatten_coeffs: length mismatch");
  HaarCoeffs c;
  int off = 0;
  c.approx0 = s.segment(off, part.approx_dim(0));
  off += part.approx_dim(0);
  c.details.resize(std::max(part.l_max(), 0));
  for (int l = 0; l < part.l_max(); ++l) {
    c.details[l] = s.segment(off, part.detail_dim(l));
    off += part.detail_dim(l);
  }
  return c;
}

}  // namespace csr
