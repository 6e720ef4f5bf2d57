#pragma once

#include <algorithm>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "core.hpp"

namespace semideg {

inline Vec eigenvalues(const Mat& m) {
  Eigen::ComplexEigenSolver<Mat> es(m, false);
  if (es.info() != Eigen::Success) throw DegenerateSpectrum("eigensolver failed");
  return es.eigenvalues();
}

// best pairing of two small multisets; brute force over permutations (N <= 8 here)
inline std::vector<int> match_order(const Vec& values, const Vec& targets) {
  const int n = static_cast<int>(values.size());
  if (targets.size() != n) throw InvalidArgument("match_order: size mismatch");
  std::vector<int> p(n), best;
  std::iota(p.begin(), p.end(), 0);
  double best_err = 1e300;
  do {
    double e = 0;
    for (int i = 0; i < n; ++i) e = std::max(e, std::abs(values(p[i]) - targets(i)));
    if (e < best_err) best_err = e, best = p;
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

inline double multiset_distance(const Vec& a, const Vec& b) {
  auto p = match_order(a, b);
  double e = 0;
  for (int i = 0; i < static_cast<int>(p.size()); ++i) e = std::max(e, std::abs(a(p[i]) - b(i)));
  return e;
}

inline Mat checked_inverse(const Mat& m, const char* what) {
  Eigen::FullPivLU<Mat> lu(m);
  double scale = std::max(1.0, max_abs(m));
  lu.setThreshold(1e-13);
  if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-300 * scale)
    throw SingularMatrix(std::string(what) + " is not invertible");
  return lu.inverse();
}

struct Eig {
  Vec values;
  Mat left;  // rows are left eigenvectors: left.row(k) * M = values(k) * left.row(k)
};

// left eigensystem, rows reordered so values(k) ~ targets(k)
inline Eig left_eigen(const Mat& m, const Vec& targets) {
  Eigen::ComplexEigenSolver<Mat> es(m.transpose());
  if (es.info() != Eigen::Success) throw EigenvectorMatchFailure("eigensolver failed");
  auto p = match_order(es.eigenvalues(), targets);
  Eig out{Vec(m.rows()), Mat(m.rows(), m.cols())};
  for (int k = 0; k < static_cast<int>(p.size()); ++k) {
    out.values(k) = es.eigenvalues()(p[k]);
    out.left.row(k) = es.eigenvectors().col(p[k]).transpose();
  }
  return out;
}

inline Mat product(const std::vector<Mat>& ms) {
  Mat p = Mat::Identity(ms.at(0).rows(), ms.at(0).cols());
  for (const auto& m : ms) p = p * m;
  return p;
}

// Fix the diagonal conjugation freedom: afterwards the first column of the
// first matrix is all ones.  Two reps equal up to diagonal conjugation become
// literally equal.
inline std::vector<Mat> diagonal_gauge(const std::vector<Mat>& ms) {
  const Mat& m0 = ms.at(0);
  const int n = static_cast<int>(m0.rows());
  Vec d = Vec::Ones(n);
  for (int i = 1; i < n; ++i) {
    if (std::abs(m0(i, 0)) < 1e-12 * std::max(1.0, max_abs(m0)))
      throw EigenvectorMatchFailure("diagonal gauge: vanishing first-column entry");
    d(i) = 1.0 / m0(i, 0);
  }
  Vec di = d.cwiseInverse();
  std::vector<Mat> out;
  for (const auto& m : ms) out.push_back(d.asDiagonal() * m * di.asDiagonal());
  return out;
}

inline double rep_distance(const std::vector<Mat>& a, const std::vector<Mat>& b) {
  if (a.size() != b.size()) throw InvalidArgument("rep_distance: length mismatch");
  double e = 0;
  for (std::size_t k = 0; k < a.size(); ++k) e = std::max(e, max_abs(a[k] - b[k]));
  return e;
}

// Distance between a and b up to a diagonal conjugation b ~ D a D^{-1}, relative to
// max(1, |b|).  d_i/d_0 is read off the largest entry (i,0) or (0,i) over all matrices,
// which keeps the estimate well conditioned.
inline double rep_distance_diag(const std::vector<Mat>& a, const std::vector<Mat>& b) {
  if (a.size() != b.size() || a.empty()) throw InvalidArgument("rep_distance_diag: length mismatch");
  const auto n = a[0].rows();
  Vec d = Vec::Ones(n);
  for (Eigen::Index i = 1; i < n; ++i) {
    double best = -1;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (std::abs(a[k](i, 0)) > best) best = std::abs(a[k](i, 0)), d(i) = b[k](i, 0) / a[k](i, 0);
      if (std::abs(a[k](0, i)) > best) best = std::abs(a[k](0, i)), d(i) = a[k](0, i) / b[k](0, i);
    }
    if (!(best > 0) || !finite(d(i))) throw EigenvectorMatchFailure("rep_distance_diag: no usable entries");
  }
  Vec di = d.cwiseInverse();
  double e = 0, scale = 1.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    e = std::max(e, max_abs(d.asDiagonal() * a[k] * di.asDiagonal() - b[k]));
    scale = std::max(scale, max_abs(b[k]));
  }
  return e / scale;
}

}  // namespace semideg
