#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "fusion.hpp"
#include "linalg.hpp"
#include "monodromy.hpp"

namespace semideg {

using RootLatticeVector = std::vector<int>;

struct TauSeriesParams {
  ThetaVector theta0, theta_inf;
  cplx a_t = 0.0, a_1 = 0.0;
  ThetaVector sigma, beta;
  int cutoff = 8;  // max |w|^2

  int N() const { return static_cast<int>(sigma.size()); }
};

enum class TauOrder { leading, roots };

inline int norm_sq(const RootLatticeVector& w) {
  int s = 0;
  for (int x : w) s += x * x;
  return s;
}

inline std::vector<RootLatticeVector> enumerate_roots(int N, int max_norm_sq) {
  if (N < 2) throw InvalidArgument("enumerate_roots: N >= 2");
  if (max_norm_sq < 0) throw InvalidArgument("enumerate_roots: negative bound");
  const int b = static_cast<int>(std::floor(std::sqrt(double(max_norm_sq))));
  std::vector<RootLatticeVector> out;
  RootLatticeVector w(N, 0);
  // the last component is fixed by the zero sum
  auto rec = [&](auto&& self, int i, int sum, int nsq) -> void {
    if (nsq > max_norm_sq) return;
    if (i == N - 1) {
      w[i] = -sum;
      if (nsq + sum * sum <= max_norm_sq) out.push_back(w);
      return;
    }
    for (int x = -b; x <= b; ++x) {
      w[i] = x;
      self(self, i + 1, sum + x, nsq + x * x);
    }
  };
  rec(rec, 0, 0, 0);
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    int nx = norm_sq(x), ny = norm_sq(y);
    return nx != ny ? nx < ny : x < y;
  });
  return out;
}

inline Vec lattice_vec(const RootLatticeVector& w) {
  Vec v(static_cast<Eigen::Index>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) v(static_cast<Eigen::Index>(i)) = double(w[i]);
  return v;
}

inline RootLatticeVector root(int N, int i, int j) {
  RootLatticeVector w(N, 0);
  w[i] += 1;
  w[j] -= 1;
  return w;
}

inline cplx log_structure_constant_C(const TauSeriesParams& p, const Vec& sigma, const Vec& w) {
  auto ln = [](const Vec& sp, cplx a, const Vec& s) {
    try {
      return log_norm_N(sp, a, s);
    } catch (const BarnesPole& e) {
      throw NormPole(e.what());
    }
  };
  Vec sw = sigma + w;
  return ln(-p.theta_inf, p.a_1, sw) + ln(sw, p.a_t, p.theta0) - ln(-p.theta_inf, p.a_1, sigma) -
         ln(sigma, p.a_t, p.theta0);
}

inline cplx structure_constant_C(const TauSeriesParams& p, const RootLatticeVector& w) {
  if (static_cast<int>(w.size()) != p.N()) throw InvalidArgument("lattice vector has wrong length");
  int s = 0;
  for (int x : w) s += x;
  if (s != 0) throw InvalidArgument("lattice vector must sum to zero");
  return std::exp(log_structure_constant_C(p, p.sigma, lattice_vec(w)));
}

inline cplx tau_exponent(const TauSeriesParams& p) {
  const int N = p.N();
  const double h1sq = (N - 1.0) / N;
  return 0.5 * ((p.sigma.cwiseProduct(p.sigma)).sum() - (p.theta0.cwiseProduct(p.theta0)).sum() -
                p.a_t * p.a_t * h1sq);
}

namespace detail {

struct RootTerm {
  cplx coef;  // C(sigma, h_i - h_j) e^{beta_i - beta_j}
  cplx pw;    // 1 + sigma_i - sigma_j
};

inline std::vector<RootTerm> root_terms(const TauSeriesParams& p) {
  const int N = p.N();
  std::vector<RootTerm> out;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      cplx c = std::exp(log_structure_constant_C(p, p.sigma, lattice_vec(root(N, i, j))) + p.beta(i) - p.beta(j));
      out.push_back({c, 1.0 + p.sigma(i) - p.sigma(j)});
    }
  return out;
}

}  // namespace detail

inline cplx log_tau_asymptotics(const TauSeriesParams& p, cplx t, TauOrder order = TauOrder::roots) {
  cplx lt = std::log(t);
  cplx v = tau_exponent(p) * lt;
  if (order == TauOrder::leading) return v;
  cplx s = 1.0;
  for (const auto& r : detail::root_terms(p)) s += r.coef * std::exp(r.pw * lt);
  return v + std::log(s);
}

inline cplx tau_asymptotics(const TauSeriesParams& p, cplx t, TauOrder order = TauOrder::roots) {
  return std::exp(log_tau_asymptotics(p, t, order));
}

// d log tau / dt of the asymptotic form, analytic
inline cplx tau_asymptotics_logderiv(const TauSeriesParams& p, cplx t, TauOrder order = TauOrder::roots) {
  cplx v = tau_exponent(p) / t;
  if (order == TauOrder::leading) return v;
  cplx lt = std::log(t), s = 1.0, ds = 0.0;
  for (const auto& r : detail::root_terms(p)) {
    cplx e = r.coef * std::exp(r.pw * lt);
    s += e;
    ds += e * r.pw / t;
  }
  return v + ds / s;
}

// central difference of log tau, step h|t|
inline cplx tau_asymptotics_logderiv_fd(const TauSeriesParams& p, cplx t, TauOrder order = TauOrder::roots,
                                        double h = 1e-4) {
  cplx dt = h * t;
  return (log_tau_asymptotics(p, t + dt, order) - log_tau_asymptotics(p, t - dt, order)) / (2.0 * dt);
}

// t^{exponent} sum_w C(sigma, w) e^{(beta, w)} t^{w^2/2 + (sigma, w)} over the given lattice vectors
inline cplx tau_lattice_sum(const TauSeriesParams& p, cplx t, const std::vector<RootLatticeVector>& ws) {
  cplx lt = std::log(t), s = 0.0;
  for (const auto& w : ws) {
    Vec v = lattice_vec(w);
    cplx e = log_structure_constant_C(p, p.sigma, v) + p.beta.cwiseProduct(v).sum() +
             (0.5 * double(norm_sq(w)) + p.sigma.cwiseProduct(v).sum()) * lt;
    s += std::exp(e);
  }
  return std::exp(tau_exponent(p) * lt) * s;
}

// sigma - w with w the root-lattice point nearest to Re sigma; the band condition
// |Re sigma_i - Re sigma_j| <= 1 then holds (Voronoi cell of A_{N-1})
inline std::pair<ThetaVector, RootLatticeVector> sigma_normalize(const ThetaVector& sigma) {
  const int N = static_cast<int>(sigma.size());
  if (std::abs(sigma.sum()) > 1e-9) throw NormalizationFailure("sigma is not traceless");
  std::vector<int> lo(N), hi(N);
  for (int i = 0; i < N; ++i) {
    lo[i] = static_cast<int>(std::floor(sigma(i).real())) - 1;
    hi[i] = static_cast<int>(std::ceil(sigma(i).real())) + 1;
  }
  RootLatticeVector w(N), best;
  double best_d = 1e300;
  auto rec = [&](auto&& self, int i, int sum) -> void {
    if (i == N - 1) {
      w[i] = -sum;
      if (w[i] < lo[i] || w[i] > hi[i]) return;
      double d = 0;
      for (int k = 0; k < N; ++k) d += std::pow(sigma(k).real() - w[k], 2);
      if (d < best_d - 1e-12 || (std::abs(d - best_d) <= 1e-12 && w < best)) best_d = d, best = w;
      return;
    }
    for (int x = lo[i]; x <= hi[i]; ++x) {
      w[i] = x;
      self(self, i + 1, sum + x);
    }
  };
  rec(rec, 0, 0);
  if (best.empty()) throw NormalizationFailure("no lattice shift found");
  Vec out = sigma - lattice_vec(best);
  double band = out.real().maxCoeff() - out.real().minCoeff();
  if (band > 1.0 + 1e-9) throw NormalizationFailure("band condition fails after shift");
  return {out, best};
}

struct Extraction {
  TauSeriesParams params;
  MonodromyRep gauged;   // input rep conjugated into the parameterization's basis
  double roundtrip = 0;  // distance to cft_side_monodromy(params), up to diagonal conjugation
};

namespace detail {

inline bool all_diagonal(const MonodromyRep& rep) {
  for (const auto& m : rep.M)
    if (max_abs(m - Mat(m.diagonal().asDiagonal())) > 1e-10 * std::max(1.0, max_abs(m))) return false;
  return true;
}

// rows of L are (lambda_k r_k) W_{kl} r'_l: recover r' (up to scale) from the best row
inline Vec rank_one_column_factor(const Mat& L, const Mat& W) {
  const auto N = L.rows();
  Mat ratio = L.cwiseQuotient(W);
  Eigen::Index k0 = 0;
  double best = -1;
  for (Eigen::Index k = 0; k < N; ++k) {
    double m = W.row(k).cwiseAbs().minCoeff() * L.row(k).cwiseAbs().minCoeff();
    if (m > best) best = m, k0 = k;
  }
  if (!(best > 0)) throw EigenvectorMatchFailure("vanishing eigenvector components");
  Vec r = ratio.row(k0).transpose() / ratio(k0, 0);
  // every row must be proportional to r
  for (Eigen::Index k = 0; k < N; ++k) {
    Vec row = ratio.row(k).transpose();
    cplx c = row(0);
    if (max_abs(row - c * r) > 1e-6 * std::max(1e-300, row.cwiseAbs().maxCoeff()))
      throw EigenvectorMatchFailure("eigenvectors do not have the W_[k] shape");
  }
  return r;
}

}  // namespace detail

// n = 4: M_0, M_t, M_1, M_inf  <->  S = (theta0, sigma, -theta_inf), charges (a_t, a_1)
inline Extraction extract_sigma_beta(const MonodromyRep& rep, const SemiDegParams& partial) {
  if (rep.M.size() != 4) throw InvalidArgument("extract_sigma_beta needs an n = 4 rep");
  const int N = partial.N;
  if (partial.a.size() != 2) throw InvalidArgument("need charges (a_t, a_1)");
  if (detail::all_diagonal(rep)) throw EigenvectorMatchFailure("diagonal rep is not generic");
  const Vec& th0 = partial.theta0;
  const Vec& thi = partial.theta_inf;
  const cplx a_t = partial.a[0], a_1 = partial.a[1];

  // basis where M_inf = exp(2 pi i theta_inf)
  Eigen::ComplexEigenSolver<Mat> es(rep.M[3]);
  auto p = match_order(es.eigenvalues(), expv(thi, 2.0 * pi * I));
  Mat V(N, N);
  for (int k = 0; k < N; ++k) V.col(k) = es.eigenvectors().col(p[k]);
  Mat Vi = checked_inverse(V, "M_inf eigenbasis");
  std::vector<Mat> M;
  for (const auto& m : rep.M) M.push_back(Vi * m * V);

  // sigma from Spec(M_0 M_t)
  Mat M01 = M[0] * M[1];
  Eigen::ComplexEigenSolver<Mat> e01(M01.transpose());
  Vec sig(N);
  for (int k = 0; k < N; ++k) sig(k) = std::log(e01.eigenvalues()(k)) / (2.0 * pi * I);
  sig(0) -= std::round(sig.sum().real());
  if (std::abs(sig.sum()) > 1e-6) throw EigenvectorMatchFailure("det(M_0 M_t) != 1");
  sig(0) -= sig.sum();
  sig = sigma_normalize(sig).first;
  std::vector<int> order(N);
  for (int k = 0; k < N; ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    return sig(x).real() != sig(y).real() ? sig(x).real() < sig(y).real() : sig(x).imag() < sig(y).imag();
  });
  Vec sigma(N);
  Mat L(N, N);
  for (int k = 0; k < N; ++k) {
    sigma(k) = sig(order[k]);
    L.row(k) = e01.eigenvectors().col(order[k]).transpose();
  }

  // L = Lambda R_1 W_2 R_2; gauge R_2 into Y_2^{-1} B(theta_inf)
  Mat W2 = build_Wm(sigma, -thi, a_1);
  Vec r2 = detail::rank_one_column_factor(L, W2);
  auto [X2, Y2] = xy_diagonals(sigma, -thi, a_1);
  Vec r2n = Y2.diagonal().cwiseInverse().cwiseProduct(expv(thi, I * pi));
  r2n /= std::pow(r2n.prod(), 1.0 / N);
  Vec d = r2.cwiseQuotient(r2n);
  Vec di = d.cwiseInverse();
  for (auto& m : M) m = d.asDiagonal() * m * di.asDiagonal();

  // rows of the M_0 left eigenvectors: Lambda_0 W_1 R_1 W_2 R_2
  Eig e0 = left_eigen(M[0], expv(th0, 2.0 * pi * I));
  Mat Q = e0.left * checked_inverse(W2 * r2n.asDiagonal(), "W_2 R_2");
  Mat W1 = build_Wm(th0, sigma, a_t);
  Vec r1 = detail::rank_one_column_factor(Q, W1);

  auto [X1, Y1] = xy_diagonals(th0, sigma, a_t);
  Vec h = Y1.diagonal().cwiseProduct(r1).cwiseQuotient(X2.diagonal());
  h /= std::pow(h.prod(), 1.0 / N);
  Vec beta(N);
  for (int k = 0; k < N; ++k) beta(k) = std::log(h(k));
  beta.array() -= beta.mean();

  Extraction out;
  out.params = TauSeriesParams{th0, thi, a_t, a_1, sigma, beta, 8};
  out.gauged.M = M;
  SemiDegParams full{4, N, th0, thi, {a_t, a_1}, {sigma}, {}};
  out.roundtrip = rep_distance_diag(cft_side_monodromy(full, {beta}).M, M);
  return out;
}

}  // namespace semideg
