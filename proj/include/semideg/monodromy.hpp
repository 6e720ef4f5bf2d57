#pragma once

#include <vector>

#include "companion.hpp"
#include "fusion.hpp"
#include "linalg.hpp"

namespace semideg {

struct SemiDegParams {
  int n = 3;
  int N = 2;
  ThetaVector theta0;
  ThetaVector theta_inf;
  std::vector<cplx> a;             // a_1 .. a_{n-2}
  std::vector<ThetaVector> sigma;  // sigma_1 .. sigma_{n-3}
  std::vector<Vec> r;              // diag(R_1) .. diag(R_{n-2})

  // S_0 = theta0, S_k = sigma_k, S_{n-2} = -theta_inf
  std::vector<ThetaVector> chain() const {
    std::vector<ThetaVector> s{theta0};
    for (const auto& x : sigma) s.push_back(x);
    s.push_back(-theta_inf);
    return s;
  }

  void validate(bool need_r = true) const {
    if (n < 3) throw InvalidArgument("n >= 3 required");
    if (N < 2) throw InvalidArgument("N >= 2 required");
    if (theta0.size() != N || theta_inf.size() != N) throw InvalidArgument("theta vectors must have length N");
    require_traceless(theta0, "theta0");
    require_traceless(theta_inf, "theta_inf");
    if (static_cast<int>(a.size()) != n - 2) throw InvalidArgument("need n-2 charges a");
    if (static_cast<int>(sigma.size()) != n - 3) throw InvalidArgument("need n-3 intermediate sigma");
    for (const auto& s : sigma) {
      if (s.size() != N) throw InvalidArgument("sigma must have length N");
      require_traceless(s, "sigma");
    }
    if (need_r) {
      if (static_cast<int>(r.size()) != n - 2) throw InvalidArgument("need n-2 gauge vectors r");
      for (const auto& x : r) {
        if (x.size() != N) throw InvalidArgument("r must have length N");
        for (Eigen::Index j = 0; j < N; ++j)
          if (std::abs(x(j)) < 1e-300) throw InvalidArgument("r entries must be nonzero");
      }
    }
  }
};

using FourierMomenta = std::vector<ThetaVector>;  // beta_1 .. beta_{n-3}

struct MonodromyRep {
  std::vector<Mat> M;  // M_0 .. M_{n-1}

  double cyclic_defect() const {
    const auto N = M.at(0).rows();
    return max_abs(product(M) - Mat::Identity(N, N));
  }

  // scaled by the size of the factors; meaningful when the entries are large
  double relative_cyclic_defect() const {
    double scale = 1.0;
    for (const auto& m : M) scale *= std::max(1.0, max_abs(m));
    return cyclic_defect() / scale;
  }
};

namespace detail {

inline MonodromyRep from_partials(const std::vector<Mat>& Mk) {
  MonodromyRep rep;
  rep.M.push_back(Mk[0]);
  for (std::size_t k = 1; k < Mk.size(); ++k)
    rep.M.push_back(checked_inverse(Mk[k - 1], "M_[k]") * Mk[k]);
  rep.M.push_back(checked_inverse(Mk.back(), "M_[n-2]"));
  return rep;
}

}  // namespace detail

inline MonodromyRep assemble_monodromy(const SemiDegParams& p) {
  p.validate();
  const int n = p.n, N = p.N;
  auto S = p.chain();
  std::vector<Mat> W(n - 1);
  for (int m = 1; m <= n - 2; ++m) W[m] = build_Wm(S[m - 1], S[m], p.a[m - 1]);
  std::vector<Mat> Mk;
  for (int k = 0; k <= n - 2; ++k) {
    Mat Wk = k == 0 ? Mat(Mat::Identity(N, N)) : diag(p.r[k - 1]);
    for (int m = k + 1; m <= n - 2; ++m) Wk = Wk * W[m] * diag(p.r[m - 1]);
    Mk.push_back(checked_inverse(Wk, "W_[k]") * exp2pi(S[k]) * Wk);
  }
  return detail::from_partials(Mk);
}

inline MonodromyRep cft_side_monodromy(const SemiDegParams& p, const FourierMomenta& beta) {
  p.validate(false);
  const int n = p.n;
  if (static_cast<int>(beta.size()) != n - 3) throw InvalidArgument("need n-3 Fourier momenta");
  auto S = p.chain();
  std::vector<Mat> Mk;
  for (int k = 0; k <= n - 2; ++k) {
    Mat V = braiding_B(-p.theta_inf);
    for (int m = n - 2; m > k; --m) {
      V = V * fusion_F_inv(S[m], p.a[m - 1] - 1.0, S[m - 1]);
      if (m - 1 > k) V = V * diag(expv(beta[m - 2], -1.0));
    }
    Mk.push_back(V * exp2pi(S[k]) * checked_inverse(V, "V_[k]"));
  }
  return detail::from_partials(Mk);
}

// R_k = Y_k^{-1} H_k X_{k+1} (k <= n-3), R_{n-2} = Y_{n-2}^{-1} B(theta_inf); each normalized to det 1
inline SemiDegParams beta_to_r(const SemiDegParams& p, const FourierMomenta& beta) {
  p.validate(false);
  const int n = p.n, N = p.N;
  if (static_cast<int>(beta.size()) != n - 3) throw InvalidArgument("need n-3 Fourier momenta");
  auto S = p.chain();
  SemiDegParams out = p;
  out.r.clear();
  for (int k = 1; k <= n - 2; ++k) {
    Vec y = xy_diagonals(S[k - 1], S[k], p.a[k - 1]).second.diagonal();
    Vec d;
    if (k <= n - 3) {
      Vec x = xy_diagonals(S[k], S[k + 1], p.a[k]).first.diagonal();
      d = y.cwiseInverse().cwiseProduct(expv(beta[k - 1], 1.0)).cwiseProduct(x);
    } else {
      d = y.cwiseInverse().cwiseProduct(expv(p.theta_inf, I * pi));
    }
    cplx det = d.prod();
    d /= std::pow(det, 1.0 / N);
    out.r.push_back(d);
  }
  return out;
}

// spectra the semi-degenerate rep must carry, in the order M_0 .. M_{n-1}
inline std::vector<Vec> expected_spectra(const SemiDegParams& p) {
  std::vector<Vec> out{expv(p.theta0, 2.0 * pi * I)};
  for (auto a : p.a) out.push_back(expv(special_theta(a, p.N), 2.0 * pi * I));
  out.push_back(expv(p.theta_inf, 2.0 * pi * I));
  return out;
}

inline double spectrum_defect(const MonodromyRep& rep, const std::vector<Vec>& spectra) {
  double e = 0;
  for (std::size_t k = 0; k < rep.M.size(); ++k)
    e = std::max(e, multiset_distance(eigenvalues(rep.M[k]), spectra.at(k)));
  return e;
}

}  // namespace semideg
