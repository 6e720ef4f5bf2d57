#pragma once

#include <utility>
#include <vector>

#include "core.hpp"

namespace semideg {

// a*((N-1)/N, -1/N, ..., -1/N)
inline ThetaVector special_theta(cplx a, int N) {
  if (N < 2) throw InvalidArgument("special_theta: N >= 2 required");
  return a * weight_h(N, 0);
}

inline int moduli_dimension(const std::vector<std::vector<int>>& types, int N) {
  const int n = static_cast<int>(types.size());
  long long d = static_cast<long long>(n - 2) * N * N + 2;
  for (const auto& part : types) {
    int s = 0;
    for (int x : part) {
      if (x <= 0) throw InvalidPartition("partition entries must be positive");
      s += x;
      d -= static_cast<long long>(x) * x;
    }
    if (s != N) throw InvalidPartition("partition does not sum to N=" + std::to_string(N));
  }
  return static_cast<int>(d);
}

namespace detail {

// e_0..e_N of the given roots
inline std::vector<cplx> elementary_symmetric(const Vec& r) {
  std::vector<cplx> e(r.size() + 1, 0.0);
  e[0] = 1.0;
  for (Eigen::Index i = 0; i < r.size(); ++i)
    for (Eigen::Index k = i + 1; k >= 1; --k) e[k] += e[k - 1] * r(i);
  return e;
}

inline Mat companion(const Vec& r) {
  const int N = static_cast<int>(r.size());
  auto e = elementary_symmetric(r);
  Mat m = Mat::Zero(N, N);
  for (int i = 1; i < N; ++i) m(i, i - 1) = 1.0;
  // last column ((-1)^{N+1} e_N, (-1)^N e_{N-1}, ..., e_1)
  for (int i = 0; i < N; ++i) m(i, N - 1) = ((N - i + 1) % 2 == 0 ? 1.0 : -1.0) * e[N - i];
  return m;
}

inline void require_distinct(const Vec& v, const char* what, double tol = 1e-10) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    for (Eigen::Index j = i + 1; j < v.size(); ++j)
      if (std::abs(v(i) - v(j)) < tol) throw DegenerateSpectrum(std::string(what) + " has coincident entries");
}

}  // namespace detail

inline std::pair<Mat, Mat> katz_companion_pair(const Vec& alpha, const Vec& beta) {
  if (alpha.size() != beta.size()) throw InvalidArgument("katz_companion_pair: size mismatch");
  detail::require_distinct(alpha, "alpha");
  detail::require_distinct(beta, "beta");
  for (Eigen::Index i = 0; i < alpha.size(); ++i)
    for (Eigen::Index j = 0; j < beta.size(); ++j)
      if (std::abs(alpha(i) - beta(j)) < 1e-10) throw SpectrumCollision("alpha and beta share " + fmt(alpha(i)));
  return {detail::companion(alpha), detail::companion(beta)};
}

// (W_B W_A^{-1})_{kl} = prod_{s != l} (beta_k - alpha_s)/(alpha_l - alpha_s)
inline Mat vandermonde_connection(const Vec& alpha, const Vec& beta) {
  const Eigen::Index N = alpha.size();
  if (beta.size() != N) throw InvalidArgument("vandermonde_connection: size mismatch");
  detail::require_distinct(alpha, "alpha", 1e-12);
  Mat w(N, N);
  for (Eigen::Index k = 0; k < N; ++k)
    for (Eigen::Index l = 0; l < N; ++l) {
      cplx p = 1.0;
      for (Eigen::Index s = 0; s < N; ++s)
        if (s != l) p *= (beta(k) - alpha(s)) / (alpha(l) - alpha(s));
      w(k, l) = p;
    }
  return w;
}

inline Mat build_Wm(const ThetaVector& sigma_prev, const ThetaVector& sigma_cur, cplx a_m) {
  const int N = static_cast<int>(sigma_cur.size());
  Vec cur = expv(sigma_cur, 2.0 * pi * I);
  Vec prev = expv(sigma_prev.array() - a_m / double(N), 2.0 * pi * I);
  try {
    return vandermonde_connection(cur, prev);
  } catch (const DegenerateSpectrum&) {
    throw DegenerateSpectrum("exp(2 pi i sigma) has coincident entries");
  }
}

}  // namespace semideg
