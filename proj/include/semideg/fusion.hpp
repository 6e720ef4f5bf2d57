#pragma once

#include <algorithm>
#include <utility>

#include "companion.hpp"
#include "linalg.hpp"
#include "specialfn.hpp"

namespace semideg {

struct FusionContext {
  ThetaVector sigma_in;   // sigma
  ThetaVector sigma_out;  // sigma'
  cplx a;
};

namespace detail {

inline constexpr double sine_floor = 1e-10;

inline cplx sin_pi(cplx z, const char* who) {
  cplx s = std::sin(pi * z);
  if (std::abs(s) < sine_floor) throw SineFactorZero(std::string(who) + ": sin(pi*" + fmt(z) + ") vanishes");
  return s;
}

inline cplx lbarnes_checked(cplx z) {
  try {
    return log_barnes_g(z);
  } catch (const PoleError&) {
    throw BarnesPole("G(" + fmt(z) + ")");
  }
}

inline cplx log_norm(const Vec& sp, cplx a, const Vec& s, double sgn) {
  const Eigen::Index N = s.size();
  cplx v = 0;
  for (Eigen::Index l = 0; l < N; ++l)
    for (Eigen::Index j = 0; j < N; ++j)
      v += sgn > 0 ? lbarnes_checked(1.0 - a / double(N) + s(l) - sp(j))
                   : lbarnes_checked(1.0 + a / double(N) - s(l) + sp(j));
  for (Eigen::Index k = 0; k < N; ++k)
    for (Eigen::Index m = k + 1; m < N; ++m)
      v -= lbarnes_checked(1.0 + s(k) - s(m)) + lbarnes_checked(1.0 - sp(k) + sp(m));
  return v;
}

}  // namespace detail

// log of the 3-point normalization N(sigma', a, sigma)
inline cplx log_norm_N(const ThetaVector& sigma_out, cplx a, const ThetaVector& sigma_in) {
  return detail::log_norm(sigma_out, a, sigma_in, +1);
}
inline cplx log_norm_Ncheck(const ThetaVector& sigma_out, cplx a, const ThetaVector& sigma_in) {
  return detail::log_norm(sigma_out, a, sigma_in, -1);
}
inline cplx norm_N(const ThetaVector& sigma_out, cplx a, const ThetaVector& sigma_in) {
  return std::exp(log_norm_N(sigma_out, a, sigma_in));
}
inline cplx norm_Ncheck(const ThetaVector& sigma_out, cplx a, const ThetaVector& sigma_in) {
  return std::exp(log_norm_Ncheck(sigma_out, a, sigma_in));
}

// F_{lj}(sigma', a, sigma) = prod_{k != l} sin pi((a+1)/N + sigma'_j - sigma_k) / sin pi(sigma_k - sigma_l)
inline Mat fusion_F(const ThetaVector& sp, cplx a, const ThetaVector& s) {
  const int N = static_cast<int>(s.size());
  if (sp.size() != N) throw InvalidArgument("fusion_F: size mismatch");
  Mat f(N, N);
  for (int l = 0; l < N; ++l)
    for (int j = 0; j < N; ++j) {
      cplx p = 1.0;
      for (int k = 0; k < N; ++k)
        if (k != l)
          p *= detail::sin_pi((a + 1.0) / double(N) + sp(j) - s(k), "fusion_F") /
               detail::sin_pi(s(k) - s(l), "fusion_F");
      f(l, j) = p;
    }
  return f;
}

inline Mat fusion_F(const FusionContext& c) { return fusion_F(c.sigma_out, c.a, c.sigma_in); }

// closed-form inverse: F^{-1}(sigma', a, sigma) = F(-sigma, a, -sigma')
inline Mat fusion_F_inv(const ThetaVector& sp, cplx a, const ThetaVector& s) {
  return fusion_F(-s, a, -sp);
}

inline Mat braiding_B(const ThetaVector& s) { return diag(expv(s, I * pi)); }

inline Mat braiding_Bp(const ThetaVector& s) {
  const double N = static_cast<double>(s.size());
  return diag(expv(s.array() - (N - 1) / N, I * pi));
}

// X = diag(x), Y = diag(y) with F(sigma_k, a_k - 1, sigma_{k-1}) = X W_k Y^{-1}
inline std::pair<Mat, Mat> xy_diagonals(const ThetaVector& sprev, const ThetaVector& scur, cplx a) {
  const int N = static_cast<int>(scur.size());
  Vec hat = scur.array() + a / double(N);
  Vec x(N), y(N);
  for (int s = 0; s < N; ++s) {
    cplx xi = std::exp(I * pi * double(N - 1) * sprev(s));
    cplx yi = std::exp(I * pi * double(N - 1) * hat(s));
    for (int m = 0; m < N; ++m) {
      xi *= detail::sin_pi(hat(m) - sprev(s), "xy_diagonals");
      yi *= detail::sin_pi(hat(s) - sprev(m), "xy_diagonals");
      if (m != s) {
        xi *= detail::sin_pi(sprev(m) - sprev(s), "xy_diagonals");
        yi *= detail::sin_pi(hat(m) - hat(s), "xy_diagonals");
      }
    }
    x(s) = 1.0 / xi;
    y(s) = 1.0 / yi;
  }
  return {diag(x), diag(y)};
}

// relative residual used across the identity battery
inline double rel_residual(const Mat& lhs, const Mat& rhs) {
  return max_abs(lhs - rhs) / std::max(1.0, max_abs(rhs));
}

inline double check_FiF(const FusionContext& c) {
  const auto N = c.sigma_in.size();
  return rel_residual(fusion_F(-c.sigma_in, c.a, -c.sigma_out) * fusion_F(c), Mat::Identity(N, N));
}

// shift identities for weights h_m (and the root h_m - h_s), m, s 0-based
inline double check_shift_identities(const FusionContext& c, int m, int s) {
  const int N = static_cast<int>(c.sigma_in.size());
  if (m < 0 || m >= N || s < 0 || s >= N) throw InvalidArgument("shift index out of range");
  const Vec& sp = c.sigma_out;
  const Vec& sg = c.sigma_in;
  const cplx a = c.a;
  Vec hm = weight_h(N, m), root = weight_h(N, m) - weight_h(N, s);
  Mat Dm = sign_D(N, m), DmDs = sign_D(N, m) * sign_D(N, s);
  double r = 0;
  r = std::max(r, rel_residual(fusion_F(sp, a, sg + hm), Dm * fusion_F(sp, a + 1.0, sg)));
  r = std::max(r, rel_residual(fusion_F(sp, a, sg - hm), Dm * fusion_F(sp, a - 1.0, sg)));
  r = std::max(r, rel_residual(fusion_F(sp + hm, a, sg), fusion_F(sp, a - 1.0, sg) * Dm));
  r = std::max(r, rel_residual(fusion_F(sp - hm, a, sg), fusion_F(sp, a + 1.0, sg) * Dm));
  r = std::max(r, rel_residual(fusion_F(sp, a, sg + root), DmDs * fusion_F(sp, a, sg)));
  r = std::max(r, rel_residual(fusion_F(sp + root, a, sg), fusion_F(sp, a, sg) * DmDs));
  return r;
}

// F(sigma_k, a_k - 1, sigma_{k-1}) against X_k W_k Y_k^{-1}
inline double check_FW(const ThetaVector& sprev, const ThetaVector& scur, cplx a) {
  auto [X, Y] = xy_diagonals(sprev, scur, a);
  Mat rhs = X * build_Wm(sprev, scur, a) * Y.diagonal().cwiseInverse().asDiagonal();
  return rel_residual(fusion_F(scur, a - 1.0, sprev), rhs);
}

// C_m B'(-theta + h_m) F^{-1}(-theta + h_m, a, sigma) = -B(-theta) F^{-1}(-theta, a - 1, sigma)
inline double check_FBCFB(const ThetaVector& theta, cplx a, const ThetaVector& sigma, int m) {
  const int N = static_cast<int>(theta.size());
  Mat C = Mat::Identity(N, N);
  if (N % 2 == 1) C(m, m) = -1.0;
  Vec th = -theta + weight_h(N, m);
  Mat lhs = C * braiding_Bp(th) * fusion_F_inv(th, a, sigma);
  Mat rhs = -braiding_B(-theta) * fusion_F_inv(-theta, a - 1.0, sigma);
  return rel_residual(lhs, rhs);
}

}  // namespace semideg
