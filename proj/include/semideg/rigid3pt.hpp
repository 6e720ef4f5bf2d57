#pragma once

#include <utility>
#include <vector>

#include "companion.hpp"
#include "linalg.hpp"
#include "monodromy.hpp"
#include "ode.hpp"
#include "specialfn.hpp"

namespace semideg {

struct ThreePointSystem {
  ThetaVector theta0;
  ThetaVector theta_inf;
  cplx a;
  Vec r;
  Mat A0, A1;

  int N() const { return static_cast<int>(theta0.size()); }
  Mat A(cplx y) const { return A0 / y + A1 / (y - 1.0); }
};

namespace detail {

inline void require_nonresonant(const Vec& th, const char* what) {
  for (Eigen::Index j = 0; j < th.size(); ++j)
    for (Eigen::Index k = 0; k < th.size(); ++k) {
      if (j == k) continue;
      cplx d = th(j) - th(k);
      double m = std::round(d.real());
      if (m != 0 && std::abs(d - m) < 1e-6)
        throw ResonantExponents(std::string(what) + " differences hit the integer " + std::to_string(int(m)));
      if (std::abs(d) < 1e-6) throw DegenerateSpectrum(std::string(what) + " has coincident entries");
    }
}

}  // namespace detail

// (A1)_{jm} = -(r_j/r_m) prod_k(theta_inf_j - a/N + theta0_k) / prod_{k != m}(theta_inf_m - theta_inf_k) - delta_{jm} a/N
inline Mat build_residue_A1(const ThetaVector& theta_inf, const ThetaVector& theta0, cplx a, const Vec& r) {
  const int N = static_cast<int>(theta_inf.size());
  if (theta0.size() != N || r.size() != N) throw InvalidArgument("build_residue_A1: size mismatch");
  detail::require_distinct(theta_inf, "theta_inf", 1e-10);
  for (int j = 0; j < N; ++j)
    if (std::abs(r(j)) < 1e-300) throw InvalidArgument("gauge parameters r must be nonzero");
  Mat A(N, N);
  for (int j = 0; j < N; ++j)
    for (int m = 0; m < N; ++m) {
      cplx num = 1.0, den = 1.0;
      for (int k = 0; k < N; ++k) {
        num *= theta_inf(j) - a / double(N) + theta0(k);
        if (k != m) den *= theta_inf(m) - theta_inf(k);
      }
      A(j, m) = -(r(j) / r(m)) * num / den - (j == m ? a / double(N) : cplx(0.0));
    }
  return A;
}

inline ThreePointSystem make_three_point(const ThetaVector& theta0, const ThetaVector& theta_inf, cplx a,
                                         Vec r = {}) {
  const int N = static_cast<int>(theta0.size());
  if (N < 2 || theta_inf.size() != N) throw InvalidArgument("theta vectors must share a length N >= 2");
  require_traceless(theta0, "theta0");
  require_traceless(theta_inf, "theta_inf");
  if (r.size() == 0) r = Vec::Ones(N);
  ThreePointSystem s{theta0, theta_inf, a, r, {}, {}};
  s.A1 = build_residue_A1(theta_inf, theta0, a, r);
  s.A0 = -s.A1 - diag(theta_inf);
  return s;
}

namespace detail {

struct PhiEntry {
  std::vector<cplx> up, lo;
  cplx norm, p;  // prefactor N_{jm}, power of y
};

inline PhiEntry phi_entry(const ThreePointSystem& s, int j, int m) {
  const int N = s.N();
  const double d = j == m ? 1.0 : 0.0;
  PhiEntry e;
  e.norm = j == m ? cplx(1.0) : s.A1(j, m) / (s.theta_inf(m) - s.theta_inf(j) - 1.0);
  e.p = -s.theta_inf(j) - 1.0 + d;
  for (int k = 0; k < N; ++k) e.up.push_back(1.0 - d - s.a / double(N) + s.theta0(k) + s.theta_inf(j));
  for (int k = 0; k < N; ++k)
    if (k != j) e.lo.push_back(1.0 + s.theta_inf(j) - s.theta_inf(k) + (m == k ? 1.0 : 0.0) - d);
  return e;
}

inline void check_solution_domain(const ThreePointSystem& s, cplx y) {
  if (std::abs(y) <= 1.0 + 1e-6) throw OutsideDomain("fundamental solution needs |y| > 1, got " + fmt(y));
  require_nonresonant(s.theta_inf, "theta_inf");
}

}  // namespace detail

// Phi(y) ~ y^{-Theta_inf}(1 + O(1/y)), solves Phi' = Phi (A0/y + A1/(y-1))
inline Mat fundamental_solution(const ThreePointSystem& s, cplx y, const SeriesControl& ctl = {}) {
  detail::check_solution_domain(s, y);
  const int N = s.N();
  const cplx ly = std::log(y), lw = std::log(1.0 - 1.0 / y), q = -s.a / double(N);
  Mat phi(N, N);
  for (int j = 0; j < N; ++j)
    for (int m = 0; m < N; ++m) {
      auto e = detail::phi_entry(s, j, m);
      phi(j, m) = e.norm * std::exp(e.p * ly + q * lw) * hyp_nf_nm1(e.up, e.lo, 1.0 / y, ctl);
    }
  return phi;
}

// exact dPhi/dy from the contiguous relation
inline Mat fundamental_solution_derivative(const ThreePointSystem& s, cplx y, const SeriesControl& ctl = {}) {
  detail::check_solution_domain(s, y);
  const int N = s.N();
  const cplx ly = std::log(y), lw = std::log(1.0 - 1.0 / y), q = -s.a / double(N), x = 1.0 / y;
  Mat d(N, N);
  for (int j = 0; j < N; ++j)
    for (int m = 0; m < N; ++m) {
      auto e = detail::phi_entry(s, j, m);
      cplx pre = e.norm * std::exp(e.p * ly + q * lw);
      cplx F = hyp_nf_nm1(e.up, e.lo, x, ctl), dF = hyp_nf_nm1_deriv(e.up, e.lo, x, ctl);
      d(j, m) = pre * (F * (e.p / y + q * x * x / (1.0 - x)) - dF * x * x);
    }
  return d;
}

inline double ode_residual(const ThreePointSystem& s, cplx y) {
  return max_abs(fundamental_solution_derivative(s, y) - fundamental_solution(s, y) * s.A(y));
}

// (G_s(x), G'_s(x)), s 0-based
inline std::pair<cplx, cplx> hyper_block(int s, const ThetaVector& theta0, const ThetaVector& theta_inf, cplx a,
                                         cplx x, const SeriesControl& ctl = {}) {
  const int N = static_cast<int>(theta0.size());
  if (s < 0 || s >= N) throw InvalidArgument("block index out of range");
  const cplx c = (double(N) - a - 1.0) / double(N);
  std::vector<cplx> u0, l0, u1, l1;
  for (int k = 0; k < N; ++k) {
    u0.push_back(c + theta0(s) - theta_inf(k));
    u1.push_back(c + theta0(k) - theta_inf(s));
    if (k != s) {
      l0.push_back(1.0 + theta0(s) - theta0(k));
      l1.push_back(1.0 + theta_inf(k) - theta_inf(s));
    }
  }
  return {hyp_nf_nm1(u0, l0, x, ctl), hyp_nf_nm1(u1, l1, x, ctl)};
}

inline Mat connection_matrix_tildeF(const ThetaVector& theta_inf, cplx a, const ThetaVector& theta0) {
  const int N = static_cast<int>(theta0.size());
  auto G = [](cplx z) {
    try {
      return gamma_c(z);
    } catch (const PoleError&) {
      throw GammaPole("Gamma(" + fmt(z) + ")");
    }
  };
  Mat F(N, N);
  for (int l = 0; l < N; ++l)
    for (int j = 0; j < N; ++j) {
      cplx v = 1.0;
      for (int k = 0; k < N; ++k) {
        if (k != l) v *= G(1.0 + theta0(l) - theta0(k)) / G((1.0 + a) / double(N) + theta_inf(j) - theta0(k));
        if (k != j) v *= G(theta_inf(j) - theta_inf(k)) / G((double(N) - 1.0 - a) / double(N) + theta0(l) - theta_inf(k));
      }
      F(l, j) = v;
    }
  return F;
}

inline Mat numeric_monodromy(const ThreePointSystem& s, const LoopPath& loop, const Mat& phi0,
                             const OdeSettings& o = {}) {
  return loop_monodromy([&](cplx y) { return s.A(y); }, phi0, loop, {0.0, 1.0}, o);
}

inline Mat numeric_monodromy(const ThreePointSystem& s, const LoopPath& loop, const OdeSettings& o = {}) {
  return numeric_monodromy(s, loop, Mat::Identity(s.N(), s.N()), o);
}

// clockwise circle of radius R through the ray of the basepoint: the loop around infinity
inline LoopPath loop_infinity(cplx base, double R, int npts = 24) {
  double ang = std::arg(base);
  LoopPath l{base, {base}};
  for (int k = 0; k <= npts; ++k) l.waypoints.push_back(R * std::exp(I * (ang - 2.0 * pi * k / npts)));
  l.waypoints.push_back(base);
  return l;
}

// (M_0, M_1, M_inf) in the basis of fundamental_solution at y0; M_inf is diagonal
inline MonodromyRep three_point_monodromy(const ThreePointSystem& s, cplx y0 = cplx(0, 4), double rho = 0.25,
                                          double R = 5.0, const OdeSettings& o = {}) {
  if (std::abs(y0) >= R) throw InvalidArgument("basepoint must lie inside the big circle");
  Mat phi0 = fundamental_solution(s, y0);
  MonodromyRep rep;
  rep.M.push_back(numeric_monodromy(s, loop_around(y0, 0.0, rho), phi0, o));
  rep.M.push_back(numeric_monodromy(s, loop_around(y0, 1.0, rho), phi0, o));
  rep.M.push_back(numeric_monodromy(s, loop_infinity(y0, R), phi0, o));
  return rep;
}

inline SemiDegParams three_point_params(const ThreePointSystem& s) {
  return SemiDegParams{3, s.N(), s.theta0, s.theta_inf, {s.a}, {}, {Vec::Ones(s.N())}};
}

namespace detail {

// coefficients c_i of prod_k (D - r_k) = sum_i c_i D^i
inline std::vector<cplx> poly_from_roots(const Vec& r) {
  std::vector<cplx> c{1.0};
  for (Eigen::Index k = 0; k < r.size(); ++k) {
    std::vector<cplx> nc(c.size() + 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      nc[i + 1] += c[i];
      nc[i] -= r(k) * c[i];
    }
    c = nc;
  }
  return c;
}

// D^i (x^t G(x)) for i = 0..N-1, G = nF_{N-1}(up; lo; x)
inline State block_jet(const std::vector<cplx>& up, const std::vector<cplx>& lo, cplx t, cplx x, int N) {
  State v(N, 0.0);
  cplx c = 1.0, lx = std::log(x);
  int small = 0;
  for (long n = 0; n < 100000; ++n) {
    cplx e = double(n) + t;
    cplx term = c * std::exp(e * lx);
    cplx pw = 1.0;
    double mag = 0;
    for (int i = 0; i < N; ++i) {
      v[i] += term * pw;
      mag = std::max(mag, std::abs(term * pw));
      pw *= e;
    }
    if (mag < 1e-17 * std::max(1.0, std::abs(v[0]))) {
      if (++small == 2) return v;
    } else {
      small = 0;
    }
    for (auto u : up) c *= u + double(n);
    for (auto b : lo) c /= b + double(n);
    c /= double(n + 1);
  }
  throw NoConvergence("block series");
}

}  // namespace detail

// Continue the inner blocks f_l(x) = x^{theta0_l}(1-x)^{-a/N} G_l(x) from x0 = y/z
// counter-clockwise around x = 1 (below the real axis) to x1 = 1/x0, and compare with
// sum_j exp(-i pi((N-1)/N + theta0_l - theta_inf_j)) tildeF_{lj} g_j(x1).  Returns the
// maximal mismatch relative to max(1, |f|).
inline double verify_connection(const ThreePointSystem& s, cplx y, cplx z, const OdeSettings& o = {}) {
  const int N = s.N();
  const cplx x0 = y / z, x1 = 1.0 / x0, a = s.a;
  if (std::abs(x0) >= 1.0 || x0.real() <= 0.0)
    throw InvalidArgument("verify_connection needs |y| < |z| and Re(y/z) > 0");
  const double rho = 0.5;
  std::vector<cplx> path{x0, 1.0 - rho};
  for (int k = 1; k <= 16; ++k) path.push_back(1.0 + rho * std::exp(I * (pi + pi * k / 16.0)));
  path.push_back(x1);
  if (std::abs(x0 - (1.0 - rho)) < 1e-15) path.erase(path.begin() + 1);
  LoopPath probe{x0, path};
  if (loop_clearance(probe, {0.0, 1.0}) < 0.05) throw InvalidArgument("connection path passes too close to 0 or 1");

  const cplx alpha = (double(N) - 1.0 - a) / double(N);
  auto p = detail::poly_from_roots(s.theta0);
  auto q = detail::poly_from_roots(s.theta_inf.array() - alpha);
  PathRhs rhs = [&](cplx x, const State& v, State& d) {
    d.assign(N, 0.0);
    for (int i = 0; i + 1 < N; ++i) d[i] = v[i + 1] / x;
    cplx top = 0;
    for (int i = 0; i < N; ++i) top -= (p[i] - x * q[i]) * v[i];
    d[N - 1] = top / (1.0 - x) / x;
  };

  // log(1 - x) continued along the path
  cplx lg = std::log(1.0 - x0);
  for (std::size_t i = 1; i < path.size(); ++i)
    for (int k = 1; k <= 64; ++k) {
      cplx xa = path[i - 1] + (path[i] - path[i - 1]) * ((k - 1) / 64.0);
      cplx xb = path[i - 1] + (path[i] - path[i - 1]) * (k / 64.0);
      lg += std::log((1.0 - xb) / (1.0 - xa));
    }

  const cplx c = (double(N) - a - 1.0) / double(N);
  Vec lhs(N);
  for (int l = 0; l < N; ++l) {
    std::vector<cplx> up, lo;
    for (int k = 0; k < N; ++k) {
      up.push_back(c + s.theta0(l) - s.theta_inf(k));
      if (k != l) lo.push_back(1.0 + s.theta0(l) - s.theta0(k));
    }
    State v = integrate_path(rhs, detail::block_jet(up, lo, s.theta0(l), x0, N), path, o);
    lhs(l) = v[0] * std::exp(-a / double(N) * lg);
  }

  auto Delta = [](const Vec& v) { return v.cwiseProduct(v).sum() / 2.0; };
  const cplx D1 = Delta(s.theta0), D2 = (N - 1.0) / (2.0 * N), D3 = a * a * (N - 1.0) / (2.0 * N);
  const cplx P = Delta(s.theta_inf) - D3 - D2 - D1;
  Vec g(N);
  for (int j = 0; j < N; ++j) {
    cplx ex = Delta(s.theta_inf - weight_h(N, j)) - D1 - D3;
    cplx Gp = hyper_block(j, s.theta0, s.theta_inf, a, 1.0 / x1).second;
    g(j) = std::exp(P * std::log(x1) + ex * std::log(1.0 / x1) - a / double(N) * std::log(1.0 - 1.0 / x1)) * Gp;
  }
  Mat Ft = connection_matrix_tildeF(s.theta_inf, a, s.theta0);
  double err = 0;
  for (int l = 0; l < N; ++l) {
    cplx r = 0;
    for (int j = 0; j < N; ++j)
      r += std::exp(-I * pi * ((N - 1.0) / N + s.theta0(l) - s.theta_inf(j))) * Ft(l, j) * g(j);
    err = std::max(err, std::abs(lhs(l) - r));
  }
  return err / std::max(1.0, lhs.cwiseAbs().maxCoeff());
}

}  // namespace semideg
