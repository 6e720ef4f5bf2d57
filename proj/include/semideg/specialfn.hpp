#pragma once

#include <array>
#include <vector>

#include "core.hpp"

namespace semideg {

struct SeriesControl {
  double rel_tol = 1e-13;
  double abs_tol = 1e-15;
  long max_terms = 1000000;
};

namespace detail {

// B_2 .. B_22
inline constexpr std::array<double, 11> bern2k = {
    1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730,
    7.0 / 6, -3617.0 / 510, 43867.0 / 798, -174611.0 / 330, 854513.0 / 138};

inline constexpr double half_log_2pi = 0.91893853320467274178032973640562;
inline constexpr double zeta_prime_m1 = -0.16542114370045092921391966024278;

inline void check_pole(cplx z, double tol, const char* who) {
  double r = std::round(z.real());
  if (r <= 0 && std::abs(z - r) < tol) throw PoleError(std::string(who) + " pole at " + fmt(z));
}

// Stirling series, Re z large
inline cplx lgamma_stirling(cplx z) {
  cplx lz = std::log(z);
  cplx s = (z - 0.5) * lz - z + half_log_2pi;
  cplx zi = 1.0 / z, z2 = zi * zi, p = zi;
  for (int k = 1; k <= 10; ++k) {
    s += bern2k[k - 1] / (2.0 * k * (2.0 * k - 1)) * p;
    p *= z2;
  }
  return s;
}

// log G(u+1), Re u large
inline cplx lbarnes_asym(cplx u) {
  cplx lu = std::log(u);
  cplx u2 = u * u;
  cplx s = 0.5 * u2 * lu - 0.75 * u2 + u * half_log_2pi - lu / 12.0 + zeta_prime_m1;
  cplx ui2 = 1.0 / u2, p = ui2;
  for (int k = 1; k <= 9; ++k) {
    s += bern2k[k] / (4.0 * k * (k + 1)) * p;
    p *= ui2;
  }
  return s;
}

}  // namespace detail

// log Gamma.  Principal branch for Re z >= 1/2; below that the reflection
// formula is used and the result is only defined mod 2 pi i.
inline cplx lgamma_c(cplx z) {
  detail::check_pole(z, 1e-14, "lgamma");
  if (z.real() < 0.5) {
    cplx s = std::sin(pi * z);
    return std::log(pi) - std::log(s) - lgamma_c(1.0 - z);
  }
  cplx acc = 0;
  while (z.real() < 15.0) {
    acc -= std::log(z);
    z += 1.0;
  }
  return acc + detail::lgamma_stirling(z);
}

inline cplx gamma_c(cplx z) {
  detail::check_pole(z, 1e-14, "gamma");
  if (z.real() < 0.5) return pi / (std::sin(pi * z) * gamma_c(1.0 - z));
  return std::exp(lgamma_c(z));
}

inline cplx log_barnes_g(cplx z) {
  detail::check_pole(z, 1e-14, "barnes G");
  cplx acc = 0;
  // log G(z) = log G(z+1) - log Gamma(z)
  while (z.real() < 13.0) {
    acc -= lgamma_c(z);
    z += 1.0;
  }
  return acc + detail::lbarnes_asym(z - 1.0);
}

struct SeriesResult {
  cplx value;
  double residual;  // magnitude of the last two terms
  long terms;
};

// nF_{N-1}(a; b; x), |x| < 1
inline SeriesResult hyp_nf_nm1_ex(const std::vector<cplx>& a, const std::vector<cplx>& b, cplx x,
                                  const SeriesControl& ctl = {}) {
  if (a.size() != b.size() + 1) throw InvalidArgument("hypergeometric: need |a| = |b| + 1");
  for (auto bj : b) {
    double r = std::round(bj.real());
    if (r <= 0 && std::abs(bj - r) < 1e-12)
      throw LowerParameterPole("lower parameter " + fmt(bj));
  }
  if (std::abs(x) >= 1.0) throw OutsideDomain("hypergeometric series needs |x| < 1, got " + fmt(x));
  cplx sum = 1.0, term = 1.0;
  int small = 0;
  double last2 = 0;
  long k = 0;
  for (; k < ctl.max_terms; ++k) {
    cplx ratio = x / double(k + 1);
    for (auto ai : a) ratio *= ai + double(k);
    for (auto bj : b) ratio /= bj + double(k);
    term *= ratio;
    sum += term;
    double t = std::abs(term);
    if (term == 0.0) return {sum, 0.0, k + 1};
    if (t <= std::max(ctl.rel_tol * std::abs(sum), ctl.abs_tol)) {
      last2 += t;
      if (++small == 2) return {sum, last2, k + 1};
    } else {
      small = 0;
      last2 = 0;
    }
  }
  throw NoConvergence("hypergeometric series did not converge in " + std::to_string(ctl.max_terms) + " terms");
}

inline cplx hyp_nf_nm1(const std::vector<cplx>& a, const std::vector<cplx>& b, cplx x,
                       const SeriesControl& ctl = {}) {
  return hyp_nf_nm1_ex(a, b, x, ctl).value;
}

// d/dx nF_{N-1} via the contiguous relation
inline cplx hyp_nf_nm1_deriv(std::vector<cplx> a, std::vector<cplx> b, cplx x,
                             const SeriesControl& ctl = {}) {
  cplx c = 1.0;
  for (auto& ai : a) c *= ai, ai += 1.0;
  for (auto& bj : b) c /= bj, bj += 1.0;
  return c * hyp_nf_nm1(a, b, x, ctl);
}

}  // namespace semideg
