#pragma once

// 50-digit reference implementations. Deliberately different algorithms from the
// library: Weierstrass products with a Hurwitz-zeta tail instead of Stirling series.

#include <complex>
#include <stdexcept>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

namespace oracle {

namespace mp = boost::multiprecision;
using real = mp::cpp_bin_float_50;
using cmp = mp::cpp_complex_50;

inline cmp to_mp(std::complex<double> z) { return cmp(real(z.real()), real(z.imag())); }
inline std::complex<double> to_d(const cmp& z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

inline const real& euler_gamma() {
  static const real g = boost::math::constants::euler<real>();
  return g;
}

inline const real& two_pi() {
  static const real p = 2 * boost::math::constants::pi<real>();
  return p;
}

constexpr int product_terms = 2000;

// zeta(s, a) for integer s >= 2 and large real a, Euler-Maclaurin at a itself
inline real hurwitz(int s, const real& a) {
  static const std::pair<long, long> bern[] = {{1, 6},     {-1, 30},   {1, 42},       {-1, 30},    {5, 66},
                                               {-691, 2730}, {7, 6}, {-3617, 510}, {43867, 798}, {-174611, 330}};
  real v = pow(a, 1 - s) / (s - 1) + pow(a, -s) / 2;
  real rising = s;  // s (s+1) ... (s+2j-2)
  real fact = 2;    // (2j)!
  for (int j = 1; j <= 10; ++j) {
    v += real(bern[j - 1].first) / real(bern[j - 1].second) / fact * rising * pow(a, -s - 2 * j + 1);
    rising *= real(s + 2 * j - 1) * real(s + 2 * j);
    fact *= real(2 * j + 1) * real(2 * j + 2);
  }
  return v;
}

// sum_{m >= m0} (-1)^{m+1} z^m / m * zeta(m - shift, K + 1)
inline cmp zeta_tail(const cmp& z, int m0, int shift) {
  const real a = product_terms + 1;
  cmp s = 0, zm = pow(z, m0);
  for (int m = m0; m < m0 + 80; ++m) {
    cmp term = zm / real(m) * hurwitz(m - shift, a);
    s += (m % 2 ? term : cmp(-term));
    zm *= z;
  }
  return s;
}

inline real harmonic() {
  real h = 0;
  for (int k = 1; k <= product_terms; ++k) h += real(1) / k;
  return h;
}

// 1/Gamma(z) = z e^{gamma z} prod_k (1 + z/k) e^{-z/k}
inline cmp gamma_mp(const cmp& z) {
  static const real H = harmonic();
  cmp p = z;
  for (int k = 1; k <= product_terms; ++k) p *= 1 + z / real(k);
  if (abs(p) == 0) throw std::domain_error("oracle gamma: pole");
  cmp e = euler_gamma() * z - z * H + zeta_tail(z, 2, 0);
  return 1 / (p * exp(e));
}

// G(1 + z) = (2 pi)^{z/2} exp(-(z + z^2 (1 + gamma))/2) prod_k (1 + z/k)^k exp(z^2/(2k) - z)
inline cmp barnes_g_mp(const cmp& z1) {
  static const real H = harmonic();
  const cmp z = z1 - 1;
  cmp p = 1;
  for (int k = 1; k <= product_terms; ++k) p *= pow(1 + z / real(k), k);
  cmp e = z / 2 * log(cmp(two_pi())) - (z + z * z * (1 + euler_gamma())) / 2 + z * z / 2 * H -
          real(product_terms) * z + zeta_tail(z, 3, 1);
  return p * exp(e);
}

inline std::complex<double> gamma(std::complex<double> z) { return to_d(gamma_mp(to_mp(z))); }
inline std::complex<double> barnes_g(std::complex<double> z) { return to_d(barnes_g_mp(to_mp(z))); }

// G(x + n) / G(x) for integer n, as a finite gamma product
inline cmp barnes_shift_ratio(const cmp& x, int n) {
  cmp r = 1;
  for (int k = 0; k < n; ++k) r *= gamma_mp(x + real(k));
  for (int k = 1; k <= -n; ++k) r /= gamma_mp(x - real(k));
  return r;
}

// N(sp, a, s) (sgn > 0) or its checked twin (sgn < 0), straight from the Barnes double product
template <class V>
std::complex<double> norm(const V& sp, std::complex<double> a, const V& s, int sgn = 1) {
  const int N = static_cast<int>(s.size());
  cmp v = 1;
  for (int l = 0; l < N; ++l)
    for (int j = 0; j < N; ++j)
      v *= barnes_g_mp(to_mp(sgn > 0 ? 1.0 - a / double(N) + s(l) - sp(j) : 1.0 + a / double(N) - s(l) + sp(j)));
  for (int k = 0; k < N; ++k)
    for (int m = k + 1; m < N; ++m) v /= barnes_g_mp(to_mp(1.0 + s(k) - s(m))) * barnes_g_mp(to_mp(1.0 - sp(k) + sp(m)));
  return to_d(v);
}

// plain term-by-term sum of nF_{N-1}
inline std::complex<double> hyp(const std::vector<std::complex<double>>& a,
                                const std::vector<std::complex<double>>& b, std::complex<double> x) {
  std::vector<cmp> A, B;
  for (auto v : a) A.push_back(to_mp(v));
  for (auto v : b) B.push_back(to_mp(v));
  cmp X = to_mp(x), term = 1, sum = 1;
  const real eps("1e-45");
  int small = 0;
  for (int n = 0; n < 200000; ++n) {
    for (auto& u : A) term *= u + real(n);
    for (auto& v : B) term /= v + real(n);
    term *= X / real(n + 1);
    sum += term;
    if (abs(term) < eps * abs(sum)) {
      if (++small == 3) return to_d(sum);
    } else {
      small = 0;
    }
  }
  throw std::runtime_error("oracle hyp: no convergence");
}

}  // namespace oracle
