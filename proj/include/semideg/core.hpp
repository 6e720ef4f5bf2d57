#pragma once

#include <complex>
#include <cstdio>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace semideg {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using ThetaVector = Vec;

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr cplx I{0.0, 1.0};

inline constexpr const char* version = "0.3.1";

// every library failure derives from this; `kind` is the short name the CLI prints
struct error : std::runtime_error {
  std::string kind;
  error(std::string k, const std::string& msg)
      : std::runtime_error(k + ": " + msg), kind(std::move(k)) {}
};

#define SEMIDEG_ERROR(Name) \
  struct Name : error {     \
    explicit Name(const std::string& m) : error(#Name, m) {} \
  }

SEMIDEG_ERROR(InvalidArgument);
SEMIDEG_ERROR(PoleError);
SEMIDEG_ERROR(NoConvergence);
SEMIDEG_ERROR(LowerParameterPole);
SEMIDEG_ERROR(InvalidPartition);
SEMIDEG_ERROR(SpectrumCollision);
SEMIDEG_ERROR(DegenerateSpectrum);
SEMIDEG_ERROR(SingularMatrix);
SEMIDEG_ERROR(SineFactorZero);
SEMIDEG_ERROR(GammaPole);
SEMIDEG_ERROR(BarnesPole);
SEMIDEG_ERROR(NormPole);
SEMIDEG_ERROR(OutsideDomain);
SEMIDEG_ERROR(ResonantExponents);
SEMIDEG_ERROR(StepFailure);
SEMIDEG_ERROR(SingularTime);
SEMIDEG_ERROR(ConstructionFailure);
SEMIDEG_ERROR(NormalizationFailure);
SEMIDEG_ERROR(EigenvectorMatchFailure);

#undef SEMIDEG_ERROR

inline std::string fmt(cplx z) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.17g%+.17gi)", z.real(), z.imag());
  return buf;
}

inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline bool finite(const Mat& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i)
    if (!finite(m.data()[i])) return false;
  return true;
}

inline Vec to_vec(const std::vector<cplx>& v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

inline std::vector<cplx> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

inline void require_traceless(const Vec& v, const char* what, double tol = 1e-12) {
  if (std::abs(v.sum()) > tol)
    throw InvalidArgument(std::string(what) + " is not traceless (sum " + fmt(v.sum()) + ")");
}

inline Vec traceless(Vec v) {
  v.array() -= v.mean();
  return v;
}

// weight h_s of the vector representation, 0-based s
inline Vec weight_h(int N, int s) {
  Vec h = Vec::Constant(N, cplx(-1.0 / N));
  h(s) += 1.0;
  return h;
}

// D_m^{N-1}: diagonal with (-1)^{N-1} at position m
inline Mat sign_D(int N, int m) {
  Mat d = Mat::Identity(N, N);
  if (N % 2 == 0) d(m, m) = -1.0;
  return d;
}

inline Mat diag(const Vec& v) { return v.asDiagonal(); }

inline Vec expv(const Vec& v, cplx c) {
  Vec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = std::exp(c * v(i));
  return out;
}

// e^{2 pi i S}
inline Mat exp2pi(const Vec& s) { return diag(expv(s, 2.0 * pi * I)); }

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace semideg
