#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "core.hpp"

namespace semideg {

struct OdeSettings {
  double abs_tol = 1e-15;
  double rel_tol = 1e-13;
  long max_steps = 200000;  // per segment
};

using State = std::vector<cplx>;
// f(z, x, dxdz)
using PathRhs = std::function<void(cplx, const State&, State&)>;

// Integrate dx/dz = f(z, x) along the straight segment za -> zb.
// The segment is parameterized by s in [0, 1] so the stepper only sees a real time.
inline State integrate_segment(const PathRhs& f, State x, cplx za, cplx zb, const OdeSettings& o = {}) {
  namespace ode = boost::numeric::odeint;
  const cplx dz = zb - za;
  if (dz == 0.0) return x;
  auto sys = [&](const State& v, State& d, double s) {
    f(za + s * dz, v, d);
    for (auto& e : d) e *= dz;
  };
  long steps = 0;
  auto watch = [&](const State& v, double) {
    if (++steps > o.max_steps) throw StepFailure("step budget exhausted on segment " + fmt(za) + " -> " + fmt(zb));
    for (auto e : v)
      if (!finite(e)) throw StepFailure("non-finite state near " + fmt(za) + " -> " + fmt(zb));
  };
  try {
    auto stepper = ode::make_controlled(o.abs_tol, o.rel_tol, ode::runge_kutta_fehlberg78<State>());
    ode::integrate_adaptive(stepper, sys, x, 0.0, 1.0, 0.01, watch);
  } catch (const ode::step_adjustment_error& e) {
    throw StepFailure(e.what());
  } catch (const ode::no_progress_error& e) {
    throw StepFailure(e.what());
  }
  return x;
}

inline State integrate_path(const PathRhs& f, State x, const std::vector<cplx>& path, const OdeSettings& o = {}) {
  for (std::size_t i = 1; i < path.size(); ++i) x = integrate_segment(f, std::move(x), path[i - 1], path[i], o);
  return x;
}

inline State flatten(const Mat& m) {
  State s(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) s[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
  return s;
}

inline Mat unflatten(const cplx* p, int N) {
  Mat m(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) m(i, j) = p[i * N + j];
  return m;
}

// Closed loop: basepoint -> near p -> counter-clockwise circle of radius rho -> basepoint.
// ccw = false walks the circle clockwise.
struct LoopPath {
  cplx basepoint;
  std::vector<cplx> waypoints;  // first == last == basepoint
};

inline LoopPath loop_around(cplx base, cplx p, double rho, int npts = 16, bool ccw = true) {
  double ang = std::arg(base - p);
  LoopPath l{base, {base}};
  for (int k = 0; k <= npts; ++k) {
    double phi = ang + (ccw ? 1 : -1) * 2.0 * pi * k / npts;
    l.waypoints.push_back(p + rho * std::exp(I * phi));
  }
  l.waypoints.push_back(base);
  return l;
}

inline double loop_clearance(const LoopPath& l, const std::vector<cplx>& sing) {
  double d = 1e300;
  for (std::size_t i = 1; i < l.waypoints.size(); ++i) {
    cplx a = l.waypoints[i - 1], b = l.waypoints[i];
    for (auto s : sing) {
      cplx ab = b - a;
      double t = std::norm(ab) > 0 ? std::clamp(std::real(std::conj(ab) * (s - a)) / std::norm(ab), 0.0, 1.0) : 0.0;
      d = std::min(d, std::abs(a + t * ab - s));
    }
  }
  return d;
}

// Continue a fundamental matrix Phi along the loop for Phi' = Phi A(z) and return
// M = Phi_end Phi_start^{-1} (so that continued Phi = M Phi).
inline Mat loop_monodromy(const std::function<Mat(cplx)>& A, const Mat& phi0, const LoopPath& loop,
                          const std::vector<cplx>& singular, const OdeSettings& o = {}) {
  if (loop.waypoints.size() < 2 || loop.waypoints.front() != loop.waypoints.back())
    throw InvalidArgument("loop must be closed");
  if (loop_clearance(loop, singular) < 1e-3) throw InvalidArgument("loop passes within 1e-3 of a singular point");
  const int N = static_cast<int>(phi0.rows());
  PathRhs f = [&](cplx z, const State& v, State& d) {
    Mat phi = unflatten(v.data(), N);
    d = flatten(phi * A(z));
  };
  State end = integrate_path(f, flatten(phi0), loop.waypoints, o);
  return unflatten(end.data(), N) * phi0.inverse();
}

}  // namespace semideg
