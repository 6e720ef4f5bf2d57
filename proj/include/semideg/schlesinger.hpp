#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "companion.hpp"
#include "linalg.hpp"
#include "monodromy.hpp"
#include "ode.hpp"

namespace semideg {

struct FourPointState {
  Mat A0, At, A1;
  Mat Ainf;  // diag(theta_inf), constant along the flow
  cplx t;
  cplx log_tau = 0.0;

  int N() const { return static_cast<int>(A0.rows()); }
  Mat A(cplx y) const { return A0 / y + At / (y - t) + A1 / (y - 1.0); }
};

struct FlowSettings {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  double max_step = 0.05;  // longest straight piece handed to the stepper, in |dt|
  std::vector<cplx> path;  // t waypoints, the first one is the state's t
};

struct InitResult {
  FourPointState state;
  ThetaVector theta0;  // eigenvalues of A0, sorted by (Re, Im)
  int attempts = 0;
};

namespace detail {

inline Vec sorted(Vec v) {
  std::sort(v.data(), v.data() + v.size(), [](cplx x, cplx y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return v;
}

inline bool generic_exponents(const Vec& th) {
  for (Eigen::Index j = 0; j < th.size(); ++j)
    for (Eigen::Index k = j + 1; k < th.size(); ++k) {
      cplx d = th(j) - th(k);
      if (std::abs(d - std::round(d.real())) < 1e-6) return false;
    }
  return true;
}

inline void check_time(cplx t) {
  if (std::abs(t) < 1e-12 || std::abs(t - 1.0) < 1e-12) throw SingularTime("t = " + fmt(t));
}

}  // namespace detail

// a (v w^T/(w^T v) - 1/N) with Gaussian v, w
template <class Rng>
Mat random_rank_one(cplx a, int N, Rng& rng) {
  std::normal_distribution<double> g;
  Vec v(N), w(N);
  for (int i = 0; i < N; ++i) v(i) = cplx(g(rng), g(rng));
  for (int i = 0; i < N; ++i) w(i) = cplx(g(rng), g(rng));
  cplx wv = w.cwiseProduct(v).sum();  // w^T v
  if (std::abs(wv) < 1e-3) return Mat();
  return a * (v * w.transpose() / wv - Mat::Identity(N, N) / double(N));
}

inline InitResult init_semideg_state(const ThetaVector& theta_inf, cplx a_t, cplx a_1, std::uint64_t seed, cplx t0,
                                     int max_attempts = 100) {
  const int N = static_cast<int>(theta_inf.size());
  if (N < 2) throw InvalidArgument("N >= 2 required");
  require_traceless(theta_inf, "theta_inf");
  detail::check_time(t0);
  std::mt19937_64 rng(seed);
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    Mat At = random_rank_one(a_t, N, rng);
    Mat A1 = random_rank_one(a_1, N, rng);
    if (At.size() == 0 || A1.size() == 0) continue;
    FourPointState s{Mat(), At, A1, diag(theta_inf), t0, 0.0};
    s.A0 = -s.Ainf - At - A1;
    Vec th0 = detail::sorted(eigenvalues(s.A0));
    if (!detail::generic_exponents(th0)) continue;
    th0 = traceless(th0);
    return {s, th0, attempt};
  }
  throw ConstructionFailure("no generic residue triple after " + std::to_string(max_attempts) + " draws");
}

inline std::pair<Mat, Mat> schlesinger_rhs(const FourPointState& s) {
  detail::check_time(s.t);
  Mat d0 = (s.A0 * s.At - s.At * s.A0) / s.t;
  Mat d1 = (s.A1 * s.At - s.At * s.A1) / (s.t - 1.0);
  return {d0, d1};
}

inline cplx tau_logderiv(const FourPointState& s) {
  detail::check_time(s.t);
  return (s.A0 * s.At).trace() / s.t + (s.A1 * s.At).trace() / (s.t - 1.0);
}

// one output state per waypoint of settings.path
inline std::vector<FourPointState> integrate_flow(const FourPointState& start, const FlowSettings& fs) {
  const int N = start.N();
  if (fs.path.empty() || std::abs(fs.path.front() - start.t) > 1e-14)
    throw InvalidArgument("flow path must start at the state's t");
  // a segment may approach 0 or 1 only as close as (half) its nearer endpoint does
  for (std::size_t i = 1; i < fs.path.size(); ++i) {
    cplx ta = fs.path[i - 1], tb = fs.path[i];
    detail::check_time(tb);
    LoopPath seg{ta, {ta, tb}};
    for (cplx p : {cplx(0.0), cplx(1.0)}) {
      double ends = std::min(std::abs(ta - p), std::abs(tb - p));
      if (loop_clearance(seg, {p}) < std::min(1e-3, 0.5 * ends))
        throw InvalidArgument("t-path passes too close to " + fmt(p));
    }
  }
  const Mat Ainf = start.Ainf;
  PathRhs f = [&](cplx t, const State& v, State& d) {
    FourPointState s{unflatten(v.data(), N), Mat(), unflatten(v.data() + N * N, N), Ainf, t, 0.0};
    s.At = -Ainf - s.A0 - s.A1;
    auto [d0, d1] = schlesinger_rhs(s);
    d.resize(v.size());
    auto f0 = flatten(d0), f1 = flatten(d1);
    std::copy(f0.begin(), f0.end(), d.begin());
    std::copy(f1.begin(), f1.end(), d.begin() + N * N);
    d.back() = tau_logderiv(s);
  };
  auto pack = [&](const FourPointState& s) {
    State v = flatten(s.A0);
    auto v1 = flatten(s.A1);
    v.insert(v.end(), v1.begin(), v1.end());
    v.push_back(s.log_tau);
    return v;
  };
  OdeSettings o{fs.abs_tol, fs.rel_tol};
  std::vector<FourPointState> out{start};
  State v = pack(start);
  for (std::size_t i = 1; i < fs.path.size(); ++i) {
    cplx ta = fs.path[i - 1], tb = fs.path[i];
    int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(tb - ta) / fs.max_step)));
    for (int k = 0; k < pieces; ++k)
      v = integrate_segment(f, std::move(v), ta + (tb - ta) * (double(k) / pieces),
                            ta + (tb - ta) * (double(k + 1) / pieces), o);
    FourPointState s{unflatten(v.data(), N), Mat(), unflatten(v.data() + N * N, N), Ainf, tb, v.back()};
    s.At = -Ainf - s.A0 - s.A1;
    out.push_back(s);
  }
  return out;
}

// loops around 0, t, 1 and a clockwise circle around everything, all based at y0
inline std::vector<LoopPath> default_loops(cplx t, cplx y0 = cplx(0, 0.5)) {
  double rho = std::min({std::abs(t), std::abs(1.0 - t)}) / 3.0;
  double rho1 = std::min(0.3, std::abs(1.0 - t) / 3.0);
  double R = std::max(3.0, 2.0 * std::abs(y0));
  std::vector<LoopPath> loops{loop_around(y0, 0.0, rho), loop_around(y0, t, rho), loop_around(y0, 1.0, rho1)};
  LoopPath big{y0, {y0}};
  double ang = std::arg(y0);
  for (int k = 0; k <= 24; ++k) big.waypoints.push_back(R * std::exp(I * (ang - 2.0 * pi * k / 24)));
  big.waypoints.push_back(y0);
  loops.push_back(big);
  return loops;
}

// (M_0, M_t, M_1, M_inf) with Phi(y0) = 1
inline MonodromyRep monodromy_of_state(const FourPointState& s, const std::vector<LoopPath>& loops,
                                       const OdeSettings& o = {}) {
  if (loops.size() != 4) throw InvalidArgument("need four loops");
  MonodromyRep rep;
  const Mat id = Mat::Identity(s.N(), s.N());
  for (const auto& l : loops)
    rep.M.push_back(loop_monodromy([&](cplx y) { return s.A(y); }, id, l, {0.0, s.t, 1.0}, o));
  return rep;
}

inline MonodromyRep monodromy_of_state(const FourPointState& s, const OdeSettings& o = {}) {
  return monodromy_of_state(s, default_loops(s.t), o);
}

}  // namespace semideg
