#pragma once

#include <cstdint>
#include <vector>

#include "schlesinger.hpp"
#include "taufun.hpp"

namespace semideg {

struct CrosscheckSettings {
  ThetaVector theta_inf;
  cplx a_t, a_1;
  std::uint64_t seed = 1;
  cplx t0 = 0.01;               // where the residues are drawn and (sigma, beta) extracted
  std::vector<cplx> t_values;   // comparison points, visited in order
  cplx y0 = cplx(0.0, 0.5);     // monodromy basepoint
  TauOrder order = TauOrder::roots;
  bool ode_only = false;
  double flow_rel_tol = 1e-12, flow_abs_tol = 1e-14;
};

struct CrosscheckPoint {
  cplx t;
  cplx log_tau;      // accumulated along the flow, relative to t0
  cplx ode;          // tau_logderiv
  cplx cft = 0.0;    // finite-difference d log tau/dt of the asymptotic form
  double rel = 0.0;  // |cft - ode| / |ode|
};

struct CrosscheckResult {
  ThetaVector theta0;
  Extraction extraction;
  double cyclic_defect = 0;
  std::vector<CrosscheckPoint> points;
  double max_rel = 0;
};

inline CrosscheckResult run_crosscheck(const CrosscheckSettings& cs) {
  CrosscheckResult res;
  auto init = init_semideg_state(cs.theta_inf, cs.a_t, cs.a_1, cs.seed, cs.t0);
  res.theta0 = init.theta0;
  const int N = static_cast<int>(cs.theta_inf.size());

  if (!cs.ode_only) {
    MonodromyRep rep = monodromy_of_state(init.state, default_loops(cs.t0, cs.y0));
    res.cyclic_defect = rep.cyclic_defect();
    SemiDegParams partial{4, N, init.theta0, cs.theta_inf, {cs.a_t, cs.a_1}, {}, {}};
    res.extraction = extract_sigma_beta(rep, partial);
  }

  FlowSettings fs;
  fs.rel_tol = cs.flow_rel_tol;
  fs.abs_tol = cs.flow_abs_tol;
  fs.path.push_back(cs.t0);
  for (auto t : cs.t_values) fs.path.push_back(t);
  auto traj = integrate_flow(init.state, fs);
  for (std::size_t i = 1; i < traj.size(); ++i) {
    CrosscheckPoint p{traj[i].t, traj[i].log_tau, tau_logderiv(traj[i])};
    if (!cs.ode_only) {
      p.cft = tau_asymptotics_logderiv_fd(res.extraction.params, p.t, cs.order);
      p.rel = std::abs(p.cft - p.ode) / std::abs(p.ode);
      res.max_rel = std::max(res.max_rel, p.rel);
    }
    res.points.push_back(p);
  }
  return res;
}

// log-spaced real points from hi down to lo
inline std::vector<cplx> log_grid(double hi, double lo, int count) {
  std::vector<cplx> out;
  for (int k = 0; k < count; ++k) {
    double f = count == 1 ? 0.0 : double(k) / (count - 1);
    out.push_back(std::exp(std::log(hi) + f * (std::log(lo) - std::log(hi))));
  }
  return out;
}

}  // namespace semideg
