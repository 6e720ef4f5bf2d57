#include "catch_amalgamated.hpp"

#include <semideg/crosscheck.hpp>
#include <semideg/random.hpp>
#include <semideg/taufun.hpp>

#include "oracle.hpp"

using namespace semideg;

namespace {

Vec vec(std::initializer_list<cplx> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (auto x : v) out(i++) = x;
  return out;
}

TauSeriesParams random_params(int N, std::uint64_t seed) {
  auto rng = draw_rng(seed, 0);
  TauSeriesParams p;
  p.theta0 = random_theta(N, rng);
  p.theta_inf = random_theta(N, rng);
  p.a_t = random_charge(rng);
  p.a_1 = random_charge(rng);
  p.sigma = random_theta(N, rng);
  p.beta = random_theta(N, rng, 0.5, 1.0);
  return p;
}

// sigma sorted by real part, beta permuted along
void sort_sigma(TauSeriesParams& p) {
  const int N = p.N();
  std::vector<int> o(N);
  for (int k = 0; k < N; ++k) o[k] = k;
  std::sort(o.begin(), o.end(), [&](int x, int y) { return p.sigma(x).real() < p.sigma(y).real(); });
  Vec s(N), b(N);
  for (int k = 0; k < N; ++k) s(k) = p.sigma(o[k]), b(k) = p.beta(o[k]);
  p.sigma = s, p.beta = b;
}

double min_gap(const Vec& v) {
  double g = 1e300;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    for (Eigen::Index j = i + 1; j < v.size(); ++j) g = std::min(g, std::abs(v(i) - v(j)));
  return g;
}

cplx mod2pii(cplx z) { return {z.real(), std::remainder(z.imag(), 2 * pi)}; }

}  // namespace

TEST_CASE("root lattice enumeration") {
  auto w2 = enumerate_roots(2, 2);
  REQUIRE(w2.size() == 3);
  CHECK(w2[0] == RootLatticeVector{0, 0});
  CHECK(w2[1] == RootLatticeVector{-1, 1});
  CHECK(w2[2] == RootLatticeVector{1, -1});
  CHECK(enumerate_roots(2, 8).size() == 5);
  CHECK(enumerate_roots(3, 2).size() == 7);

  for (int N : {3, 4})
    for (int bound : {2, 6, 8}) {
      std::size_t count = 0;
      const int span = 5;
      std::vector<int> w(N, -2);
      long total = 1;
      for (int i = 0; i < N; ++i) total *= span;
      for (long c = 0; c < total; ++c) {
        long x = c;
        int sum = 0, nsq = 0;
        for (int i = 0; i < N; ++i) {
          int v = int(x % span) - 2;
          x /= span;
          sum += v, nsq += v * v;
        }
        if (sum == 0 && nsq <= bound) ++count;
      }
      auto ws = enumerate_roots(N, bound);
      CHECK(ws.size() == count);
      for (std::size_t i = 1; i < ws.size(); ++i) CHECK(norm_sq(ws[i - 1]) <= norm_sq(ws[i]));
    }
  CHECK_THROWS_AS(enumerate_roots(1, 2), InvalidArgument);
  CHECK_THROWS_AS(enumerate_roots(3, -1), InvalidArgument);
  CHECK(root(3, 0, 2) == RootLatticeVector{1, 0, -1});
}

TEST_CASE("structure constants") {
  for (int N : {2, 3}) {
    auto p = random_params(N, 10 + N);
    CHECK(std::abs(structure_constant_C(p, RootLatticeVector(N, 0)) - 1.0) < 1e-15);

    for (const auto& w : enumerate_roots(N, 6)) {
      if (norm_sq(w) == 0) continue;
      Vec v = lattice_vec(w);
      // against the 50-digit Barnes products
      cplx want = oracle::norm(Vec(-p.theta_inf), p.a_1, Vec(p.sigma + v)) *
                  oracle::norm(Vec(p.sigma + v), p.a_t, p.theta0) /
                  (oracle::norm(Vec(-p.theta_inf), p.a_1, p.sigma) * oracle::norm(p.sigma, p.a_t, p.theta0));
      CHECK(std::abs(structure_constant_C(p, w) / want - 1.0) < 1e-10);
      // inversion
      cplx inv = log_structure_constant_C(p, p.sigma, v) + log_structure_constant_C(p, p.sigma + v, -v);
      CHECK(std::abs(mod2pii(inv)) < 1e-12);
    }
    // telescoping along two roots
    Vec u = lattice_vec(root(N, 0, 1)), v = lattice_vec(root(N, N - 1, 0));
    cplx lhs = log_structure_constant_C(p, p.sigma, u + v);
    cplx rhs = log_structure_constant_C(p, p.sigma, u) + log_structure_constant_C(p, p.sigma + u, v);
    CHECK(std::abs(mod2pii(lhs - rhs)) < 1e-10);
    CHECK_THROWS_AS(structure_constant_C(p, RootLatticeVector(N, 1)), InvalidArgument);
    CHECK_THROWS_AS(structure_constant_C(p, RootLatticeVector(N + 1, 0)), InvalidArgument);
  }
}

TEST_CASE("root-shift structure constant reduces to gamma functions") {
  auto p = random_params(2, 31);
  const cplx s = p.sigma(0), t = p.theta0(0), ti = p.theta_inf(0);
  // sigma -> sigma + (1, -1): Barnes ratios collapse to gamma products
  using oracle::barnes_shift_ratio;
  using oracle::to_mp;
  oracle::cmp r = 1;
  auto sh = [&](cplx x, int n) { return barnes_shift_ratio(to_mp(x), n); };
  // N(-theta_inf, a_1, sigma): arguments 1 - a_1/2 + sigma_l + theta_inf_j
  for (int j = 0; j < 2; ++j) {
    cplx tij = j == 0 ? ti : -ti, t0j = j == 0 ? t : -t;
    r *= sh(1.0 - p.a_1 / 2.0 + s + tij, 1) * sh(1.0 - p.a_1 / 2.0 - s + tij, -1);
    r *= sh(1.0 - p.a_t / 2.0 + t0j - s, -1) * sh(1.0 - p.a_t / 2.0 + t0j + s, 1);
  }
  // 1/G(1 + s_0 - s_1) with s_0 - s_1 -> +2; 1/G(1 - sp_0 + sp_1) with sp = sigma, shift -2
  r /= sh(1.0 + 2.0 * s, 2) * sh(1.0 - 2.0 * s, -2);
  CHECK(std::abs(structure_constant_C(p, {1, -1}) / oracle::to_d(r) - 1.0) < 1e-10);
}

TEST_CASE("leading exponent") {
  TauSeriesParams p;
  p.theta0 = vec({0.13, -0.13});
  p.theta_inf = vec({0.2, -0.2});
  p.a_t = cplx(0.3, 0.02);
  p.a_1 = 0.4;
  p.sigma = vec({cplx(0.21, 0.01), cplx(-0.21, -0.01)});
  p.beta = vec({0.0, 0.0});
  cplx s = p.sigma(0), t = p.theta0(0);
  CHECK(std::abs(tau_exponent(p) - (s * s - t * t - p.a_t * p.a_t / 4.0)) < 1e-15);
  const cplx x = 1e-3;
  CHECK(std::abs(log_tau_asymptotics(p, x, TauOrder::leading) - tau_exponent(p) * std::log(x)) < 1e-15);
  CHECK(std::abs(tau_asymptotics_logderiv(p, x, TauOrder::leading) - tau_exponent(p) / x) < 1e-12);
}

TEST_CASE("root corrections") {
  for (int N : {2, 3}) {
    auto p = random_params(N, 40 + N);
    const cplx t(2e-3, 5e-4);
    // a common shift of beta drops out
    auto q = p;
    q.beta.array() += cplx(0.7, -0.3);
    CHECK(std::abs(log_tau_asymptotics(q, t) - log_tau_asymptotics(p, t)) < 1e-14);
    // beta is 2 pi i periodic
    q = p;
    q.beta(0) += 2.0 * pi * I;
    CHECK(std::abs(mod2pii(log_tau_asymptotics(q, t) - log_tau_asymptotics(p, t))) < 1e-12);

    // the root sum is the |w|^2 <= 2 part of the lattice sum
    auto ws = enumerate_roots(N, 2);
    cplx lead = std::exp(log_tau_asymptotics(p, t, TauOrder::leading));
    CHECK(std::abs(tau_asymptotics(p, t) / tau_lattice_sum(p, t, ws) - 1.0) < 1e-12);
    CHECK(std::abs(tau_lattice_sum(p, t, {RootLatticeVector(N, 0)}) / lead - 1.0) < 1e-14);

    // analytic derivative against a fourth-order stencil
    const cplx h = 1e-3 * t;
    cplx fd = (log_tau_asymptotics(p, t - 2.0 * h) - 8.0 * log_tau_asymptotics(p, t - h) +
               8.0 * log_tau_asymptotics(p, t + h) - log_tau_asymptotics(p, t + 2.0 * h)) /
              (12.0 * h);
    cplx an = tau_asymptotics_logderiv(p, t);
    CHECK(std::abs(fd / an - 1.0) < 1e-9);
    CHECK(std::abs(tau_asymptotics_logderiv_fd(p, t) / an - 1.0) < 1e-7);
  }
}

TEST_CASE("root correction magnitudes") {
  auto p = random_params(3, 45);
  const double t = 1e-3;
  cplx lead = tau_lattice_sum(p, t, {RootLatticeVector(3, 0)});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      auto w = root(3, i, j);
      double term = std::abs(tau_lattice_sum(p, t, {w}) / lead);
      double want = std::abs(structure_constant_C(p, w) * std::exp(p.beta(i) - p.beta(j))) *
                    std::pow(t, 1.0 + (p.sigma(i) - p.sigma(j)).real());
      CHECK(std::abs(term / want - 1.0) < 1e-12);
    }
}

TEST_CASE("lattice sums transform covariantly under sigma shifts") {
  for (int N : {2, 3}) {
    auto p = random_params(N, 50 + N);
    const cplx t = 1e-3;
    auto us = enumerate_roots(N, 8);
    for (const auto& vv : {root(N, 0, 1), root(N, N - 1, 0)}) {
      Vec v = lattice_vec(vv);
      auto q = p;
      q.sigma = p.sigma + v;
      std::vector<RootLatticeVector> shifted;
      for (const auto& u : us) {
        RootLatticeVector d(N);
        for (int i = 0; i < N; ++i) d[i] = u[i] - vv[i];
        shifted.push_back(d);
      }
      cplx lhs = tau_lattice_sum(q, t, shifted) * structure_constant_C(p, vv) * std::exp(p.beta.cwiseProduct(v).sum());
      CHECK(std::abs(lhs / tau_lattice_sum(p, t, us) - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("sigma normalization") {
  auto [s, w] = sigma_normalize(vec({1.3, -1.3}));
  CHECK(w == RootLatticeVector{1, -1});
  CHECK(std::abs(s(0) - 0.3) < 1e-15);
  std::tie(s, w) = sigma_normalize(vec({cplx(0.2, 0.5), cplx(-0.2, -0.5)}));
  CHECK(w == RootLatticeVector{0, 0});

  auto rng = draw_rng(60, 0);
  for (int N : {2, 3, 4})
    for (int i = 0; i < 50; ++i) {
      Vec sig = random_theta(N, rng, 2.5, 0.3);
      auto [out, ww] = sigma_normalize(sig);
      CHECK(max_abs(out + lattice_vec(ww) - sig) < 1e-14);
      CHECK(out.real().maxCoeff() - out.real().minCoeff() <= 1.0 + 1e-12);
      // nothing in the lattice is closer
      double best = (sig - lattice_vec(ww)).real().squaredNorm();
      for (const auto& u : enumerate_roots(N, 40))
        CHECK((sig - lattice_vec(u)).real().squaredNorm() >= best - 1e-12);
    }
  CHECK_THROWS_AS(sigma_normalize(vec({0.2, 0.1})), NormalizationFailure);
}

TEST_CASE("momentum extraction recovers sigma and beta") {
  for (int N : {2, 3})
    for (int i = 0; i < 5; ++i) {
      // well-separated exponents and moderate momenta: near-coincident eigenvalues or |e^beta|
      // spread over e^{+-1} push the rep entries to 1e2 and the eigenvector match loses the
      // digits the round trip needs
      TauSeriesParams p;
      for (std::uint64_t k = 0;; ++k) {
        p = random_params(N, 7000 + 100 * N + 10 * i + k);
        if (min_gap(p.theta0) > 0.1 && min_gap(p.theta_inf) > 0.1 && min_gap(p.sigma) > 0.1) break;
      }
      auto brng = draw_rng(90 + N, i);
      p.beta = random_theta(N, brng, 0.5, 0.3);
      sort_sigma(p);
      p.beta.array() -= p.beta.mean();
      SemiDegParams sp{4, N, p.theta0, p.theta_inf, {p.a_t, p.a_1}, {p.sigma}, {}};

      // a generic basis: conjugate by a random matrix
      auto rng = draw_rng(80 + N, i);
      Mat G(N, N);
      for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c) G(r, c) = cplx(uniform(rng, -1, 1), uniform(rng, -1, 1));
      G += 2.0 * Mat::Identity(N, N);
      for (const auto& rep : {cft_side_monodromy(sp, {p.beta}), assemble_monodromy(beta_to_r(sp, {p.beta}))}) {
        MonodromyRep conj;
        for (const auto& m : rep.M) conj.M.push_back(G * m * G.inverse());
        SemiDegParams partial{4, N, p.theta0, p.theta_inf, {p.a_t, p.a_1}, {}, {}};
        auto ex = extract_sigma_beta(conj, partial);
        CHECK(ex.roundtrip < 1e-8);
        CHECK(max_abs(ex.params.sigma - p.sigma) < 1e-9);
        // beta is defined up to a common constant and 2 pi i in each entry
        for (int k = 1; k < N; ++k)
          CHECK(std::abs(mod2pii(ex.params.beta(k) - ex.params.beta(0) - p.beta(k) + p.beta(0))) < 1e-8);
      }
    }
}

TEST_CASE("extraction rejects a diagonal representation") {
  Vec th = vec({0.2, -0.2});
  MonodromyRep rep;
  for (int k = 0; k < 4; ++k) rep.M.push_back(diag(expv(th, 2.0 * pi * I)));
  SemiDegParams partial{4, 2, th, th, {0.3, 0.4}, {}, {}};
  CHECK_THROWS_AS(extract_sigma_beta(rep, partial), EigenvectorMatchFailure);
  rep.M.pop_back();
  CHECK_THROWS_AS(extract_sigma_beta(rep, partial), InvalidArgument);
}

TEST_CASE("logarithmic grid") {
  auto g = log_grid(1e-3, 1e-4, 10);
  REQUIRE(g.size() == 10);
  CHECK(std::abs(g.front() - 1e-3) < 1e-18);
  CHECK(std::abs(g.back() - 1e-4) < 1e-18);
  for (std::size_t k = 2; k < g.size(); ++k) CHECK(std::abs(g[k] * g[k - 2] / (g[k - 1] * g[k - 1]) - 1.0) < 1e-13);
  CHECK(log_grid(0.5, 0.1, 1).size() == 1);
}
