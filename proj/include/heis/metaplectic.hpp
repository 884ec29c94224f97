#pragma once
// Metaplectic Gaussians gamma_{t,S} = prefactor * e^{-i pi z^T A(t) z} with
// A(t) = (1/2) J coth(tS/2), their symplectic transforms via
// B(t) = (1/2) J tanh(tS/2), the mu-rescaled family, semigroup and generator
// gaps, the decay-envelope fit, and the regularized kernel pairing.
//
// The prefactor is the only branch-sensitive quantity.  It is recovered as
// c(t) = c(t0) exp(int_{t0}^t m), where m(tau) = (1/2) tr(SJ A(tau)) is the
// exact logarithmic derivative forced by the generator flow, and
// c(t0) = det(I + iA(t0))^{1/2} is the delta-limit normalization at a point
// t0 small enough that its O(t0) error is negligible.  This continues the
// principal root from the identity without any discrete branch guess.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "heis/fields.hpp"
#include "heis/gauss.hpp"
#include "heis/grid.hpp"
#include "heis/twisted.hpp"

namespace heis {

inline void require_sp(const Eigen::MatrixXd& S) {
  if (S.rows() != S.cols() || S.rows() % 2 != 0 || S.rows() == 0)
    throw std::invalid_argument("S must be 2n x 2n");
  const Eigen::MatrixXd J = matJ(static_cast<int>(S.rows()) / 2);
  if ((S.transpose() * J + J * S).norm() > 1e-10 * (1.0 + S.norm()))
    throw std::invalid_argument("S is not in sp(n,R)");
}

inline bool is_hyperbolic(const Eigen::MatrixXd& S, double* kappa = nullptr) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(S, false);
  double k = std::numeric_limits<double>::infinity();
  for (int i = 0; i < S.rows(); ++i)
    k = std::min(k, std::abs(es.eigenvalues()(i).real()));
  if (kappa != nullptr) *kappa = k;
  return k > 1e-9 * (1.0 + S.norm());
}

namespace detail {

struct GammaNode {
  Eigen::MatrixXd A;
  double dsinh = 0.0;
};

inline GammaNode gamma_node(const Eigen::MatrixXd& S, double tau) {
  const int n = static_cast<int>(S.rows()) / 2;
  const Eigen::MatrixXd half = 0.5 * tau * S;
  const Eigen::MatrixXd sh = half.sinh();
  const Eigen::MatrixXd ch = half.cosh();
  GammaNode node;
  node.dsinh = sh.determinant();
  if (node.dsinh == 0.0)
    throw std::domain_error("gamma: det sinh(tS/2) vanishes");
  Eigen::MatrixXd A = 0.5 * matJ(n) * sh.partialPivLu().solve(ch);
  node.A = 0.5 * (A + A.transpose());
  return node;
}

}  // namespace detail

struct MetaplecticGaussian {
  int n = 0;
  Eigen::MatrixXd S;
  double t = 0.0;
  double mu = 1.0;
  Eigen::MatrixXd A, B;
  double dsinh = 0.0, dcosh = 0.0;
  Cx prefactor{0.0}, cosh_prefactor{0.0};
  int branch_sign = 0;  // prefactor^2 det sinh(tS/2) 4^n, +-1 when resolved

  // gamma_{t,S}(z) = prefactor e^{-i pi z^T A z} at mu = 1.
  CGauss base_gauss() const {
    return CGauss::make(n, prefactor, Cx(0.0, 1.0) * A.cast<Cx>());
  }
  // Its symplectic transform [det cosh(tS/2)]^{-1/2} e^{-i pi z^T B z}.
  CGauss sympl_gauss() const {
    return CGauss::make(n, cosh_prefactor, Cx(0.0, 1.0) * B.cast<Cx>());
  }
  // The mu-rescaled family: mu > 0 scales, mu < 0 also conjugates.
  CGauss gauss() const {
    const double am = std::abs(mu);
    const double scale = std::pow(am, n);
    if (mu > 0.0)
      return CGauss::make(n, scale * prefactor,
                          Cx(0.0, am) * A.cast<Cx>());
    return CGauss::make(n, scale * std::conj(prefactor),
                        Cx(0.0, -am) * A.cast<Cx>());
  }
};

inline MetaplecticGaussian gamma(const Eigen::MatrixXd& S, double t,
                                 double mu = 1.0) {
  require_sp(S);
  if (!(t > 0.0)) throw std::domain_error("gamma: t must be positive");
  if (mu == 0.0) throw std::domain_error("gamma: mu must be nonzero");
  const int n = static_cast<int>(S.rows()) / 2;

  MetaplecticGaussian g;
  g.n = n;
  g.S = S;
  g.t = t;
  g.mu = mu;

  const Eigen::MatrixXd half = 0.5 * t * S;
  const Eigen::MatrixXd sh = half.sinh();
  const Eigen::MatrixXd ch = half.cosh();
  g.dsinh = sh.determinant();
  g.dcosh = ch.determinant();
  if (std::abs(g.dsinh) < 1e-12)
    throw std::domain_error("gamma: singular parameter t");
  {
    Eigen::MatrixXd A = 0.5 * matJ(n) * sh.partialPivLu().solve(ch);
    g.A = 0.5 * (A + A.transpose());
    Eigen::MatrixXd B = 0.5 * matJ(n) * ch.partialPivLu().solve(sh);
    g.B = 0.5 * (B + B.transpose());
  }

  const Eigen::MatrixXd ASJ = S * matJ(n);
  const auto m_reg = [&](double tau) {
    // m(tau) + n/tau, regular at 0; the 1/tau parts cancel analytically.
    const detail::GammaNode node = detail::gamma_node(S, tau);
    if (node.dsinh * g.dsinh < 0.0)
      throw std::domain_error("gamma: branch path crosses a caustic");
    return 0.5 * (ASJ * node.A).trace() + n / tau;
  };

  const double t0 = std::min(1e-6, 0.5 * t);
  const int N = 512;  // Simpson panels for the regular part
  const double h = (t - t0) / N;
  double simpson = m_reg(t0) + m_reg(t);
  for (int k = 1; k < N; ++k)
    simpson += (k % 2 == 1 ? 4.0 : 2.0) * m_reg(t0 + k * h);
  const double integral = simpson * h / 3.0 - n * std::log(t / t0);

  const Eigen::MatrixXcd anchor =
      Eigen::MatrixXcd::Identity(2 * n, 2 * n) +
      Cx(0.0, 1.0) * detail::gamma_node(S, t0).A.cast<Cx>();
  const Cx log_c0 = std::log(det_sqrt_principal(anchor));
  g.prefactor = std::exp(log_c0 + integral);

  g.cosh_prefactor =
      g.prefactor * det_invsqrt_principal(Cx(0.0, 1.0) * g.A.cast<Cx>());

  const Cx bs = g.prefactor * g.prefactor * g.dsinh * std::pow(4.0, n);
  if (std::abs(bs - Cx(1.0)) < 1e-3)
    g.branch_sign = 1;
  else if (std::abs(bs + Cx(1.0)) < 1e-3)
    g.branch_sign = -1;
  return g;
}

// ||gamma_{t1} x_1 gamma_{t2} - gamma_{t1+t2}||_2 / ||gamma_{t1+t2}||_2 on the
// sample lattice; a vanishing leg makes the product the identity element.
inline double semigroup_check(const Eigen::MatrixXd& S, double t1, double t2,
                              int dim = 129, double extent = 6.0) {
  if (t1 == 0.0 || t2 == 0.0) return 0.0;
  const int n = static_cast<int>(S.rows()) / 2;
  const CGauss prod = twisted_product(gamma(S, t1).base_gauss(),
                                      gamma(S, t2).base_gauss(), 1.0);
  const CGauss ref = gamma(S, t1 + t2).base_gauss();
  const GridFunction gp = sample_plane(
      n, dim, extent, [&](const std::vector<double>& z) { return prod.eval(z); });
  const GridFunction gr = sample_plane(
      n, dim, extent, [&](const std::vector<double>& z) { return ref.eval(z); });
  return rel_l2_gap(gp, gr);
}

// Compares (f x_mu gamma^mu_t - f)/t, Richardson-extrapolated over
// t in {1e-2, 1e-3}, against (i/4 pi mu) Delta^mu_S f.
inline double generator_check(const Eigen::MatrixXd& S, const CGauss& f,
                              double mu = 1.0, int dim = 65,
                              double extent = 5.0) {
  require_sp(S);
  const int n = f.n;
  const DiffOp T =
      twisted_delta_S(n, S.cast<Cx>(), mu) * Cx(0.0, 1.0 / (4.0 * M_PI * mu));
  const PolyExp fe(Poly::constant(2 * n, f.c), quadratic_exponent(2 * n, 0, f.M));
  const PolyExp Tf = T.apply(fe);
  const GridFunction ref =
      sample_plane(n, dim, extent, [&](const std::vector<double>& z) {
        std::vector<Cx> zc(z.begin(), z.end());
        return Tf.eval(zc);
      });
  const auto diffquot = [&](double t) {
    const CGauss prod = twisted_product(f, gamma(S, t, mu).gauss(), mu);
    return sample_plane(n, dim, extent, [&](const std::vector<double>& z) {
      return (prod.eval(z) - f.eval(z)) / t;
    });
  };
  const GridFunction d1 = diffquot(1e-2);
  const GridFunction d2 = diffquot(1e-3);
  GridFunction ext = d2;
  for (std::size_t i = 0; i < ext.data.size(); ++i)
    ext.data[i] = (10.0 * d2.data[i] - d1.data[i]) / 9.0;
  return rel_l2_gap(ext, ref);
}

// Envelope fit for |<gamma_{t,S}, phi>| <= C / cosh(beta t): C is the rigorous
// bound 4^{-n} ||phi_tri||_1 (the transform-side pairing with |gamma_tri| <= 1
// for hyperbolic S), beta the largest feasible rate over the scanned t.
struct DecayFit {
  double beta = 0.0;
  double env_const = 0.0;
  bool envelope_ok = false;
  std::vector<double> ts, ps;
};

inline DecayFit decay_fit(const Eigen::MatrixXd& S, const PolyGauss& phi,
                          const std::vector<double>& ts, int dim = 65,
                          double extent = 6.0) {
  DecayFit fit;
  fit.ts = ts;
  const GridFunction tr = plane_symplectic_ft(phi.sample(dim, extent));
  fit.env_const = tr.l1() * std::pow(4.0, -phi.n);
  for (double t : ts)
    fit.ps.push_back(std::abs(plane_pairing(gamma(S, t).base_gauss(), phi)));
  const auto feasible = [&](double beta) {
    for (std::size_t i = 0; i < ts.size(); ++i)
      if (fit.ps[i] * std::cosh(beta * ts[i]) > fit.env_const) return false;
    return true;
  };
  if (!feasible(0.0)) return fit;
  fit.envelope_ok = true;
  double lo = 0.0, hi = 1.0;
  while (feasible(hi) && hi < 1e3) hi *= 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  fit.beta = lo;
  return fit;
}

struct KtildeResult {
  Cx value{0.0};
  int order = 0;      // the M actually used
  int min_order = 0;  // smallest admissible M from the measured mu-growth
  double growth_slope = 0.0;
  double beta = 0.0, t_max = 0.0, mu_max = 0.0;
  int nt = 0, nmu = 0;
};

// <K~, phi> = -int_0^inf int_R <gamma^mu_{t,S}, phi^{-mu}> e^{-i alpha t/2}
//             (i / 4 pi mu) (2 pi i mu)^{M+1} dmu dt
//           = +int_0^inf int_R <gamma^mu_{t,S}, phi^{-mu}> e^{-i alpha t/2}
//             (2 pi i mu)^M / 2 dmu dt,
// the kernel for which f -> f * K~ inverts L_alpha against U^{M+1}.
// t truncates where cosh(beta t) exceeds 1e8, mu where the central transform
// of phi is below 1e-8 of its peak; both inner pairings are closed-form.
inline KtildeResult ktilde_pairing(const Eigen::MatrixXd& S, Cx alpha, int M,
                                   const HTestFunction& phi, int nt = 256,
                                   int nmu = 128) {
  require_sp(S);
  double kappa = 0.0;
  if (!is_hyperbolic(S, &kappa))
    throw std::domain_error("ktilde_pairing: S must be hyperbolic");
  if (alpha.imag() > 1e-12)
    throw std::domain_error("ktilde_pairing: Im alpha must be <= 0");
  if (M < 0) throw std::invalid_argument("ktilde_pairing: M must be >= 0");
  if (nt % 2 != 0) ++nt;
  if (nmu % 2 != 0) ++nmu;

  KtildeResult res;
  res.order = M;
  res.beta = 0.45 * kappa;  // envelope rate kappa/2 with a safety margin
  res.t_max = std::acosh(1e8) / res.beta;
  res.mu_max = 1.5 * std::sqrt(phi.au * std::log(1e8) / M_PI);
  res.nt = nt;
  res.nmu = nmu;

  // Re-tags the branch-tracked object at another mu; the branch data is
  // mu-independent, only the (4.23) rescaling changes.
  const auto pairing = [&](const MetaplecticGaussian& gt, double mu) {
    MetaplecticGaussian tmp = gt;
    tmp.mu = mu;
    return plane_pairing(tmp.gauss(), phi.central_ft(-mu));
  };

  // Small-mu growth of the pairing fixes the least admissible order: the
  // original measure dmu/mu needs slope + M > -1 for absolute integrability.
  {
    const MetaplecticGaussian gt =
        gamma(S, std::min(1.0 / kappa, 0.25 * res.t_max));
    const double m1 = 1e-3 * res.mu_max, m2 = 4e-3 * res.mu_max;
    const double v1 = std::abs(pairing(gt, m1));
    const double v2 = std::abs(pairing(gt, m2));
    res.growth_slope =
        (std::log(v2) - std::log(v1)) / (std::log(m2) - std::log(m1));
    res.min_order =
        std::max(0, static_cast<int>(std::floor(-1.0 - res.growth_slope)) + 1);
    if (M < res.min_order)
      throw std::invalid_argument(
          "ktilde_pairing: M below the computed decay order");
  }

  const double t_floor = 1e-4;
  const double mu_floor = 1e-6 * res.mu_max;
  const double ht = (res.t_max - t_floor) / nt;
  const double hm = (res.mu_max - mu_floor) / nmu;

  const auto mu_integral = [&](const MetaplecticGaussian& gt) {
    Cx acc = 0.0;
    for (int sgn : {1, -1}) {
      Cx simpson = 0.0;
      for (int j = 0; j <= nmu; ++j) {
        const double mu = sgn * (mu_floor + j * hm);
        Cx w = pairing(gt, mu);
        Cx fac = 0.5;
        for (int r = 0; r < M; ++r) fac *= Cx(0.0, 2.0 * M_PI * mu);
        w *= fac;
        simpson += (j == 0 || j == nmu ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0)) * w;
      }
      acc += simpson * hm / 3.0;
    }
    return acc;
  };

  Cx total = 0.0;
  Cx first_node = 0.0;
  for (int k = 0; k <= nt; ++k) {
    const double t = t_floor + k * ht;
    const MetaplecticGaussian gt = gamma(S, t);
    const Cx node = mu_integral(gt) * std::exp(Cx(0.0, -0.5) * alpha * t);
    if (k == 0) first_node = node;
    total += (k == 0 || k == nt ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0)) * node;
  }
  total = total * ht / 3.0 + first_node * t_floor;  // [0, t_floor] strip
  res.value = total;
  return res;
}

}  // namespace heis
