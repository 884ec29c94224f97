#pragma once
// Closed algebra of centered complex Gaussians c * exp(-pi z^T M z) on R^{2n}:
// twisted products, the symplectic Fourier transform, and polynomial moments.
//
// Determinant square roots are exp(-1/2 sum log lambda_i) with principal
// logs.  Whenever Re M >= 0 the eigenvalues stay in the closed right half
// plane, so the principal branch is the continuous limit of the damped
// (Re M > 0) regime where the Gaussian integral formulas hold literally;
// the oscillatory cases inherit that branch.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <vector>

#include "heis/fields.hpp"
#include "heis/poly.hpp"

namespace heis {

struct CGauss {
  int n = 0;
  Cx c{1.0};
  Eigen::MatrixXcd M;  // 2n x 2n complex symmetric, Re M >= 0

  static CGauss make(int n, Cx c, const Eigen::MatrixXcd& M) {
    if (M.rows() != 2 * n || M.cols() != 2 * n)
      throw std::invalid_argument("CGauss: M must be 2n x 2n");
    CGauss g;
    g.n = n;
    g.c = c;
    g.M = 0.5 * (M + M.transpose());
    return g;
  }

  Cx eval(const Eigen::VectorXd& z) const {
    const Eigen::VectorXcd zc = z.cast<Cx>();
    const Cx q = zc.transpose() * (M * zc);
    return c * std::exp(-M_PI * q);
  }

  Cx eval(const std::vector<double>& z) const {
    return eval(Eigen::Map<const Eigen::VectorXd>(z.data(),
                                                  static_cast<long>(z.size())));
  }
};

// exp(-1/2 sum principal-log lambda_i(M)); no eigenvalue may vanish.
inline Cx det_invsqrt_principal(const Eigen::MatrixXcd& M) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
  Cx s(0.0);
  for (int i = 0; i < M.rows(); ++i) {
    const Cx ev = es.eigenvalues()(i);
    if (std::abs(ev) < 1e-14)
      throw std::invalid_argument("det_invsqrt_principal: singular matrix");
    s += std::log(ev);
  }
  return std::exp(-0.5 * s);
}

inline Cx det_sqrt_principal(const Eigen::MatrixXcd& M) {
  return Cx(1.0) / det_invsqrt_principal(M);
}

inline Cx gauss_integral(const CGauss& g) {
  return g.c * det_invsqrt_principal(g.M);
}

// (a x_mu b)(z) = int a(z-w) b(w) e^{-pi i mu <z-w,w>} dw stays Gaussian.
// The phase sign is the one compatible with the group convolution under the
// central transform at mu. With N = Ma + Mb,
//   M_out = Ma - (Ma - i(mu/2)J) N^{-1} (Ma + i(mu/2)J),
//   c_out = ca cb det(N)^{-1/2}.
inline CGauss twisted_product(const CGauss& a, const CGauss& b, double mu) {
  if (a.n != b.n) throw std::invalid_argument("twisted_product: rank mismatch");
  const Eigen::MatrixXcd J = matJc(a.n);
  const Eigen::MatrixXcd N = a.M + b.M;
  const Eigen::MatrixXcd P = a.M - Cx(0.0, 0.5 * mu) * J;
  const Eigen::MatrixXcd Q = a.M + Cx(0.0, 0.5 * mu) * J;
  const Eigen::MatrixXcd Mout = a.M - P * N.partialPivLu().solve(Q);
  return CGauss::make(a.n, a.c * b.c * det_invsqrt_principal(N), Mout);
}

// f_tri(zeta) = int f(z) e^{-i pi <zeta, z>} dz maps the algebra to itself:
// M -> -1/4 J M^{-1} J, c -> c det(M)^{-1/2}.
inline CGauss symplectic_ft(const CGauss& g) {
  const Eigen::MatrixXcd J = matJc(g.n);
  const Eigen::MatrixXcd Minv =
      g.M.partialPivLu().solve(Eigen::MatrixXcd::Identity(g.M.rows(),
                                                          g.M.cols()));
  return CGauss::make(g.n, g.c * det_invsqrt_principal(g.M),
                      -0.25 * J * Minv * J);
}

// int p(z) g(z) dz by the moment recursion: differentiating
// z^d e^{-pi z^T M z} and integrating gives, for every j,
//   2 pi sum_k M_jk I_{d+e_k} = d_j I_{d-e_j},
// which determines each level |d|+1 from the levels below, starting from
// I_0 = gauss_integral.  Requires Re M > 0 for convergence.
inline Cx gauss_poly_integral(const CGauss& g, const Poly& p) {
  if (p.nvars != 2 * g.n)
    throw std::invalid_argument("gauss_poly_integral: arity mismatch");
  int deg = 0;
  for (const auto& [mi, coeff] : p.terms) {
    int t = 0;
    for (int e : mi) t += e;
    deg = std::max(deg, t);
  }
  const int d = 2 * g.n;
  std::map<MultiIndex, Cx> I;
  I[MultiIndex(d, 0)] = gauss_integral(g);
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(g.M);
  std::vector<MultiIndex> level{MultiIndex(d, 0)};
  for (int l = 0; l < deg; ++l) {
    std::map<MultiIndex, Cx> next;
    for (const MultiIndex& mi : level) {
      Eigen::VectorXcd rhs(d);
      for (int j = 0; j < d; ++j) {
        if (mi[j] == 0) {
          rhs(j) = Cx(0.0);
        } else {
          MultiIndex lo = mi;
          lo[j] -= 1;
          rhs(j) = Cx(static_cast<double>(mi[j])) * I.at(lo);
        }
      }
      const Eigen::VectorXcd x = lu.solve(rhs) / (2.0 * M_PI);
      for (int k = 0; k < d; ++k) {
        MultiIndex hi = mi;
        hi[k] += 1;
        next[hi] = x(k);
      }
    }
    level.clear();
    for (auto& [mi, v] : next) {
      I[mi] = v;
      level.push_back(mi);
    }
  }
  Cx acc(0.0);
  for (const auto& [mi, coeff] : p.terms) acc += coeff * I.at(mi);
  return acc;
}

// Bilinear pairing <a, p b> = int a(z) p(z) b(z) dz.
inline Cx gauss_pairing(const CGauss& a, const CGauss& b, const Poly& p) {
  return gauss_poly_integral(CGauss::make(a.n, a.c * b.c, a.M + b.M), p);
}

inline Cx gauss_pairing(const CGauss& a, const CGauss& b) {
  return gauss_pairing(a, b, Poly::constant(2 * a.n, Cx(1.0)));
}

}  // namespace heis
