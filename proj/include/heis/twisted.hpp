#pragma once
// Partial Fourier transform along the center, mu-twisted convolution on
// R^{2n} lattices, the twisted symbol calculus, and separable
// polynomial-Gaussian test functions with closed-form central transforms.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "heis/fields.hpp"
#include "heis/gauss.hpp"
#include "heis/grid.hpp"
#include "heis/poly.hpp"
#include "heis/schrod.hpp"

namespace heis {

// A sampled function on R^{2n}; axes ordered x_1..x_n, y_1..y_n.
using PlaneFunction = GridFunction;

inline GridFunction make_plane(int n, int dim, double extent) {
  return GridFunction::make(n, std::vector<int>(2 * n, dim),
                            std::vector<double>(2 * n, extent),
                            std::vector<std::string>(2 * n, "z"));
}

inline GridFunction sample_plane(
    int n, int dim, double extent,
    const std::function<Cx(const std::vector<double>&)>& f) {
  GridFunction g = make_plane(n, dim, extent);
  g.fill(f);
  return g;
}

// Lattice relative l2 distance; both grids must share a lattice.
inline double rel_l2_gap(const GridFunction& a, const GridFunction& b) {
  if (a.dims != b.dims)
    throw std::invalid_argument("rel_l2_gap: lattice mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    num += std::norm(a.data[i] - b.data[i]);
    den += std::norm(b.data[i]);
  }
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

// f^mu(z) = int f(z,u) e^{-2 pi i mu u} du, evaluated as the exact
// trigonometric sum on the u-lattice.  The last axis must be the center.
inline GridFunction central_partial_ft(const GridFunction& f, double mu) {
  const int na = f.d();
  if (na < 2 || f.roles[na - 1] != "u")
    throw std::invalid_argument("central_partial_ft: last axis must be u");
  const double hu = f.h(na - 1);
  if (std::abs(mu) > 0.5 / hu)
    throw std::domain_error("central_partial_ft: mu above Nyquist band");
  const int du = f.dims[na - 1];
  std::vector<Cx> phase(du);
  for (int j = 0; j < du; ++j)
    phase[j] = std::polar(hu, -2.0 * M_PI * mu * f.coord(na - 1, j));
  GridFunction out = GridFunction::make(
      f.n, std::vector<int>(f.dims.begin(), f.dims.end() - 1),
      std::vector<double>(f.extents.begin(), f.extents.end() - 1),
      std::vector<std::string>(f.roles.begin(), f.roles.end() - 1));
  for (std::size_t z = 0; z < out.data.size(); ++z) {
    Cx s = 0.0;
    const Cx* row = &f.data[z * static_cast<std::size_t>(du)];
    for (int j = 0; j < du; ++j) s += row[j] * phase[j];
    out.data[z] = s;
  }
  return out;
}

// phi^*(z) = conj(phi(-z)); exact on the reflection-symmetric lattice.
inline GridFunction plane_sharp(const GridFunction& phi) {
  GridFunction out = phi;
  std::vector<int> mir(phi.d());
  for_each_index(phi.dims, [&](const std::vector<int>& idx) {
    for (int a = 0; a < phi.d(); ++a) mir[a] = phi.dims[a] - 1 - idx[a];
    out.at(mir) = std::conj(phi.at(idx));
  });
  return out;
}

// (phi x_mu psi)(z) = int phi(z-z') psi(z') e^{-pi i mu <z-z',z'>} dz', the
// phase sign compatible with the group convolution under the central
// transform at mu.  The symplectic form is alternating, so <z-z',z'> = <z,z'>
// and the phase splits into per-pair factors cached in tables.  z-z' stays on
// the lattice; phi is treated as zero outside its grid.
inline GridFunction twisted_convolve(const GridFunction& phi,
                                     const GridFunction& psi, double mu,
                                     bool* tail_flag = nullptr) {
  if (phi.dims != psi.dims || phi.extents != psi.extents)
    throw std::invalid_argument("twisted_convolve: grid mismatch");
  const int n = phi.n;
  const int D = phi.d();
  if (D != 2 * n)
    throw std::invalid_argument("twisted_convolve: expected 2n axes");
  if (tail_flag != nullptr)
    *tail_flag = phi.tail_flagged() || psi.tail_flagged();

  // T1[a](p,q) = e^{-i pi mu x_a(p) y_a(q)}, T2[a](p,q) = e^{i pi mu y_a(p) x_a(q)}
  std::vector<Eigen::MatrixXcd> T1(n), T2(n);
  for (int a = 0; a < n; ++a) {
    T1[a].resize(phi.dims[a], phi.dims[n + a]);
    for (int p = 0; p < phi.dims[a]; ++p)
      for (int q = 0; q < phi.dims[n + a]; ++q)
        T1[a](p, q) =
            std::polar(1.0, -M_PI * mu * phi.coord(a, p) * phi.coord(n + a, q));
    T2[a].resize(phi.dims[n + a], phi.dims[a]);
    for (int p = 0; p < phi.dims[n + a]; ++p)
      for (int q = 0; q < phi.dims[a]; ++q)
        T2[a](p, q) = std::polar(
            1.0, M_PI * mu * phi.coord(n + a, p) * phi.coord(a, q));
  }

  const std::size_t N = phi.data.size();
  std::vector<int> dec(N * static_cast<std::size_t>(D));
  {
    std::size_t r = 0;
    for_each_index(phi.dims, [&](const std::vector<int>& idx) {
      for (int a = 0; a < D; ++a) dec[r * D + a] = idx[a];
      ++r;
    });
  }

  GridFunction out = phi;
  const double cell = phi.cell();
  std::vector<int> k(D);
  for (std::size_t i = 0; i < N; ++i) {
    const int* zi = &dec[i * D];
    Cx acc = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      if (psi.data[j] == Cx(0.0)) continue;
      const int* zj = &dec[j * D];
      bool in = true;
      for (int a = 0; a < D; ++a) {
        k[a] = zi[a] - zj[a] + (phi.dims[a] - 1) / 2;
        if (k[a] < 0 || k[a] >= phi.dims[a]) {
          in = false;
          break;
        }
      }
      if (!in) continue;
      Cx ph = 1.0;
      for (int a = 0; a < n; ++a)
        ph *= T1[a](zi[a], zj[n + a]) * T2[a](zi[n + a], zj[a]);
      acc += phi.data[phi.flat(k)] * psi.data[j] * ph;
    }
    out.data[i] = acc * cell;
  }
  return out;
}

// f_tri(zeta) = int f(z) e^{-i pi <zeta,z>} dz on the same lattice, with the
// alternating-form kernel split into per-pair tables like twisted_convolve.
inline GridFunction plane_symplectic_ft(const GridFunction& f) {
  const int n = f.n;
  const int D = f.d();
  if (D != 2 * n)
    throw std::invalid_argument("plane_symplectic_ft: expected 2n axes");
  std::vector<Eigen::MatrixXcd> P1(n), P2(n);
  for (int a = 0; a < n; ++a) {
    P1[a].resize(f.dims[a], f.dims[n + a]);
    for (int p = 0; p < f.dims[a]; ++p)
      for (int q = 0; q < f.dims[n + a]; ++q)
        P1[a](p, q) =
            std::polar(1.0, -M_PI * f.coord(a, p) * f.coord(n + a, q));
    P2[a].resize(f.dims[n + a], f.dims[a]);
    for (int p = 0; p < f.dims[n + a]; ++p)
      for (int q = 0; q < f.dims[a]; ++q)
        P2[a](p, q) = std::polar(1.0, M_PI * f.coord(n + a, p) * f.coord(a, q));
  }
  const std::size_t N = f.data.size();
  std::vector<int> dec(N * static_cast<std::size_t>(D));
  {
    std::size_t r = 0;
    for_each_index(f.dims, [&](const std::vector<int>& idx) {
      for (int a = 0; a < D; ++a) dec[r * D + a] = idx[a];
      ++r;
    });
  }
  GridFunction out = f;
  const double cell = f.cell();
  for (std::size_t i = 0; i < N; ++i) {
    const int* zi = &dec[i * D];
    Cx acc = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      if (f.data[j] == Cx(0.0)) continue;
      const int* zj = &dec[j * D];
      Cx ph = 1.0;
      for (int a = 0; a < n; ++a)
        ph *= P1[a](zi[a], zj[n + a]) * P2[a](zi[n + a], zj[a]);
      acc += f.data[j] * ph;
    }
    out.data[i] = acc * cell;
  }
  return out;
}

// Twisted generators on R^{2n}:
// X_j^mu = d/dx_j - i pi mu y_j, Y_j^mu = d/dy_j + i pi mu x_j, U^mu = 2 pi i mu.
inline DiffOp twisted_X(int n, int j, double mu) {
  DiffOp d = DiffOp::partial(2 * n, j);
  d.add_term(MultiIndex(2 * n, 0),
             Poly::var(2 * n, n + j) * Cx(0.0, -M_PI * mu));
  return d;
}

inline DiffOp twisted_Y(int n, int j, double mu) {
  DiffOp d = DiffOp::partial(2 * n, n + j);
  d.add_term(MultiIndex(2 * n, 0), Poly::var(2 * n, j) * Cx(0.0, M_PI * mu));
  return d;
}

inline DiffOp twisted_W(int n, int i, double mu) {
  return i < n ? twisted_X(n, i, mu) : twisted_Y(n, i - n, mu);
}

inline DiffOp twisted_U(int n, double mu) {
  return DiffOp::mult_by(Poly::constant(2 * n, Cx(0.0, 2.0 * M_PI * mu)));
}

inline DiffOp twisted_symbol(const OperatorSpec& s, double mu) {
  const int n = s.n;
  DiffOp out = DiffOp::zero(2 * n);
  for (int j = 0; j < 2 * n; ++j)
    for (int k = 0; k < 2 * n; ++k)
      if (s.A(j, k) != Cx(0.0))
        out = out + (twisted_W(n, j, mu) * twisted_W(n, k, mu)) * s.A(j, k);
  if (s.alpha != Cx(0.0))
    out = out + twisted_U(n, mu) * (Cx(0.0, 1.0) * s.alpha);
  for (std::size_t j = 0; j < s.b.size(); ++j)
    if (s.b[j] != Cx(0.0))
      out = out + twisted_W(n, static_cast<int>(j), mu) * s.b[j];
  return out;
}

inline DiffOp twisted_delta_S(int n, const Eigen::MatrixXcd& S, double mu) {
  return twisted_symbol(OperatorSpec::quadratic(n, A_from_S(S), Cx(0.0)), mu);
}

// Apply an operator with polynomial coefficients to a sampled function by
// finite differences; the operator arity must equal the number of axes.
inline GridFunction apply_plane_operator(const DiffOp& op,
                                         const GridFunction& f,
                                         bool order4 = true) {
  const int D = f.d();
  if (op.nvars != D)
    throw std::invalid_argument("apply_plane_operator: arity mismatch");
  GridFunction out = f;
  std::fill(out.data.begin(), out.data.end(), Cx(0.0));
  for (const auto& [gamma, coeff] : op.terms) {
    GridFunction der = f;
    for (int axis = 0; axis < D; ++axis)
      for (int rep = 0; rep < gamma[axis]; ++rep)
        der = der.derivative(axis, order4);
    std::vector<Cx> xc(D);
    std::size_t flat = 0;
    for_each_index(f.dims, [&](const std::vector<int>& idx) {
      for (int a = 0; a < D; ++a) xc[a] = Cx(f.coord(a, idx[a]));
      out.data[flat] += coeff.eval(xc) * der.data[flat];
      ++flat;
    });
  }
  return out;
}

// -pi z^T M z as a polynomial, offset vars ahead of the block allowed.
inline Poly quadratic_exponent(int arity, int offset,
                               const Eigen::MatrixXcd& M) {
  Poly q = Poly::zero(arity);
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) {
      if (M(i, j) == Cx(0.0)) continue;
      MultiIndex e(arity, 0);
      e[offset + i] += 1;
      e[offset + j] += 1;
      q.add_term(e, -M_PI * M(i, j));
    }
  return q;
}

inline Poly promote_poly(const Poly& p, int arity) {
  Poly out = Poly::zero(arity);
  for (const auto& [a, c] : p.terms) {
    MultiIndex e(arity, 0);
    for (std::size_t i = 0; i < a.size(); ++i) e[i] = a[i];
    out.add_term(e, c);
  }
  return out;
}

// Splits a polynomial on R^{2n} x R_u by degree in the last variable.
inline std::vector<Poly> u_decompose(const Poly& p) {
  const int D = p.nvars - 1;
  int kmax = 0;
  for (const auto& [a, c] : p.terms) kmax = std::max(kmax, a.back());
  std::vector<Poly> out(kmax + 1, Poly::zero(D));
  for (const auto& [a, c] : p.terms) {
    MultiIndex e(a.begin(), a.end() - 1);
    out[a.back()].add_term(e, c);
  }
  return out;
}

// Central Gaussian moments I_k(mu) = int u^k e^{-pi au u^2 + 2 pi i mu u} du
// = q_k(mu) e^{-pi mu^2/au}; differentiating in mu gives I_{k+1} = I_k'/(2 pi i),
// so q_{k+1} = (q_k' - (2 pi mu/au) q_k)/(2 pi i) with q_0 = au^{-1/2}.
inline std::vector<Cx> center_moments(double au, double mu, int kmax) {
  if (au <= 0.0) throw std::invalid_argument("center_moments: au must be > 0");
  std::vector<std::vector<Cx>> q(kmax + 1);
  q[0] = {Cx(1.0 / std::sqrt(au))};
  for (int k = 0; k < kmax; ++k) {
    const auto& a = q[k];
    std::vector<Cx> b(a.size() + 1, Cx(0.0));
    for (std::size_t j = 1; j < a.size(); ++j)
      b[j - 1] += a[j] * static_cast<double>(j);
    for (std::size_t j = 0; j < a.size(); ++j)
      b[j + 1] -= a[j] * (2.0 * M_PI / au);
    for (Cx& v : b) v /= Cx(0.0, 2.0 * M_PI);
    q[k + 1] = std::move(b);
  }
  const double damp = std::exp(-M_PI * mu * mu / au);
  std::vector<Cx> out(kmax + 1);
  for (int k = 0; k <= kmax; ++k) {
    Cx v = 0.0;
    for (std::size_t j = q[k].size(); j-- > 0;) v = v * mu + q[k][j];
    out[k] = v * damp;
  }
  return out;
}

// p(z) e^{-pi z^T M z} on R^{2n}.
struct PolyGauss {
  int n = 0;
  Poly p;
  Eigen::MatrixXcd M;

  static PolyGauss make(int n, Poly p, const Eigen::MatrixXcd& M) {
    if (p.nvars != 2 * n || M.rows() != 2 * n || M.cols() != 2 * n)
      throw std::invalid_argument("PolyGauss: shape mismatch");
    PolyGauss f;
    f.n = n;
    f.p = std::move(p);
    f.M = 0.5 * (M + M.transpose());
    return f;
  }

  PolyExp as_polyexp() const { return PolyExp(p, quadratic_exponent(2 * n, 0, M)); }

  Cx eval(const std::vector<double>& z) const {
    std::vector<Cx> zc(z.begin(), z.end());
    const Eigen::Map<const Eigen::VectorXd> zv(z.data(),
                                               static_cast<long>(z.size()));
    const Eigen::VectorXcd zx = zv.cast<Cx>();
    const Cx q = zx.transpose() * (M * zx);
    return p.eval(zc) * std::exp(-M_PI * q);
  }

  GridFunction sample(int dim, double extent) const {
    return sample_plane(n, dim, extent,
                        [&](const std::vector<double>& z) { return eval(z); });
  }
};

// int g(z) f(z) dz for a Gaussian g against a polynomial Gaussian f.
inline Cx plane_pairing(const CGauss& g, const PolyGauss& f) {
  return gauss_poly_integral(CGauss::make(g.n, g.c, g.M + f.M), f.p);
}

// Separable test function on H_n:
// phi(z,u) = sum_k p_k(z) u^k e^{-pi z^T Mz z} e^{-pi au u^2}.
struct HTestFunction {
  int n = 0;
  std::vector<Poly> pk;  // u-degree coefficients, arity 2n
  Eigen::MatrixXcd Mz;
  double au = 1.0;

  static HTestFunction make(int n, std::vector<Poly> pk,
                            const Eigen::MatrixXcd& Mz, double au) {
    if (pk.empty() || au <= 0.0 || Mz.rows() != 2 * n || Mz.cols() != 2 * n)
      throw std::invalid_argument("HTestFunction: shape mismatch");
    for (const Poly& p : pk)
      if (p.nvars != 2 * n)
        throw std::invalid_argument("HTestFunction: coefficient arity");
    HTestFunction f;
    f.n = n;
    f.pk = std::move(pk);
    f.Mz = 0.5 * (Mz + Mz.transpose());
    f.au = au;
    return f;
  }

  PolyExp as_polyexp() const {
    const int D = 2 * n + 1;
    Poly tot = Poly::zero(D);
    Poly u = Poly::var(D, 2 * n);
    Poly upow = Poly::constant(D, 1.0);
    for (std::size_t k = 0; k < pk.size(); ++k) {
      tot = tot + promote_poly(pk[k], D) * upow;
      upow = upow * u;
    }
    Poly q = quadratic_exponent(D, 0, Mz);
    MultiIndex uu(D, 0);
    uu[2 * n] = 2;
    q.add_term(uu, -M_PI * au);
    return PolyExp(tot, q);
  }

  // phi^mu(z) = int phi(z,u) e^{-2 pi i mu u} du, still polynomial-Gaussian.
  PolyGauss central_ft(double mu) const {
    const std::vector<Cx> I =
        center_moments(au, -mu, static_cast<int>(pk.size()) - 1);
    Poly p = Poly::zero(2 * n);
    for (std::size_t k = 0; k < pk.size(); ++k) p = p + pk[k] * I[k];
    return PolyGauss::make(n, p, Mz);
  }

  GridFunction sample(const std::vector<int>& dims,
                      const std::vector<double>& extents) const {
    std::vector<std::string> roles(2 * n, "z");
    roles.push_back("u");
    GridFunction g = GridFunction::make(n, dims, extents, roles);
    const PolyExp pe = as_polyexp();
    g.fill([&](const std::vector<double>& x) {
      std::vector<Cx> xc(x.begin(), x.end());
      return pe.eval(xc);
    });
    return g;
  }
};

// D phi for a group-side operator D on the separable family: the exponent is
// preserved, so the result decomposes by u-degree again.
inline HTestFunction htest_apply(const DiffOp& op, const HTestFunction& f) {
  if (op.nvars != 2 * f.n + 1)
    throw std::invalid_argument("htest_apply: arity mismatch");
  const PolyExp r = op.apply(f.as_polyexp());
  return HTestFunction::make(f.n, u_decompose(r.p), f.Mz, f.au);
}

}  // namespace heis
