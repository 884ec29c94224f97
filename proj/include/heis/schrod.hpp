#pragma once

// Group Fourier transform: representation action, operator symbols, kernels,
// Plancherel and inversion quadratures, and the Hermite-basis null-vector
// test for transposed symbols.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "heis/core.hpp"
#include "heis/fields.hpp"
#include "heis/grid.hpp"
#include "heis/hermite.hpp"
#include "heis/poly.hpp"

namespace heis {

using ScalarField = std::function<Cx(const std::vector<double>&)>;

// [pi_mu(p,q,u) f](x) = e^{2 pi i mu (u + q.x + q.p/2)} f(x+p)
inline ScalarField repr_apply(double mu, const GroupPoint& g, ScalarField f) {
  if (mu == 0.0) throw std::invalid_argument("repr_apply: mu must be nonzero");
  const int n = g.n();
  std::vector<double> p(n), q(n);
  for (int j = 0; j < n; ++j) {
    p[j] = g.x(j);
    q[j] = g.y(j);
  }
  const double u = g.u;
  return [mu, p, q, u, f, n](const std::vector<double>& x) -> Cx {
    double phase = u;
    std::vector<double> xs(n);
    for (int j = 0; j < n; ++j) {
      phase += q[j] * (x[j] + 0.5 * p[j]);
      xs[j] = x[j] + p[j];
    }
    return std::polar(1.0, 2.0 * M_PI * mu * phase) * f(xs);
  };
}

// Left-invariant operator data: sum_{jk} A_jk W_j W_k + i alpha U + sum b_j W_j
struct OperatorSpec {
  int n = 1;
  Eigen::MatrixXcd A;  // 2n x 2n, symmetric
  Cx alpha{0.0};
  std::vector<Cx> b;  // optional first-order part, size 2n or empty

  static OperatorSpec quadratic(int n, const Eigen::MatrixXcd& A, Cx alpha) {
    OperatorSpec s;
    s.n = n;
    s.A = A;
    s.alpha = alpha;
    if (A.rows() != 2 * n || A.cols() != 2 * n ||
        (A - A.transpose()).norm() > 1e-12 * (1.0 + A.norm()))
      throw std::invalid_argument("OperatorSpec: A must be symmetric 2n x 2n");
    return s;
  }
  static OperatorSpec first_order(int n, const std::vector<Cx>& b) {
    OperatorSpec s;
    s.n = n;
    s.A = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    s.b = b;
    return s;
  }
};

// Transpose in the group algebra: tW = -W termwise, the quadratic part is
// invariant by symmetry of A.
inline OperatorSpec transpose_spec(OperatorSpec s) {
  s.alpha = -s.alpha;
  for (Cx& v : s.b) v = -v;
  return s;
}

// Symbols are differential operators in x_1..x_n with polynomial
// coefficients in (x, mu); the parameter mu is carried as an extra last
// variable that is never differentiated.
inline DiffOp sym_X(int n, int j) { return DiffOp::partial(n + 1, j); }

inline DiffOp sym_Y(int n, int j) {
  Poly c = Poly::zero(n + 1);
  MultiIndex m(n + 1, 0);
  m[j] = 1;
  m[n] = 1;  // x_j * mu
  c.add_term(m, Cx(0.0, 2.0 * M_PI));
  return DiffOp::mult_by(c);
}

inline DiffOp sym_U(int n) {
  Poly c = Poly::zero(n + 1);
  MultiIndex m(n + 1, 0);
  m[n] = 1;
  c.add_term(m, Cx(0.0, 2.0 * M_PI));
  return DiffOp::mult_by(c);
}

inline DiffOp sym_W(int n, int j) {
  return j < n ? sym_X(n, j) : sym_Y(n, j - n);
}

inline DiffOp operator_symbol(const OperatorSpec& s) {
  const int n = s.n;
  DiffOp out = DiffOp::zero(n + 1);
  for (int j = 0; j < 2 * n; ++j)
    for (int k = 0; k < 2 * n; ++k)
      if (s.A(j, k) != Cx(0.0))
        out = out + (sym_W(n, j) * sym_W(n, k)) * s.A(j, k);
  if (s.alpha != Cx(0.0)) out = out + sym_U(n) * (Cx(0.0, 1.0) * s.alpha);
  for (std::size_t j = 0; j < s.b.size(); ++j)
    if (s.b[j] != Cx(0.0))
      out = out + sym_W(n, static_cast<int>(j)) * s.b[j];
  return out;
}

// Substitute a numeric value for the mu variable, yielding an operator in x.
inline DiffOp symbol_at_mu(const DiffOp& sym, Cx mu) {
  const int n = sym.nvars - 1;
  std::vector<std::vector<Cx>> M(n + 1, std::vector<Cx>(n, Cx(0.0)));
  std::vector<Cx> shift(n + 1, Cx(0.0));
  for (int i = 0; i < n; ++i) M[i][i] = Cx(1.0);
  shift[n] = mu;
  DiffOp out = DiffOp::zero(n);
  for (const auto& [gamma, coeff] : sym.terms) {
    if (gamma[n] != 0)
      throw std::invalid_argument("symbol_at_mu: derivative in mu");
    MultiIndex g2(gamma.begin(), gamma.end() - 1);
    out.add_term(g2, subst_linear(coeff, M, shift));
  }
  return out;
}

// Apply a symbol to a sampled function on R^n by finite differences.
inline GridFunction apply_symbol_grid(const DiffOp& sym, Cx mu,
                                      const GridFunction& f,
                                      bool order4 = true) {
  const int n = sym.nvars - 1;
  if (static_cast<int>(f.dims.size()) != n)
    throw std::invalid_argument("apply_symbol_grid: arity mismatch");
  const DiffOp op = symbol_at_mu(sym, mu);
  GridFunction out = f;
  std::fill(out.data.begin(), out.data.end(), Cx(0.0));
  for (const auto& [gamma, coeff] : op.terms) {
    GridFunction der = f;
    for (int axis = 0; axis < n; ++axis)
      for (int rep = 0; rep < gamma[axis]; ++rep)
        der = der.derivative(axis, order4);
    std::vector<int> idx(n, 0);
    std::vector<double> xc(n);
    for (std::size_t flat = 0; flat < out.data.size(); ++flat) {
      for (int a = 0; a < n; ++a) xc[a] = f.coord(a, idx[a]);
      std::vector<Cx> xcx(xc.begin(), xc.end());
      out.data[flat] += coeff.eval(xcx) * der.data[flat];
      for (int a = n - 1; a >= 0; --a) {
        if (++idx[a] < f.dims[a]) break;
        idx[a] = 0;
      }
    }
  }
  return out;
}

// Partial Fourier transform of f(p,q,u) in (q,u) at (s, mu), sampled on
// p-lattice x s-grid. The kernel of the transform at mu is
// K(x,y) = G2(x-y, mu(x+y)/2), so every kernel quantity below reduces to G2.
// The u-sum is an exact-frequency discrete transform; |mu| must stay under
// the u-axis Nyquist band.
inline GridFunction partial_qu_transform(const GridFunction& f, double mu,
                                         double s_extent = 0.0,
                                         int s_dims = 0) {
  const int n = f.n;
  const int d = 2 * n + 1;
  const double hu = f.h(d - 1);
  if (std::abs(mu) > 0.5 / hu)
    throw std::invalid_argument("partial_qu_transform: |mu| exceeds " +
                                std::to_string(0.5 / hu));
  // the q-lattice resolves frequencies only inside its Nyquist band; beyond
  // it the discrete transform aliases, so the s-grid is capped there
  if (s_extent <= 0.0) s_extent = std::min(f.extents[n], 0.5 / f.h(n));
  if (s_dims <= 0) s_dims = f.dims[n];

  std::vector<int> dims(2 * n);
  std::vector<double> extents(2 * n);
  std::vector<std::string> roles(2 * n);
  for (int a = 0; a < n; ++a) {
    dims[a] = f.dims[a];
    extents[a] = f.extents[a];
    roles[a] = "p";
    dims[n + a] = s_dims;
    extents[n + a] = s_extent;
    roles[n + a] = "s";
  }
  GridFunction out = GridFunction::make(n, dims, extents, roles);

  // stage 1: u-transform at exact frequency mu for every (p,q) node
  const int nu = f.dims[d - 1];
  const std::size_t zcount = f.data.size() / nu;
  std::vector<Cx> twiddle(nu);
  for (int k = 0; k < nu; ++k)
    twiddle[k] =
        std::polar(hu, -2.0 * M_PI * mu * f.coord(d - 1, k));
  std::vector<Cx> stage1(zcount);
  for (std::size_t m = 0; m < zcount; ++m) {
    Cx acc(0.0);
    const std::size_t base = m * nu;
    for (int k = 0; k < nu; ++k) acc += f.data[base + k] * twiddle[k];
    stage1[m] = acc;
  }

  // stage 2: q-transform at each s node
  double hq_cell = 1.0;
  for (int a = 0; a < n; ++a) hq_cell *= f.h(n + a);
  std::size_t qcount = 1;
  for (int a = 0; a < n; ++a) qcount *= f.dims[n + a];
  std::size_t pcount = zcount / qcount;

  std::vector<int> qidx(n, 0);
  std::vector<std::vector<double>> qc(qcount, std::vector<double>(n));
  for (std::size_t m = 0; m < qcount; ++m) {
    for (int a = 0; a < n; ++a) qc[m][a] = f.coord(n + a, qidx[a]);
    for (int a = n - 1; a >= 0; --a) {
      if (++qidx[a] < f.dims[n + a]) break;
      qidx[a] = 0;
    }
  }
  std::vector<int> sidx(n, 0);
  std::size_t scount = out.data.size() / pcount;
  std::vector<double> sc(n);
  for (std::size_t si = 0; si < scount; ++si) {
    for (int a = 0; a < n; ++a) sc[a] = out.coord(n + a, sidx[a]);
    for (std::size_t pi = 0; pi < pcount; ++pi) {
      Cx acc(0.0);
      for (std::size_t qi = 0; qi < qcount; ++qi) {
        double dot = 0.0;
        for (int a = 0; a < n; ++a) dot += sc[a] * qc[qi][a];
        acc += stage1[pi * qcount + qi] * std::polar(1.0, -2.0 * M_PI * dot);
      }
      out.data[pi * scount + si] = acc * hq_cell;
    }
    for (int a = n - 1; a >= 0; --a) {
      if (++sidx[a] < out.dims[n + a]) break;
      sidx[a] = 0;
    }
  }
  return out;
}

// Kernel K(x,y) on the x-lattice of f (n=1): exact-frequency evaluation at
// s = mu(x+y)/2 along antidiagonals, x-y resolved by index arithmetic.
inline GridFunction fourier_kernel(const GridFunction& f, double mu) {
  const int n = f.n;
  if (n != 1)
    throw std::invalid_argument("fourier_kernel: sampled kernels are 1-d");
  const double hu = f.h(2);
  if (std::abs(mu) > 0.5 / hu)
    throw std::invalid_argument("fourier_kernel: |mu| exceeds " +
                                std::to_string(0.5 / hu));
  const int N = f.dims[0];
  GridFunction K = GridFunction::make(
      1, {N, N}, {f.extents[0], f.extents[0]}, {"x", "y"});

  // stage 1 as above
  const int nu = f.dims[2], nq = f.dims[1];
  std::vector<Cx> tw(nu);
  for (int k = 0; k < nu; ++k)
    tw[k] = std::polar(hu, -2.0 * M_PI * mu * f.coord(2, k));
  std::vector<Cx> stage1(static_cast<std::size_t>(N) * nq);
  for (int p = 0; p < N; ++p)
    for (int q = 0; q < nq; ++q) {
      Cx acc(0.0);
      const std::size_t base = (static_cast<std::size_t>(p) * nq + q) * nu;
      for (int k = 0; k < nu; ++k) acc += f.data[base + k] * tw[k];
      stage1[static_cast<std::size_t>(p) * nq + q] = acc;
    }

  const double hq = f.h(1);
  const double s_nyquist = 0.5 / hq;
  std::vector<Cx> row(N);
  for (int dsum = 0; dsum <= 2 * (N - 1); ++dsum) {
    const double s = mu * 0.5 * (f.coord(0, 0) * 2 + dsum * f.h(0));
    if (std::abs(s) > s_nyquist) {
      // beyond the q-grid Nyquist band the discrete transform aliases; for
      // resolved inputs the true kernel is below quadrature accuracy there
      std::fill(row.begin(), row.end(), Cx(0.0));
    } else {
      for (int p = 0; p < N; ++p) {
        Cx acc(0.0);
        for (int q = 0; q < nq; ++q)
          acc += stage1[static_cast<std::size_t>(p) * nq + q] *
                 std::polar(1.0, -2.0 * M_PI * s * f.coord(1, q));
        row[p] = acc * hq;
      }
    }
    const int lo = std::max(0, dsum - (N - 1));
    const int hi = std::min(N - 1, dsum);
    for (int i = lo; i <= hi; ++i) {
      const int j = dsum - i;
      const int pidx = i - j + (N - 1) / 2;
      K.data[static_cast<std::size_t>(i) * N + j] =
          (pidx >= 0 && pidx < N) ? row[pidx] : Cx(0.0);
    }
  }
  return K;
}

// (K1 o K2)(x,y) = int K1(x,t) K2(t,y) dt
inline GridFunction kernel_compose(const GridFunction& K1,
                                   const GridFunction& K2) {
  if (K1.dims != K2.dims || K1.extents != K2.extents)
    throw std::invalid_argument("kernel_compose: grid mismatch");
  const int N = K1.dims[0];
  const double h = K1.h(0);
  GridFunction out = K1;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      Cx acc(0.0);
      for (int t = 0; t < N; ++t)
        acc += K1.data[static_cast<std::size_t>(i) * N + t] *
               K2.data[static_cast<std::size_t>(t) * N + j];
      out.data[static_cast<std::size_t>(i) * N + j] = acc * h;
    }
  return out;
}

inline double kernel_hs_norm(const GridFunction& K) { return K.l2(); }

// Spectral derivative on a 1-d grid by direct discrete Fourier transform;
// assumes the samples decay to negligible size at the boundary.
inline GridFunction spectral_derivative_1d(const GridFunction& f, int order) {
  const int N = f.dims[0];
  const double h = f.h(0);
  std::vector<Cx> hat(N, Cx(0.0));
  for (int k = 0; k < N; ++k) {
    Cx acc(0.0);
    for (int j = 0; j < N; ++j)
      acc += f.data[j] *
             std::polar(1.0, -2.0 * M_PI * double(j) * double(k) / N);
    hat[k] = acc;
  }
  for (int k = 0; k < N; ++k) {
    const int kw = k <= N / 2 ? k : k - N;  // symmetric frequency wrap
    Cx m(1.0);
    const Cx base(0.0, 2.0 * M_PI * kw / (N * h));
    for (int r = 0; r < order; ++r) m *= base;
    hat[k] *= m;
  }
  GridFunction out = f;
  for (int j = 0; j < N; ++j) {
    Cx acc(0.0);
    for (int k = 0; k < N; ++k)
      acc += hat[k] * std::polar(1.0, 2.0 * M_PI * double(j) * double(k) / N);
    out.data[j] = acc / double(N);
  }
  return out;
}

// Apply a symbol to 1-d samples with spectral differentiation.
inline GridFunction apply_symbol_spectral(const DiffOp& sym, Cx mu,
                                          const GridFunction& f) {
  if (sym.nvars != 2 || f.dims.size() != 1)
    throw std::invalid_argument("apply_symbol_spectral: n=1 only");
  const DiffOp op = symbol_at_mu(sym, mu);
  GridFunction out = f;
  std::fill(out.data.begin(), out.data.end(), Cx(0.0));
  for (const auto& [gamma, coeff] : op.terms) {
    GridFunction der = gamma[0] > 0 ? spectral_derivative_1d(f, gamma[0]) : f;
    for (int j = 0; j < f.dims[0]; ++j) {
      const std::vector<Cx> xc = {Cx(f.coord(0, j))};
      out.data[j] += coeff.eval(xc) * der.data[j];
    }
  }
  return out;
}

struct EigenRelationRow {
  double mu = 0.0;
  int k = 0;
  Cx predicted{0.0};
  double gap = 0.0;  // relative L2 distance of applied vs predicted
};

// Applied symbol of sum A W W + i alpha U against the closed-form eigenvalue
// -2 pi |mu| (2k+1+sign(mu) alpha) on scaled Hermite samples (n=1, A=I).
inline EigenRelationRow eigen_relation_check(Cx alpha, double mu, int k,
                                             int dims = 257) {
  const double tau = std::sqrt(2.0 * M_PI * std::abs(mu));
  const double extent = (std::sqrt(2.0 * k + 1.0) + 11.0) / tau;
  GridFunction hk = GridFunction::make(1, {dims}, {extent}, {"x"});
  hk.fill([&](const std::vector<double>& x) {
    return Cx(hermite_scaled(k, mu, x[0]));
  });
  const OperatorSpec spec = OperatorSpec::quadratic(
      1, Eigen::MatrixXcd::Identity(2, 2), alpha);
  const GridFunction applied =
      apply_symbol_spectral(operator_symbol(spec), Cx(mu), hk);
  EigenRelationRow row;
  row.mu = mu;
  row.k = k;
  const double sgn = mu >= 0 ? 1.0 : -1.0;
  row.predicted =
      -2.0 * M_PI * std::abs(mu) * (Cx(2.0 * k + 1.0) + sgn * alpha);
  double num = 0.0, den = 0.0;
  for (int j = 0; j < dims; ++j) {
    num += std::norm(applied.data[j] - row.predicted * hk.data[j]);
    den += std::norm(hk.data[j]);
  }
  // The eigenvalue vanishes on the nonsolvability locus (alpha = -(2k+1),
  // mu > 0); normalize by the level spacing so the gap stays defined there.
  const double scale =
      std::max(std::abs(row.predicted), 2.0 * M_PI * std::abs(mu));
  row.gap = std::sqrt(num / den) / scale;
  return row;
}

// |mu|^n ||fhat(pi_mu)||_HS^2 = int int |G2(v,s)|^2 dv ds: the change of
// variables (x,y) -> (x-y, mu(x+y)/2) keeps the domain O(1) uniformly in mu.
inline double plancherel_integrand(const GridFunction& f, double mu,
                                   double s_extent = 0.0, int s_dims = 0) {
  const GridFunction g2 = partial_qu_transform(f, mu, s_extent, s_dims);
  const double l2 = g2.l2();
  return l2 * l2;
}

// Geometric positive nodes accumulating at 0, ascending.
inline std::vector<double> mu_nodes_geometric(double mu_min, double mu_max,
                                              int count) {
  std::vector<double> nodes(count);
  const double t0 = std::log(mu_min), t1 = std::log(mu_max);
  for (int i = 0; i < count; ++i)
    nodes[i] = std::exp(t0 + (t1 - t0) * i / (count - 1));
  return nodes;
}

// Simpson in t = log mu of int F(mu) d mu over the node range; an even node
// count closes with a 3/8 panel so any count >= 4 works.
inline Cx log_simpson(const std::vector<double>& nodes,
                      const std::function<Cx(double)>& F) {
  const int m = static_cast<int>(nodes.size());
  if (m < 4 && m != 3)
    throw std::invalid_argument("log_simpson: need at least 3 nodes");
  const double h = (std::log(nodes.back()) - std::log(nodes.front())) / (m - 1);
  std::vector<double> w(m, 0.0);
  const int simpson_end = (m % 2 == 1) ? m - 1 : m - 4;  // interval index
  for (int i = 0; i < simpson_end; i += 2) {
    w[i] += 1.0 / 3.0;
    w[i + 1] += 4.0 / 3.0;
    w[i + 2] += 1.0 / 3.0;
  }
  if (m % 2 == 0) {
    const int b = m - 4;
    w[b] += 3.0 / 8.0;
    w[b + 1] += 9.0 / 8.0;
    w[b + 2] += 9.0 / 8.0;
    w[b + 3] += 3.0 / 8.0;
  }
  Cx acc(0.0);
  for (int i = 0; i < m; ++i) acc += w[i] * F(nodes[i]) * nodes[i];
  return acc * h;
}

struct PlancherelResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
};

inline PlancherelResult plancherel_check(const GridFunction& f,
                                         double mu_min = 1e-4,
                                         double mu_max = 2.0,
                                         int nodes_per_side = 32) {
  PlancherelResult r;
  const double l2 = f.l2();
  r.lhs = l2 * l2;
  const auto nodes = mu_nodes_geometric(mu_min, mu_max, nodes_per_side);
  Cx rhs(0.0);
  for (int sgn : {+1, -1})
    rhs += log_simpson(nodes, [&](double m) {
      return Cx(plancherel_integrand(f, sgn * m));
    });
  r.rhs = rhs.real();
  r.gap = std::abs(r.lhs - r.rhs) / std::max({r.lhs, r.rhs, 1e-300});
  if (r.lhs == 0.0 && r.rhs == 0.0) r.gap = 0.0;
  return r;
}

// |mu|^n tr(fhat(pi_mu) pi_mu(g)) = e^{2 pi i mu u} int G2(p,s) e^{2 pi i q s} ds
// (p,q,u) the coordinates of g; p is interpolated on the p-lattice.
inline Cx weighted_trace(const GridFunction& f, double mu,
                         const GroupPoint& g) {
  const int n = f.n;
  if (n != 1) throw std::invalid_argument("weighted_trace: n=1 only");
  const GridFunction g2 = partial_qu_transform(f, mu);
  const int ns = g2.dims[1];
  const double hs = g2.h(1);
  Cx acc(0.0);
  for (int si = 0; si < ns; ++si) {
    const double s = g2.coord(1, si);
    const Cx val = g2.sample({g.x(0), s});
    acc += val * std::polar(1.0, 2.0 * M_PI * g.y(0) * s);
  }
  acc *= hs;
  return acc * std::polar(1.0, 2.0 * M_PI * mu * g.u);
}

// Fourier inversion f(g) = int tr(fhat(pi_mu) pi_mu(g)) |mu|^n d mu
inline Cx fourier_invert(const GridFunction& f, const GroupPoint& g,
                         double mu_min = 1e-4, double mu_max = 2.0,
                         int nodes_per_side = 33) {
  const auto nodes = mu_nodes_geometric(mu_min, mu_max, nodes_per_side);
  Cx acc(0.0);
  for (int sgn : {+1, -1})
    acc += log_simpson(nodes,
                       [&](double m) { return weighted_trace(f, sgn * m, g); });
  return acc;
}

// Rectangular Hermite-basis matrix of a symbol at a fixed mu (n=1): columns
// are images of h_0..h_{K-1} expanded over enough rows to hold the raised
// degrees exactly.
inline Eigen::MatrixXcd hermite_matrix_of_symbol(const DiffOp& sym, double mu,
                                                 int K) {
  if (sym.nvars != 2)
    throw std::invalid_argument("hermite_matrix_of_symbol: n=1 only");
  int raise = 0;
  for (const auto& [gamma, coeff] : sym.terms) {
    int xdeg = 0;
    for (const auto& [m, c] : coeff.terms) xdeg = std::max(xdeg, m[0]);
    raise = std::max(raise, gamma[0] + xdeg);
  }
  const int Kp = K + raise;
  const double tau = std::sqrt(2.0 * M_PI * std::abs(mu));
  const Eigen::MatrixXd Lx = ladder_pos(Kp);
  const Eigen::MatrixXd Ld = ladder_der(Kp);
  const Eigen::MatrixXcd X = (1.0 / tau) * Lx.cast<Cx>();
  const Eigen::MatrixXcd D = tau * Ld.cast<Cx>();
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(Kp, Kp);
  for (const auto& [gamma, coeff] : sym.terms) {
    Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(Kp, Kp);
    for (int r = 0; r < gamma[0]; ++r) term = D * term;
    Eigen::MatrixXcd cmat = Eigen::MatrixXcd::Zero(Kp, Kp);
    for (const auto& [m, c] : coeff.terms) {
      Eigen::MatrixXcd xp = Eigen::MatrixXcd::Identity(Kp, Kp);
      for (int r = 0; r < m[0]; ++r) xp = X * xp;
      cmat += c * std::pow(Cx(mu), m[1]) * xp;
    }
    M += cmat * term;
  }
  return M.leftCols(K);
}

struct CrResult {
  int K = 0;
  double sigma = 0.0;
  double residual = 0.0;
  bool tail_ok = false;
  Eigen::VectorXcd witness;
};

inline CrResult cr_test(const DiffOp& sym, double mu0, int K) {
  if (mu0 == 0.0) throw std::invalid_argument("cr_test: mu0 must be nonzero");
  const Eigen::MatrixXcd M = hermite_matrix_of_symbol(sym, mu0, K);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeThinV);
  CrResult r;
  r.K = K;
  r.sigma = svd.singularValues()(svd.singularValues().size() - 1);
  r.witness = svd.matrixV().col(K - 1);
  r.residual = (M * r.witness).norm();
  const int tail_start = K - std::max(1, K / 10);
  double tail = 0.0;
  for (int i = tail_start; i < K; ++i) tail += std::norm(r.witness(i));
  r.tail_ok = tail < 1e-6;
  return r;
}

// WitnessFound iff sigma_min is tiny, nonincreasing across the tested sizes,
// and the candidate's Hermite tail carries negligible mass.
struct CrVerdict {
  bool found = false;
  std::vector<CrResult> ladder;
};

inline CrVerdict cr_verdict(const DiffOp& sym, double mu0,
                            const std::vector<int>& Ks) {
  CrVerdict v;
  for (int K : Ks) v.ladder.push_back(cr_test(sym, mu0, K));
  // absolute slack keeps noise-floor jitter from reading as growth
  bool decreasing = true;
  for (std::size_t i = 1; i < v.ladder.size(); ++i)
    if (v.ladder[i].sigma > v.ladder[i - 1].sigma * (1.0 + 1e-9) + 1e-12)
      decreasing = false;
  const CrResult& last = v.ladder.back();
  v.found = last.sigma < 1e-8 && decreasing && last.tail_ok;
  return v;
}

// Corollary-style test: null vector of the transposed symbol at mu0.
inline CrVerdict cr_nonsolvability_test(const OperatorSpec& P, double mu0,
                                        const std::vector<int>& Ks) {
  return cr_verdict(operator_symbol(transpose_spec(P)), mu0, Ks);
}

}  // namespace heis
