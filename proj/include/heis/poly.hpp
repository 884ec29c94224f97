#pragma once
// Term-exact algebra of multivariate polynomials and differential operators
// with polynomial coefficients, over complex double coefficients.  Products,
// Leibniz expansions, transposes and linear changes of variables are carried
// out term by term, so operator identities hold to rounding error and can be
// asserted coefficientwise.

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace heis {

using Cx = std::complex<double>;
using MultiIndex = std::vector<int>;

inline int mi_order(const MultiIndex& a) {
  int s = 0;
  for (int v : a) s += v;
  return s;
}

// Visits every c with 0 <= c <= a componentwise.
template <class F>
void for_each_subindex(const MultiIndex& a, F&& f) {
  MultiIndex c(a.size(), 0);
  while (true) {
    f(c);
    std::size_t i = 0;
    while (i < c.size()) {
      if (c[i] < a[i]) {
        ++c[i];
        break;
      }
      c[i] = 0;
      ++i;
    }
    if (i == c.size()) break;
  }
}

inline double binom1(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

inline double mi_binom(const MultiIndex& a, const MultiIndex& c) {
  double r = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) r *= binom1(a[i], c[i]);
  return r;
}

struct Poly {
  int nvars = 0;
  std::map<MultiIndex, Cx> terms;  // exponent -> coefficient, zero terms pruned

  static Poly zero(int m) {
    Poly p;
    p.nvars = m;
    return p;
  }
  static Poly constant(int m, Cx c) {
    Poly p = zero(m);
    if (c != Cx(0.0)) p.terms[MultiIndex(m, 0)] = c;
    return p;
  }
  static Poly var(int m, int i) {
    Poly p = zero(m);
    MultiIndex e(m, 0);
    e[i] = 1;
    p.terms[e] = Cx(1.0);
    return p;
  }

  void add_term(const MultiIndex& a, Cx c) {
    auto it = terms.find(a);
    if (it == terms.end()) {
      if (c != Cx(0.0)) terms.emplace(a, c);
    } else {
      it->second += c;
      if (it->second == Cx(0.0)) terms.erase(it);
    }
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& [a, c] : terms) m = std::max(m, std::abs(c));
    return m;
  }
  bool is_zero(double tol = 0.0) const { return max_abs() <= tol; }

  Poly& prune(double eps) {
    for (auto it = terms.begin(); it != terms.end();) {
      if (std::abs(it->second) <= eps)
        it = terms.erase(it);
      else
        ++it;
    }
    return *this;
  }

  Cx eval(const std::vector<Cx>& x) const {
    if (static_cast<int>(x.size()) != nvars)
      throw std::invalid_argument("Poly::eval: arity mismatch");
    Cx s = 0.0;
    for (const auto& [a, c] : terms) {
      Cx t = c;
      for (int i = 0; i < nvars; ++i)
        for (int k = 0; k < a[i]; ++k) t *= x[i];
      s += t;
    }
    return s;
  }

  Poly derivative(int i) const {
    Poly out = zero(nvars);
    for (const auto& [a, c] : terms) {
      if (a[i] == 0) continue;
      MultiIndex b = a;
      b[i] -= 1;
      out.add_term(b, c * static_cast<double>(a[i]));
    }
    return out;
  }
};

inline Poly operator+(const Poly& p, const Poly& q) {
  if (p.nvars != q.nvars) throw std::invalid_argument("Poly+: arity mismatch");
  Poly out = p;
  for (const auto& [a, c] : q.terms) out.add_term(a, c);
  return out;
}

inline Poly operator*(const Poly& p, Cx s) {
  Poly out = Poly::zero(p.nvars);
  if (s == Cx(0.0)) return out;
  for (const auto& [a, c] : p.terms) out.terms[a] = c * s;
  return out;
}
inline Poly operator*(Cx s, const Poly& p) { return p * s; }

inline Poly operator-(const Poly& p, const Poly& q) { return p + q * Cx(-1.0); }

inline Poly operator*(const Poly& p, const Poly& q) {
  if (p.nvars != q.nvars) throw std::invalid_argument("Poly*: arity mismatch");
  Poly out = Poly::zero(p.nvars);
  for (const auto& [a, ca] : p.terms)
    for (const auto& [b, cb] : q.terms) {
      MultiIndex s = a;
      for (int i = 0; i < p.nvars; ++i) s[i] += b[i];
      out.add_term(s, ca * cb);
    }
  return out;
}

// Substitutes x_i -> sum_j M[i][j] y_j + b[i]; the result lives in as many
// variables as M has columns.
inline Poly subst_linear(const Poly& p, const std::vector<std::vector<Cx>>& M,
                         const std::vector<Cx>& b) {
  if (M.size() != static_cast<std::size_t>(p.nvars) || b.size() != M.size())
    throw std::invalid_argument("subst_linear: shape mismatch");
  const int mnew = M.empty() ? 0 : static_cast<int>(M[0].size());
  std::vector<Poly> image;
  for (int i = 0; i < p.nvars; ++i) {
    Poly li = Poly::constant(mnew, b[i]);
    for (int j = 0; j < mnew; ++j) li = li + Poly::var(mnew, j) * M[i][j];
    image.push_back(li);
  }
  Poly out = Poly::zero(mnew);
  for (const auto& [a, c] : p.terms) {
    Poly t = Poly::constant(mnew, c);
    for (int i = 0; i < p.nvars; ++i)
      for (int k = 0; k < a[i]; ++k) t = t * image[i];
    out = out + t;
  }
  return out;
}

inline bool poly_close(const Poly& p, const Poly& q, double tol) {
  return (p - q).is_zero(tol);
}

// Value p(x) exp(q(x)); closed under differentiation and under operators with
// polynomial coefficients (the exponent q is untouched by both).
struct PolyExp {
  Poly p, q;
  PolyExp(Poly p_, Poly q_) : p(std::move(p_)), q(std::move(q_)) {
    if (p.nvars != q.nvars)
      throw std::invalid_argument("PolyExp: arity mismatch");
  }
  Cx eval(const std::vector<Cx>& x) const {
    return p.eval(x) * std::exp(q.eval(x));
  }
  PolyExp derivative(int i) const {
    return PolyExp(p.derivative(i) + p * q.derivative(i), q);
  }
};

inline PolyExp operator*(const PolyExp& f, const PolyExp& g) {
  return PolyExp(f.p * g.p, f.q + g.q);
}

struct DiffOp {
  int nvars = 0;
  std::map<MultiIndex, Poly> terms;  // derivative multi-index -> coefficient

  static DiffOp zero(int m) {
    DiffOp d;
    d.nvars = m;
    return d;
  }
  static DiffOp identity(int m) { return mult_by(Poly::constant(m, 1.0)); }
  static DiffOp partial(int m, int i) {
    DiffOp d = zero(m);
    MultiIndex e(m, 0);
    e[i] = 1;
    d.terms[e] = Poly::constant(m, 1.0);
    return d;
  }
  static DiffOp mult_by(const Poly& p) {
    DiffOp d = zero(p.nvars);
    if (!p.terms.empty()) d.terms[MultiIndex(p.nvars, 0)] = p;
    return d;
  }

  void add_term(const MultiIndex& b, const Poly& p) {
    auto it = terms.find(b);
    if (it == terms.end()) {
      if (!p.terms.empty()) terms.emplace(b, p);
    } else {
      it->second = it->second + p;
      if (it->second.terms.empty()) terms.erase(it);
    }
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& [b, p] : terms) m = std::max(m, p.max_abs());
    return m;
  }
  bool is_zero(double tol = 0.0) const { return max_abs() <= tol; }

  DiffOp& prune(double eps) {
    for (auto it = terms.begin(); it != terms.end();) {
      it->second.prune(eps);
      if (it->second.terms.empty())
        it = terms.erase(it);
      else
        ++it;
    }
    return *this;
  }

  Poly apply(const Poly& f) const {
    if (nvars != f.nvars) throw std::invalid_argument("DiffOp::apply: arity");
    Poly out = Poly::zero(nvars);
    for (const auto& [b, p] : terms) {
      Poly d = f;
      for (int i = 0; i < nvars; ++i)
        for (int k = 0; k < b[i]; ++k) d = d.derivative(i);
      out = out + p * d;
    }
    return out;
  }

  PolyExp apply(const PolyExp& f) const {
    if (nvars != f.p.nvars)
      throw std::invalid_argument("DiffOp::apply: arity");
    Poly acc = Poly::zero(nvars);
    for (const auto& [b, p] : terms) {
      PolyExp d = f;
      for (int i = 0; i < nvars; ++i)
        for (int k = 0; k < b[i]; ++k) d = d.derivative(i);
      acc = acc + p * d.p;
    }
    return PolyExp(acc, f.q);
  }

  // Formal transpose without conjugation: (p D^b)^t = (-1)^{|b|} D^b mult(p),
  // expanded to normal form by Leibniz.
  DiffOp transpose() const {
    DiffOp out = zero(nvars);
    for (const auto& [b, p] : terms) {
      const double sign = mi_order(b) % 2 == 0 ? 1.0 : -1.0;
      for_each_subindex(b, [&](const MultiIndex& c) {
        MultiIndex bc(nvars);
        for (int i = 0; i < nvars; ++i) bc[i] = b[i] - c[i];
        Poly dp = p;
        for (int i = 0; i < nvars; ++i)
          for (int k = 0; k < bc[i]; ++k) dp = dp.derivative(i);
        out.add_term(c, dp * Cx(sign * mi_binom(b, c)));
      });
    }
    return out;
  }
};

inline DiffOp operator+(const DiffOp& a, const DiffOp& b) {
  if (a.nvars != b.nvars) throw std::invalid_argument("DiffOp+: arity");
  DiffOp out = a;
  for (const auto& [i, p] : b.terms) out.add_term(i, p);
  return out;
}

inline DiffOp operator*(const DiffOp& a, Cx s) {
  DiffOp out = DiffOp::zero(a.nvars);
  if (s == Cx(0.0)) return out;
  for (const auto& [i, p] : a.terms) out.terms[i] = p * s;
  return out;
}
inline DiffOp operator*(Cx s, const DiffOp& a) { return a * s; }

inline DiffOp operator-(const DiffOp& a, const DiffOp& b) {
  return a + b * Cx(-1.0);
}

// Operator composition in normal form: for A = p D^a, B = q D^b,
// A B = sum_{c <= a} binom(a,c) p (D^{a-c} q) D^{c+b}.
inline DiffOp operator*(const DiffOp& A, const DiffOp& B) {
  if (A.nvars != B.nvars) throw std::invalid_argument("DiffOp*: arity");
  const int m = A.nvars;
  DiffOp out = DiffOp::zero(m);
  for (const auto& [a, p] : A.terms)
    for (const auto& [b, q] : B.terms) {
      for_each_subindex(a, [&](const MultiIndex& c) {
        MultiIndex ac(m), cb(m);
        for (int i = 0; i < m; ++i) {
          ac[i] = a[i] - c[i];
          cb[i] = c[i] + b[i];
        }
        Poly dq = q;
        for (int i = 0; i < m; ++i)
          for (int k = 0; k < ac[i]; ++k) dq = dq.derivative(i);
        if (dq.terms.empty()) return;
        out.add_term(cb, p * dq * Cx(mi_binom(a, c)));
      });
    }
  return out;
}

inline DiffOp commutator(const DiffOp& A, const DiffOp& B) {
  return A * B - B * A;
}

// Conjugation by the affine substitution x = N y + b:  returns the operator
// D~ with D~ (f o tau) = (D f) o tau, tau(y) = N y + b.  Ninv must be the
// inverse of N; the shift only enters through the coefficients.
inline DiffOp conjugate_affine(const DiffOp& D,
                               const std::vector<std::vector<Cx>>& N,
                               const std::vector<std::vector<Cx>>& Ninv,
                               const std::vector<Cx>& b) {
  const int m = D.nvars;
  if (N.size() != static_cast<std::size_t>(m) || Ninv.size() != N.size())
    throw std::invalid_argument("conjugate_affine: shape mismatch");
  // partial_{x_j} pushes forward to sum_k Ninv[k][j] partial_{y_k}.
  std::vector<DiffOp> push;
  for (int j = 0; j < m; ++j) {
    DiffOp lj = DiffOp::zero(m);
    for (int k = 0; k < m; ++k)
      lj = lj + DiffOp::partial(m, k) * Ninv[k][j];
    push.push_back(lj);
  }
  DiffOp out = DiffOp::zero(m);
  for (const auto& [bi, p] : D.terms) {
    DiffOp t = DiffOp::mult_by(subst_linear(p, N, b));
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < bi[j]; ++k) t = t * push[j];
    out = out + t;
  }
  return out;
}

inline DiffOp conjugate_linear(const DiffOp& D,
                               const std::vector<std::vector<Cx>>& N,
                               const std::vector<std::vector<Cx>>& Ninv) {
  return conjugate_affine(D, N, Ninv, std::vector<Cx>(D.nvars, Cx(0.0)));
}

inline bool diffop_close(const DiffOp& a, const DiffOp& b, double tol) {
  return (a - b).is_zero(tol);
}

}  // namespace heis
