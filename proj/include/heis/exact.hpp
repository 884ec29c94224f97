#pragma once
// Exact rational linear algebra for the classifier: characteristic
// polynomials by Faddeev-LeVerrier, squarefree parts and Sturm counts,
// rational root extraction, nullspaces and Hermitian signatures over the
// Gaussian rationals.  Everything here is decision-grade: no tolerances.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heis/parse.hpp"

namespace heis {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Exact value of a rational literal: "p/q", integers, finite decimals,
// optional decimal exponent.
inline Rat parse_rat(const std::string& raw) {
  const std::string s = strip_ws(raw);
  if (!is_rational_literal(s))
    throw std::invalid_argument("not a rational literal: '" + raw + "'");
  bool neg = false;
  std::size_t k = 0;
  if (s[k] == '+' || s[k] == '-') neg = s[k++] == '-';
  std::string digits;
  Int den = 1;
  long expo = 0;
  while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k])))
    digits.push_back(s[k++]);
  if (k < s.size() && s[k] == '/') {
    ++k;
    std::string d;
    while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k])))
      d.push_back(s[k++]);
    den = Int(d);
  } else if (k < s.size() && s[k] == '.') {
    ++k;
    while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
      digits.push_back(s[k++]);
      expo -= 1;
    }
  }
  if (k < s.size() && (s[k] == 'e' || s[k] == 'E')) {
    ++k;
    bool eneg = false;
    if (s[k] == '+' || s[k] == '-') eneg = s[k++] == '-';
    long e = 0;
    while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k])))
      e = 10 * e + (s[k++] - '0');
    expo += eneg ? -e : e;
  }
  Int num = digits.empty() ? Int(0) : Int(digits);
  for (long i = 0; i < expo; ++i) num *= 10;
  for (long i = 0; i < -expo; ++i) den *= 10;
  Rat r(num, den);
  return neg ? -r : r;
}

inline double rat_to_double(const Rat& r) {
  return boost::multiprecision::numerator(r).convert_to<double>() /
         boost::multiprecision::denominator(r).convert_to<double>();
}

// ---------------------------------------------------------------- matrices

using RatMat = std::vector<std::vector<Rat>>;

inline RatMat rat_identity(int d) {
  RatMat I(d, std::vector<Rat>(d, Rat(0)));
  for (int i = 0; i < d; ++i) I[i][i] = 1;
  return I;
}

inline RatMat rat_mul(const RatMat& A, const RatMat& B) {
  const int r = static_cast<int>(A.size());
  const int c = static_cast<int>(B[0].size());
  const int m = static_cast<int>(B.size());
  RatMat C(r, std::vector<Rat>(c, Rat(0)));
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < m; ++k) {
      if (A[i][k] == 0) continue;
      for (int j = 0; j < c; ++j) C[i][j] += A[i][k] * B[k][j];
    }
  return C;
}

inline Rat rat_trace(const RatMat& A) {
  Rat t = 0;
  for (std::size_t i = 0; i < A.size(); ++i) t += A[i][i];
  return t;
}

inline bool rat_is_zero(const RatMat& A) {
  for (const auto& row : A)
    for (const auto& v : row)
      if (v != 0) return false;
  return true;
}

// Monic characteristic polynomial of A, coefficients c[0..d] with c[d] = 1,
// chi(x) = sum c[k] x^k, via Faddeev-LeVerrier.
inline std::vector<Rat> char_poly(const RatMat& A) {
  const int d = static_cast<int>(A.size());
  std::vector<Rat> c(d + 1, Rat(0));
  c[d] = 1;
  RatMat M = rat_identity(d);
  for (int k = 1; k <= d; ++k) {
    RatMat AM = rat_mul(A, M);
    c[d - k] = -rat_trace(AM) / k;
    for (int i = 0; i < d; ++i) AM[i][i] += c[d - k];
    M = std::move(AM);
  }
  return c;
}

// ------------------------------------------------------------- polynomials

// Dense coefficients, low degree first; normalized so the leading entry is
// nonzero (empty = zero polynomial).
using RatPoly = std::vector<Rat>;

inline RatPoly poly_trim(RatPoly p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}
inline int poly_deg(const RatPoly& p) { return static_cast<int>(p.size()) - 1; }

inline RatPoly poly_derivative(const RatPoly& p) {
  RatPoly d;
  for (std::size_t k = 1; k < p.size(); ++k) d.push_back(p[k] * Rat(k));
  return poly_trim(d);
}

inline Rat poly_eval(const RatPoly& p, const Rat& x) {
  Rat v = 0;
  for (std::size_t k = p.size(); k-- > 0;) v = v * x + p[k];
  return v;
}

inline RatPoly poly_scale(const RatPoly& p, const Rat& s) {
  RatPoly q = p;
  for (auto& v : q) v *= s;
  return poly_trim(q);
}

inline RatPoly poly_sub(const RatPoly& a, const RatPoly& b) {
  RatPoly r = a;
  if (b.size() > r.size()) r.resize(b.size(), Rat(0));
  for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  return poly_trim(r);
}

inline RatPoly poly_mul(const RatPoly& a, const RatPoly& b) {
  if (a.empty() || b.empty()) return {};
  RatPoly r(a.size() + b.size() - 1, Rat(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return poly_trim(r);
}

// Division with remainder: a = q*b + r, deg r < deg b.
inline void poly_divmod(const RatPoly& a, const RatPoly& b, RatPoly& q,
                        RatPoly& r) {
  if (b.empty()) throw std::invalid_argument("poly_divmod: divide by zero");
  r = a;
  q.assign(a.size() > b.size() ? a.size() - b.size() + 1 : 1, Rat(0));
  while (poly_deg(r) >= poly_deg(b) && !r.empty()) {
    const int sh = poly_deg(r) - poly_deg(b);
    const Rat f = r.back() / b.back();
    q[sh] += f;
    RatPoly shifted(sh, Rat(0));
    shifted.insert(shifted.end(), b.begin(), b.end());
    r = poly_sub(r, poly_scale(shifted, f));
  }
  q = poly_trim(q);
}

inline RatPoly poly_mod(const RatPoly& a, const RatPoly& b) {
  RatPoly q, r;
  poly_divmod(a, b, q, r);
  return r;
}

inline RatPoly poly_monic(const RatPoly& p) {
  if (p.empty()) return p;
  return poly_scale(p, Rat(1) / p.back());
}

inline RatPoly poly_gcd(RatPoly a, RatPoly b) {
  a = poly_trim(a);
  b = poly_trim(b);
  while (!b.empty()) {
    RatPoly r = poly_mod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return poly_monic(a);
}

inline RatPoly squarefree_part(const RatPoly& p) {
  if (poly_deg(p) <= 0) return poly_monic(p);
  const RatPoly g = poly_gcd(p, poly_derivative(p));
  RatPoly q, r;
  poly_divmod(p, g, q, r);
  return poly_monic(q);
}

// p evaluated at a matrix argument.
inline RatMat poly_eval_mat(const RatPoly& p, const RatMat& A) {
  const int d = static_cast<int>(A.size());
  RatMat V(d, std::vector<Rat>(d, Rat(0)));
  for (std::size_t k = p.size(); k-- > 0;) {
    V = rat_mul(V, A);
    for (int i = 0; i < d; ++i) V[i][i] += p[k];
  }
  return V;
}

// Sturm chain root counting on the squarefree part.  Returns the number of
// distinct real roots in (a, b]; infinities are passed via the sign of the
// leading term.
inline int sturm_count(const RatPoly& p_in, std::optional<Rat> a,
                       std::optional<Rat> b) {
  const RatPoly p = squarefree_part(p_in);
  if (poly_deg(p) <= 0) return 0;
  std::vector<RatPoly> chain{p, poly_derivative(p)};
  while (poly_deg(chain.back()) > 0) {
    RatPoly r = poly_mod(chain[chain.size() - 2], chain.back());
    if (r.empty()) break;
    for (auto& v : r) v = -v;
    chain.push_back(poly_trim(r));
  }
  auto sign_at = [&](const RatPoly& q, const std::optional<Rat>& x,
                     bool plus_inf) -> int {
    if (q.empty()) return 0;
    if (!x.has_value()) {
      const int s = q.back() > 0 ? 1 : -1;
      if (plus_inf) return s;
      return poly_deg(q) % 2 == 0 ? s : -s;
    }
    const Rat v = poly_eval(q, *x);
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
  };
  auto variations = [&](const std::optional<Rat>& x, bool plus_inf) {
    int var = 0, last = 0;
    for (const auto& q : chain) {
      const int s = sign_at(q, x, plus_inf);
      if (s != 0) {
        if (last != 0 && s != last) ++var;
        last = s;
      }
    }
    return var;
  };
  return variations(a, false) - variations(b, true);
}

// All rational roots with multiplicities; the remaining factor (content
// normalized to monic) has no rational roots.
inline std::vector<std::pair<Rat, int>> rational_roots(RatPoly p,
                                                       RatPoly* rest = nullptr) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  std::vector<std::pair<Rat, int>> roots;
  p = poly_monic(poly_trim(p));
  if (p.empty() || poly_deg(p) == 0) {
    if (rest) *rest = p;
    return roots;
  }
  // factor out x^lo first
  std::size_t lo = 0;
  while (lo < p.size() && p[lo] == 0) ++lo;
  if (lo > 0) roots.emplace_back(Rat(0), static_cast<int>(lo));
  RatPoly cur(p.begin() + lo, p.end());
  auto divisors = [](Int v) {
    std::vector<Int> out;
    if (v < 0) v = -v;
    for (Int d = 1; d * d <= v; ++d)
      if (v % d == 0) {
        out.push_back(d);
        out.push_back(v / d);
      }
    return out;
  };
  if (!cur.empty() && poly_deg(cur) > 0) {
    // candidates p/q with p | constant term, q | leading term, over the
    // integer-cleared coefficients
    Int l2 = 1;
    for (const auto& c : cur)
      l2 = boost::multiprecision::lcm(l2, denominator(c));
    std::vector<Int> ic;
    for (const auto& c : cur)
      ic.push_back(numerator(c) * (l2 / denominator(c)));
    const auto ps = divisors(ic.front());
    const auto qs = divisors(ic.back());
    std::vector<Rat> cands;
    for (const Int& pp : ps)
      for (const Int& qq : qs) {
        cands.push_back(Rat(pp, qq));
        cands.push_back(-Rat(pp, qq));
      }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    for (const Rat& cand : cands) {
      int mult = 0;
      while (!cur.empty() && poly_deg(cur) >= 1 &&
             poly_eval(cur, cand) == 0) {
        RatPoly q, r;
        poly_divmod(cur, RatPoly{-cand, Rat(1)}, q, r);
        cur = q;
        ++mult;
      }
      if (mult > 0) roots.emplace_back(cand, mult);
    }
  }
  if (rest) *rest = poly_monic(cur);
  std::sort(roots.begin(), roots.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return roots;
}

inline bool is_perfect_square(const Rat& r, Rat* root = nullptr) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (r < 0) return false;
  const Int n = numerator(r), d = denominator(r);
  const Int sn = boost::multiprecision::sqrt(n), sd = boost::multiprecision::sqrt(d);
  if (sn * sn != n || sd * sd != d) return false;
  if (root) *root = Rat(sn, sd);
  return true;
}

// ------------------------------------------------- Gaussian rational field

struct CRat {
  Rat re{0}, im{0};
  CRat() = default;
  CRat(Rat r) : re(std::move(r)) {}
  CRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}
  bool is_zero() const { return re == 0 && im == 0; }
  CRat conj() const { return {re, -im}; }
};

inline CRat operator+(const CRat& a, const CRat& b) {
  return {a.re + b.re, a.im + b.im};
}
inline CRat operator-(const CRat& a, const CRat& b) {
  return {a.re - b.re, a.im - b.im};
}
inline CRat operator*(const CRat& a, const CRat& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline CRat operator/(const CRat& a, const CRat& b) {
  const Rat n = b.re * b.re + b.im * b.im;
  if (n == 0) throw std::invalid_argument("CRat: divide by zero");
  return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
}

using CRatMat = std::vector<std::vector<CRat>>;

// Basis of the nullspace of M over Q(i) by fraction-free-ish Gaussian
// elimination (exact pivots, no tolerances).
inline std::vector<std::vector<CRat>> nullspace(CRatMat M) {
  const int rows = static_cast<int>(M.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(M[0].size());
  std::vector<int> pivot_col;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int pr = -1;
    for (int i = r; i < rows; ++i)
      if (!M[i][c].is_zero()) {
        pr = i;
        break;
      }
    if (pr < 0) continue;
    std::swap(M[r], M[pr]);
    const CRat piv = M[r][c];
    for (int j = c; j < cols; ++j) M[r][j] = M[r][j] / piv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || M[i][c].is_zero()) continue;
      const CRat f = M[i][c];
      for (int j = c; j < cols; ++j) M[i][j] = M[i][j] - f * M[r][j];
    }
    pivot_col.push_back(c);
    ++r;
  }
  std::vector<std::vector<CRat>> basis;
  std::vector<bool> is_pivot(cols, false);
  for (int c : pivot_col) is_pivot[c] = true;
  for (int c = 0; c < cols; ++c) {
    if (is_pivot[c]) continue;
    std::vector<CRat> v(cols);
    v[c] = CRat(Rat(1));
    for (int i = 0; i < static_cast<int>(pivot_col.size()); ++i)
      v[pivot_col[i]] = CRat(Rat(0)) - M[i][c];
    basis.push_back(std::move(v));
  }
  return basis;
}

// Signature (p, n) of a Hermitian matrix over Q(i), by exact symmetric
// elimination; hyperbolic 2x2 blocks contribute (1, 1).
inline std::pair<int, int> hermitian_signature(CRatMat K) {
  int pos = 0, neg = 0;
  std::vector<int> idx(K.size());
  for (std::size_t i = 0; i < K.size(); ++i) idx[i] = static_cast<int>(i);
  while (!idx.empty()) {
    int di = -1;
    for (std::size_t a = 0; a < idx.size(); ++a)
      if (!K[idx[a]][idx[a]].is_zero()) {
        di = static_cast<int>(a);
        break;
      }
    if (di >= 0) {
      const int i = idx[di];
      const Rat d = K[i][i].re;  // Hermitian: diagonal real
      (d > 0 ? pos : neg) += 1;
      idx.erase(idx.begin() + di);
      for (int a : idx)
        for (int b : idx)
          K[a][b] = K[a][b] - K[a][i] * K[i][b] / K[i][i];
      continue;
    }
    // all diagonal zero: find an off-diagonal entry
    int oi = -1, oj = -1;
    for (std::size_t a = 0; a < idx.size() && oi < 0; ++a)
      for (std::size_t b = a + 1; b < idx.size(); ++b)
        if (!K[idx[a]][idx[b]].is_zero()) {
          oi = idx[a];
          oj = idx[b];
          break;
        }
    if (oi < 0) break;  // remaining block is zero
    pos += 1;
    neg += 1;
    const CRat h = K[oi][oj], hc = K[oj][oi];
    std::vector<int> rest;
    for (int a : idx)
      if (a != oi && a != oj) rest.push_back(a);
    for (int a : rest)
      for (int b : rest)
        K[a][b] = K[a][b] - K[a][oi] * (K[oj][b] / hc) -
                  K[a][oj] * (K[oi][b] / h);
    idx = std::move(rest);
  }
  return {pos, neg};
}

}  // namespace heis
