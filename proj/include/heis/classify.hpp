#pragma once
// Solvability classification for left-invariant operators L = Delta_S + i
// alpha U.  Real coefficient matrices go through the three-condition
// trichotomy (real zeroth-order coefficient, semisimple purely imaginary
// spectrum, attained resonance), with exact rational certificates whenever
// the input is rational.  Complex coefficient operators are classified
// through their 2x2 symplectic block normal forms; the bracket-condition
// point search is the fallback, and Undetermined is a first-class verdict.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "heis/dioph.hpp"
#include "heis/exact.hpp"
#include "heis/fields.hpp"
#include "heis/schrod.hpp"
#include "heis/symplectic.hpp"
#include "heis/twisted.hpp"

namespace heis {

// ---------------------------------------------------------------------------
// inputs

// Group-level symplectic defect ||t(T) J T - J||; sp_defect in
// symplectic.hpp is the algebra-level one.
inline double sp_group_defect(const Eigen::MatrixXd& T) {
  const int n = static_cast<int>(T.rows()) / 2;
  Eigen::MatrixXd J = matJ(n);
  return (T.transpose() * J * T - J).norm() / std::max(1.0, T.squaredNorm());
}

inline RatMat rat_J(int n) {
  RatMat J(2 * n, std::vector<Rat>(2 * n, Rat(0)));
  for (int i = 0; i < n; ++i) {
    J[i][n + i] = Rat(1);
    J[n + i][i] = Rat(-1);
  }
  return J;
}

struct OperatorInput {
  OperatorSpec op;       // float view, always populated
  bool exact = false;    // rational real A and rational complex alpha below
  RatMat A_exact;        // 2n x 2n, symmetric, real
  CRat alpha_exact;

  static OperatorInput from_float(int n, const Eigen::MatrixXcd& A, Cx alpha) {
    OperatorInput in;
    in.op = OperatorSpec::quadratic(n, A, alpha);
    return in;
  }

  static OperatorInput rational(int n, const RatMat& A, const CRat& alpha) {
    const int d = 2 * n;
    if (static_cast<int>(A.size()) != d)
      throw std::invalid_argument("coefficient matrix must be 2n x 2n");
    for (const auto& row : A)
      if (static_cast<int>(row.size()) != d)
        throw std::invalid_argument("coefficient matrix must be 2n x 2n");
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < i; ++j)
        if (A[i][j] != A[j][i])
          throw std::invalid_argument("coefficient matrix must be symmetric");
    OperatorInput in;
    in.exact = true;
    in.A_exact = A;
    in.alpha_exact = alpha;
    Eigen::MatrixXcd Af(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) Af(i, j) = Cx(rat_to_double(A[i][j]), 0.0);
    in.op = OperatorSpec::quadratic(
        n, Af, Cx(rat_to_double(alpha.re), rat_to_double(alpha.im)));
    return in;
  }

  // Exact S = -A J, the generator whose spectrum drives the trichotomy.
  RatMat S_exact() const {
    RatMat S = rat_mul(A_exact, rat_J(op.n));
    for (auto& row : S)
      for (auto& v : row) v = -v;
    return S;
  }
};

// Input specified by a rational S in sp(n, R); A = S J must be symmetric.
inline OperatorInput input_from_S_rational(int n, const RatMat& S,
                                           const CRat& alpha) {
  // S = -A J inverts to A = S J
  return OperatorInput::rational(n, rat_mul(S, rat_J(n)), alpha);
}

// ---------------------------------------------------------------------------
// reports

enum class Verdict { LocallySolvable, NotLocallySolvable, Undetermined };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::LocallySolvable:
      return "LocallySolvable";
    case Verdict::NotLocallySolvable:
      return "NotLocallySolvable";
    default:
      return "Undetermined";
  }
}

struct ClassificationReport {
  Verdict verdict = Verdict::Undetermined;
  std::string theorem;  // criterion the verdict rests on
  std::string detail;   // which branch of the criterion decided
  std::optional<bool> alpha_real;            // condition 1, unset = not used
  std::optional<bool> semisimple_imaginary;  // condition 2
  Holds diophantine = Holds::Unknown;        // condition 3; No = fails

  std::vector<double> frequencies;  // signed normal-form frequencies
  Eigen::MatrixXd T;                // normal-form conjugator, 0x0 if absent
  std::optional<DiophVerdict> dioph;
  std::vector<double> hprime_zeta;  // bracket-condition point, empty if none
  std::optional<CrVerdict> cr;      // oscillator-side witness, when computed
  std::string exactness = "float";  // "rational" | "float"

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["verdict"] = verdict_name(verdict);
    j["theorem"] = theorem;
    if (!detail.empty()) j["detail"] = detail;
    nlohmann::ordered_json c;
    if (alpha_real)
      c["alpha_real"] = *alpha_real;
    else
      c["alpha_real"] = nullptr;
    if (semisimple_imaginary)
      c["semisimple_imaginary"] = *semisimple_imaginary;
    else
      c["semisimple_imaginary"] = nullptr;
    if (diophantine == Holds::No)
      c["diophantine_fails"] = true;
    else if (diophantine == Holds::Yes)
      c["diophantine_fails"] = false;
    else
      c["diophantine_fails"] = "unknown";
    j["conditions"] = c;
    nlohmann::ordered_json w;
    w["frequencies"] = frequencies;
    nlohmann::ordered_json tm = nlohmann::ordered_json::array();
    for (int i = 0; i < T.rows(); ++i) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (int k = 0; k < T.cols(); ++k) row.push_back(T(i, k));
      tm.push_back(row);
    }
    w["T"] = tm;
    if (dioph)
      w["diophantine_witness"] = dioph->to_json();
    else
      w["diophantine_witness"] = nullptr;
    w["hprime_zeta"] = hprime_zeta;
    if (cr) {
      nlohmann::ordered_json cj;
      cj["witness_found"] = cr->found;
      cj["sigma_min"] = cr->ladder.empty() ? 0.0 : cr->ladder.back().sigma;
      cj["K"] = cr->ladder.empty() ? 0 : cr->ladder.back().K;
      w["cr_test"] = cj;
    }
    j["witnesses"] = w;
    j["exactness"] = exactness;
    return j;
  }
};

// ---------------------------------------------------------------------------
// exact spectral decision for S in sp(n, Q)

struct ExactSpectral {
  bool imaginary = false;   // spectrum contained in i R
  bool semisimple = false;  // minimal polynomial squarefree
  bool freqs_rational = false;
  std::vector<Rat> freqs;  // signed, length n, largest modulus first
  std::string note;
};

inline ExactSpectral exact_spectral(const RatMat& S) {
  const int d = static_cast<int>(S.size());
  const int n = d / 2;
  ExactSpectral out;
  RatPoly chi = char_poly(S);
  out.semisimple = rat_is_zero(poly_eval_mat(squarefree_part(chi), S));
  bool even = true;
  for (int k = 1; k <= d; k += 2)
    if (chi[k] != 0) even = false;
  if (!even) {
    // cannot happen for S in sp, but fail safe for general input
    out.imaginary = false;
    out.note = "characteristic polynomial not even";
    return out;
  }
  RatPoly p(n + 1);
  for (int k = 0; k <= n; ++k) p[k] = chi[2 * k];
  // chi(x) = p(x^2); imaginary spectrum <=> every root of p real and <= 0
  RatPoly psf = squarefree_part(p);
  const int nonpos = sturm_count(p, std::nullopt, Rat(0));
  out.imaginary = nonpos == poly_deg(psf);
  if (!out.imaginary || !out.semisimple) return out;

  RatPoly rest;
  auto roots = rational_roots(p, &rest);  // ascending, so large |lambda| first
  if (poly_deg(rest) > 0) {
    out.note = "irrational frequencies";
    return out;
  }
  std::vector<Rat> freqs;
  for (const auto& [r, mult] : roots) {
    if (r == 0) {
      for (int i = 0; i < mult; ++i) freqs.push_back(Rat(0));
      continue;
    }
    Rat lam;
    if (!is_perfect_square(-r, &lam)) {
      out.note = "irrational frequencies";
      return out;
    }
    // Krein signature of the (i lam)-eigenspace decides the signs: a basis
    // vector v of ker(S - i lam) contributes +lam when conj(v)^T J v / (2i)
    // is positive and -lam when negative.
    CRatMat M(d, std::vector<CRat>(d));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) M[i][j] = CRat(S[i][j]);
    for (int i = 0; i < d; ++i) M[i][i] = M[i][i] - CRat(Rat(0), lam);
    auto basis = nullspace(M);
    if (static_cast<int>(basis.size()) != mult)
      throw std::logic_error("eigenspace dimension mismatch");
    CRatMat K(mult, std::vector<CRat>(mult));
    for (int a = 0; a < mult; ++a)
      for (int b = 0; b < mult; ++b) {
        CRat s;
        for (int j = 0; j < d; ++j) {
          CRat jv = j < n ? basis[b][n + j]
                          : CRat(Rat(0)) - basis[b][j - n];
          s = s + basis[a][j].conj() * jv;
        }
        K[a][b] = s * CRat(Rat(0), Rat(-1, 2));
      }
    auto sig = hermitian_signature(K);
    if (sig.first + sig.second != mult)
      throw std::logic_error("degenerate pairing on an eigenspace");
    for (int i = 0; i < sig.first; ++i) freqs.push_back(lam);
    for (int i = 0; i < sig.second; ++i) freqs.push_back(-lam);
  }
  if (static_cast<int>(freqs.size()) != n)
    throw std::logic_error("frequency count mismatch");
  out.freqs = std::move(freqs);
  out.freqs_rational = true;
  return out;
}

// ---------------------------------------------------------------------------
// real-coefficient classification

namespace detail {

inline Eigen::MatrixXd real_S_of(const OperatorInput& in) {
  Eigen::MatrixXcd S = S_from_A(in.op.A);
  double imax = 0.0;
  for (int i = 0; i < S.rows(); ++i)
    for (int j = 0; j < S.cols(); ++j)
      imax = std::max(imax, std::abs(S(i, j).imag()));
  if (imax > 1e-12 * (1.0 + S.norm()))
    throw std::invalid_argument(
        "real-coefficient classification needs a real coefficient matrix");
  return S.real();
}

// Reorder the float normal form so its frequency list matches `want`;
// returns false when the multisets disagree beyond tolerance.
inline bool align_normal_form(NormalForm& nf, const std::vector<double>& want,
                              double tol = 1e-6) {
  const int n = static_cast<int>(want.size());
  if (static_cast<int>(nf.freqs.size()) != n) return false;
  std::vector<int> perm(n, -1);
  std::vector<bool> used(n, false);
  for (int i = 0; i < n; ++i) {
    double best = tol;
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      double gap = std::abs(nf.freqs[j] - want[i]);
      if (gap < best) {
        best = gap;
        perm[i] = j;
      }
    }
    if (perm[i] < 0) return false;
    used[perm[i]] = true;
  }
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    P(i, perm[i]) = 1.0;
    P(n + i, n + perm[i]) = 1.0;
  }
  nf.T = P * nf.T;
  nf.freqs = want;
  return true;
}

}  // namespace detail

inline ClassificationReport classify_real(const OperatorInput& in,
                                          long long dioph_cap = 200000,
                                          long long witness_kmax = 4000) {
  const int n = in.op.n;
  ClassificationReport rep;
  Eigen::MatrixXd Sf = detail::real_S_of(in);

  if (in.exact) {
    rep.exactness = "rational";
    rep.theorem = "real-coefficient trichotomy";
    rep.alpha_real = in.alpha_exact.im == 0;
    RatMat S = in.S_exact();
    ExactSpectral es = exact_spectral(S);
    rep.semisimple_imaginary = es.imaginary && es.semisimple;
    if (es.freqs_rational) {
      for (const Rat& f : es.freqs)
        rep.frequencies.push_back(rat_to_double(f));
      NormalForm nf = normal_form(Sf);
      if (nf.ok && detail::align_normal_form(nf, rep.frequencies)) rep.T = nf.T;
    }
    if (!*rep.alpha_real) {
      rep.verdict = Verdict::LocallySolvable;
      rep.detail = "zeroth-order coefficient has nonzero imaginary part";
      return rep;
    }
    if (!*rep.semisimple_imaginary) {
      rep.verdict = Verdict::LocallySolvable;
      rep.detail = es.imaginary ? "generator not semisimple"
                                : "spectrum leaves the imaginary axis";
      return rep;
    }
    if (!es.freqs_rational) {
      rep.verdict = Verdict::Undetermined;
      rep.detail =
          "frequencies not rational; exact resonance decision out of reach";
      NormalForm nf = normal_form(Sf);
      if (nf.ok) {
        rep.T = nf.T;
        rep.frequencies = nf.freqs;
        rep.dioph = diophantine_witness_search(
            nf.freqs, Cx(rat_to_double(in.alpha_exact.re), 0.0), witness_kmax);
      }
      return rep;
    }
    DiophVerdict dv =
        diophantine_decide_rational(es.freqs, in.alpha_exact.re, dioph_cap);
    rep.dioph = dv;
    rep.diophantine = dv.holds;
    if (dv.holds == Holds::Yes) {
      rep.verdict = Verdict::LocallySolvable;
      rep.detail = "resonance value set bounded away from zero";
    } else {
      rep.verdict = Verdict::NotLocallySolvable;
      rep.detail = "resonance attained";
    }
    return rep;
  }

  rep.exactness = "float";
  rep.theorem = "real-coefficient trichotomy";
  const Cx alpha = in.op.alpha;
  rep.alpha_real = std::abs(alpha.imag()) <= 1e-12 * (1.0 + std::abs(alpha));
  if (!*rep.alpha_real) {
    rep.verdict = Verdict::LocallySolvable;
    rep.detail = "zeroth-order coefficient has nonzero imaginary part";
    return rep;
  }
  SpectralData sd = spectral_analysis(Sf);
  if (sd.borderline) {
    rep.semisimple_imaginary.reset();
    rep.verdict = Verdict::Undetermined;
    rep.detail = "spectral data borderline at float precision";
    return rep;
  }
  rep.semisimple_imaginary = sd.semisimple && sd.imaginary;
  if (!*rep.semisimple_imaginary) {
    rep.verdict = Verdict::LocallySolvable;
    rep.detail = sd.imaginary ? "generator not semisimple"
                              : "spectrum leaves the imaginary axis";
    return rep;
  }
  NormalForm nf = normal_form(Sf);
  if (nf.ok) {
    rep.T = nf.T;
    rep.frequencies = nf.freqs;
    rep.dioph =
        diophantine_witness_search(nf.freqs, Cx(alpha.real(), 0.0),
                                   witness_kmax);
  }
  rep.diophantine = Holds::Unknown;
  rep.verdict = Verdict::Undetermined;
  rep.detail = "float mode cannot certify the resonance condition either way";
  return rep;
}

// ---------------------------------------------------------------------------
// complex block classification

struct ComplexBlock {
  Cx gamma{1.0, 0.0};
  int dim = 2;
  int type = 1;         // 1: generalized sub-Laplacian block, 3: hyperbolic
  double lambda = 0.0;  // type 1 only, in {-1} union [0, inf)
  int eps = 1;          // type 1 only, -1 allowed only when lambda > 1

  static ComplexBlock type1(Cx gamma, double lambda, int eps = 1) {
    if (gamma == Cx(0.0, 0.0))
      throw std::invalid_argument("block coefficient must be nonzero");
    if (!(lambda >= 0.0 || lambda == -1.0))
      throw std::invalid_argument("lambda must lie in {-1} union [0, inf)");
    if (eps != 1 && eps != -1)
      throw std::invalid_argument("eps must be +1 or -1");
    if (lambda <= 1.0 && eps != 1)
      throw std::invalid_argument("eps is normalized to +1 when |lambda| <= 1");
    ComplexBlock b;
    b.gamma = gamma;
    b.type = 1;
    b.lambda = lambda;
    b.eps = eps;
    return b;
  }

  static ComplexBlock type3(Cx gamma) {
    if (gamma == Cx(0.0, 0.0))
      throw std::invalid_argument("block coefficient must be nonzero");
    ComplexBlock b;
    b.gamma = gamma;
    b.type = 3;
    return b;
  }

  // Declared minimal block of dimension above two with square -I.
  static ComplexBlock big(Cx gamma, int dim) {
    if (dim <= 2) throw std::invalid_argument("oversized block needs dim > 2");
    if (dim % 2 != 0)
      throw std::invalid_argument("inconsistent block dimensions");
    ComplexBlock b;
    b.gamma = gamma;
    b.dim = dim;
    return b;
  }

  Eigen::Matrix2cd S2() const {
    Eigen::Matrix2cd S;
    if (type == 3) {
      S << Cx(0, 0), Cx(0, 1), Cx(0, 1), Cx(0, 0);
    } else {
      S << Cx(0, eps * lambda), Cx(lambda * lambda - 1.0, 0), Cx(1, 0),
          Cx(0, -eps * lambda);
    }
    return gamma * S;
  }
};

// Critical set {+- sum_j gamma_j (2 k_j + 1) : sum k_j <= B} of a block
// family; closed under negation, sorted by (Re, Im).
struct ExceptionalSet {
  std::vector<Cx> gamma;
  long long bound = 0;
  std::vector<Cx> elements;

  bool contains(Cx alpha, double tol = 1e-9) const {
    for (const Cx& e : elements)
      if (std::abs(e - alpha) <= tol) return true;
    return false;
  }
};

inline ExceptionalSet exceptional_set(const std::vector<Cx>& gamma,
                                      long long B) {
  ExceptionalSet out;
  out.gamma = gamma;
  out.bound = B;
  std::vector<Cx> vals;
  std::vector<long long> k(gamma.size(), 0);
  std::function<void(std::size_t, long long)> rec = [&](std::size_t j,
                                                        long long left) {
    if (j == gamma.size()) {
      Cx e(0.0, 0.0);
      for (std::size_t i = 0; i < gamma.size(); ++i)
        e += gamma[i] * Cx(2.0 * double(k[i]) + 1.0, 0.0);
      vals.push_back(e);
      vals.push_back(-e);
      return;
    }
    for (long long v = 0; v <= left; ++v) {
      k[j] = v;
      rec(j + 1, left - v);
    }
  };
  rec(0, B);
  if (gamma.empty()) vals.push_back(Cx(0.0, 0.0));
  std::sort(vals.begin(), vals.end(), [](Cx a, Cx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  for (const Cx& v : vals)
    if (out.elements.empty() || std::abs(out.elements.back() - v) > 1e-12)
      out.elements.push_back(v);
  return out;
}

namespace detail {

// Membership of alpha in the full (unbounded) critical set of gamma.
// status: 0 = outside with margin, 1 = attained, 2 = undecided.
struct EMembership {
  int status = 2;
  std::vector<long long> k;
  int sign = 1;
  double margin = 0.0;
  long long shell_cap = 0;
};

inline EMembership exceptional_membership(const std::vector<Cx>& gamma,
                                          Cx alpha, double tol = 1e-9) {
  EMembership out;
  const int nb = static_cast<int>(gamma.size());
  // best separating half-plane: maximize min_j Re(e^{-i theta} gamma_j)
  double best = -1.0;
  for (int t = 0; t < 1440; ++t) {
    double th = 2.0 * M_PI * t / 1440.0;
    double m = std::numeric_limits<double>::infinity();
    for (const Cx& g : gamma)
      m = std::min(m, (g * std::polar(1.0, -th)).real());
    best = std::max(best, m);
  }
  long long cap;
  bool separated = best > 1e-10;
  if (separated) {
    // |sum gamma_j (2k_j+1)| >= best * (2 sum k + nb): larger shells cannot
    // reach alpha, so the enumeration below is a complete decision
    cap = static_cast<long long>(
              std::ceil(((std::abs(alpha) + 1.0) / best - nb) / 2.0)) +
          1;
    cap = std::max<long long>(cap, 1);
  } else {
    cap = 50;  // cancellation possible, enumeration cannot exclude membership
  }
  out.shell_cap = cap;
  double margin = std::numeric_limits<double>::infinity();
  std::vector<long long> k(nb, 0);
  bool hit = false;
  std::function<void(int, long long)> rec = [&](int j, long long left) {
    if (hit) return;
    if (j == nb) {
      Cx e(0.0, 0.0);
      for (int i = 0; i < nb; ++i)
        e += gamma[i] * Cx(2.0 * double(k[i]) + 1.0, 0.0);
      for (int s : {+1, -1}) {
        Cx v = Cx(double(s), 0.0) * e;
        margin = std::min(margin, std::abs(v - alpha));
        if (std::abs(v - alpha) <= tol) {
          hit = true;
          out.k = k;
          out.sign = s;
          return;
        }
      }
      return;
    }
    for (long long v = 0; v <= left && !hit; ++v) {
      k[j] = v;
      rec(j + 1, left - v);
    }
  };
  rec(0, cap);
  out.margin = margin;
  if (hit)
    out.status = 1;
  else
    out.status = separated ? 0 : 2;
  return out;
}

}  // namespace detail

// Assemble the full 2n x 2n generator from 2x2 blocks, pair j occupying the
// (x_j, y_j) coordinates.
inline Eigen::MatrixXcd blocks_to_S(const std::vector<ComplexBlock>& blocks) {
  const int n = static_cast<int>(blocks.size());
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    if (blocks[j].dim != 2)
      throw std::invalid_argument("only 2x2 blocks can be assembled");
    Eigen::Matrix2cd B = blocks[j].S2();
    S(j, j) = B(0, 0);
    S(j, n + j) = B(0, 1);
    S(n + j, j) = B(1, 0);
    S(n + j, n + j) = B(1, 1);
  }
  return S;
}

// ---------------------------------------------------------------------------
// bracket-condition point search

struct HprimeResult {
  bool found = false;
  Eigen::VectorXd zeta;
  double q1 = 0.0, q2 = 0.0, q3 = 0.0;
  int starts_used = 0;
};

// Searches for zeta with t(zeta) A1 zeta = t(zeta) A2 zeta = 0 and
// t(zeta) A3 zeta != 0, where A_i = S_i J and A3 = [S1, S2] J.  Multistart
// Gauss-Newton on the sphere; deterministic under the seed.
inline HprimeResult hprime_search(const Eigen::MatrixXd& S1,
                                  const Eigen::MatrixXd& S2,
                                  std::uint64_t seed = 1234,
                                  int starts = 200) {
  HprimeResult out;
  const int d = static_cast<int>(S1.rows());
  Eigen::MatrixXd J = matJ(d / 2);
  auto symm = [](Eigen::MatrixXd M) {
    return Eigen::MatrixXd(0.5 * (M + M.transpose()));
  };
  Eigen::MatrixXd A1 = symm(S1 * J), A2 = symm(S2 * J);
  Eigen::MatrixXd A3 = symm((S1 * S2 - S2 * S1) * J);
  const double n3 = A3.norm();
  if (n3 < 1e-14 * (1.0 + S1.norm() * S2.norm())) return out;
  const double n1 = std::max(A1.norm(), 1e-300);
  const double n2 = std::max(A2.norm(), 1e-300);
  Eigen::MatrixXd B1 = A1 / n1, B2 = A2 / n2;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int s = 0; s < starts; ++s) {
    ++out.starts_used;
    Eigen::VectorXd z(d);
    for (int i = 0; i < d; ++i) z(i) = gauss(rng);
    z.normalize();
    bool converged = false;
    for (int it = 0; it < 80; ++it) {
      Eigen::Vector2d r(z.dot(B1 * z), z.dot(B2 * z));
      if (r.norm() < 1e-14) {
        converged = true;
        break;
      }
      Eigen::MatrixXd Jac(2, d);
      Jac.row(0) = 2.0 * (B1 * z).transpose();
      Jac.row(1) = 2.0 * (B2 * z).transpose();
      Eigen::Matrix2d G = Jac * Jac.transpose();
      if (std::abs(G.determinant()) < 1e-18) break;
      Eigen::VectorXd step = Jac.transpose() * G.inverse() * r;
      z = (z - step).normalized();
    }
    if (!converged) continue;
    double q3 = z.dot(A3 * z);
    if (std::abs(q3) > 1e-6 * n3) {
      out.found = true;
      out.zeta = z;
      out.q1 = z.dot(A1 * z);
      out.q2 = z.dot(A2 * z);
      out.q3 = q3;
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// block classification

inline ClassificationReport classify_complex_blocks(
    const std::vector<ComplexBlock>& blocks, Cx alpha) {
  if (blocks.empty()) throw std::invalid_argument("no blocks given");
  for (const ComplexBlock& b : blocks) {
    if (b.dim < 2 || b.dim % 2 != 0)
      throw std::invalid_argument("inconsistent block dimensions");
    if (b.dim == 2 && b.type != 1 && b.type != 3)
      throw std::invalid_argument("unknown block type");
  }
  ClassificationReport rep;
  rep.exactness = "float";

  for (const ComplexBlock& b : blocks)
    if (b.dim > 2) {
      rep.verdict = Verdict::NotLocallySolvable;
      rep.theorem = "minimal-block dimension criterion";
      rep.detail =
          "a minimal invariant subspace of dimension above two rules out "
          "local solvability for every first-order term";
      return rep;
    }

  const int n = static_cast<int>(blocks.size());

  if (n == 1) {
    const ComplexBlock& b = blocks[0];
    if (b.type == 3) {
      // after dividing by the block coefficient this is the real hyperbolic
      // operator, whose generator has real spectrum
      rep.verdict = Verdict::LocallySolvable;
      rep.theorem = "real-coefficient trichotomy";
      rep.detail = "hyperbolic block: spectrum of the generator is real";
      rep.semisimple_imaginary = false;
      return rep;
    }
    if (b.lambda > 1.0) {
      rep.verdict = Verdict::NotLocallySolvable;
      rep.theorem = "hyperbolic generalized block";
      rep.detail =
          "single block with lambda > 1: not locally solvable for every "
          "first-order term";
      return rep;
    }
    // normalized zeroth-order coefficient
    Cx at = alpha / b.gamma;
    bool at_real = std::abs(at.imag()) <= 1e-9 * (1.0 + std::abs(at));
    double m = std::round(at.real());
    bool odd_int = at_real && std::abs(at.real() - m) <= 1e-9 &&
                   std::llabs(static_cast<long long>(m)) % 2 == 1;
    auto record_hit = [&](int sign_needed) {
      DiophWitness w;
      w.k = {(std::llabs(static_cast<long long>(m)) - 1) / 2};
      w.sign = m > 0 ? -1 : +1;
      w.value = 0.0;
      w.probable_exact_hit = true;
      DiophVerdict dv;
      dv.mode = "CriticalSet";
      dv.holds = Holds::No;
      dv.witness = w;
      rep.dioph = dv;
      rep.diophantine = Holds::No;
      (void)sign_needed;
    };
    if (std::abs(b.lambda) < 1.0) {
      rep.theorem = "generalized sub-Laplacian critical set";
      rep.frequencies = {1.0};
      if (odd_int) {
        rep.verdict = Verdict::NotLocallySolvable;
        rep.detail = "normalized coefficient lies in the critical set";
        record_hit(0);
      } else {
        rep.verdict = Verdict::LocallySolvable;
        rep.detail = "normalized coefficient avoids the critical set";
        rep.diophantine = Holds::Yes;
      }
      return rep;
    }
    // |lambda| = 1: degenerate block, one-sided critical set
    rep.theorem = "degenerate factorization";
    const bool plus_side = b.lambda == 1.0;  // else lambda == -1
    bool in_set = odd_int && (plus_side ? m > 0 : m < 0);
    if (in_set) {
      rep.verdict = Verdict::NotLocallySolvable;
      rep.detail = plus_side
                       ? "coefficient on the positive critical half-set"
                       : "coefficient on the negative critical half-set";
      record_hit(0);
    } else {
      rep.verdict = Verdict::LocallySolvable;
      rep.detail = "degenerate block factors with a solvable first factor";
      rep.diophantine = Holds::Yes;
    }
    return rep;
  }

  // multi-block: paired hyperbolic blocks first
  if (n == 2 && blocks[0].type == 1 && blocks[1].type == 1 &&
      blocks[0].lambda > 1.0 &&
      std::abs(blocks[0].lambda - blocks[1].lambda) <= 1e-12 &&
      blocks[0].eps * blocks[1].eps == -1 &&
      std::abs(blocks[0].gamma - blocks[1].gamma) <= 1e-12) {
    rep.verdict = Verdict::LocallySolvable;
    rep.theorem = "paired hyperbolic blocks";
    rep.detail =
        "opposed pair with common lambda > 1 reduces to an operator elliptic "
        "away from the origin; solvable for arbitrary invariant lower-order "
        "terms";
    return rep;
  }

  // positive-combination class: every block elliptic-degenerate with a
  // positive semidefinite real part
  bool class_one = true;
  for (const ComplexBlock& b : blocks) {
    if (b.type != 1 || b.lambda > 1.0) {
      class_one = false;
      break;
    }
    double a = b.gamma.real(), bb = b.gamma.imag(), l = b.lambda;
    bool psd = a >= -1e-12 &&
               a * a * (1.0 - l * l) - bb * bb * l * l >= -1e-12;
    if (!psd) {
      class_one = false;
      break;
    }
  }
  if (class_one) {
    std::vector<Cx> gamma;
    for (const ComplexBlock& b : blocks) gamma.push_back(b.gamma);
    rep.theorem = "positive-combination exceptional class";
    auto mem = detail::exceptional_membership(gamma, alpha);
    if (mem.status == 0) {
      rep.verdict = Verdict::LocallySolvable;
      rep.detail =
          "zeroth-order coefficient avoids the critical set (distance " +
          std::to_string(mem.margin) + ")";
      rep.diophantine = Holds::Yes;
    } else if (mem.status == 1) {
      rep.verdict = Verdict::Undetermined;
      rep.detail =
          "zeroth-order coefficient lies in the critical set; no verdict "
          "there";
      DiophWitness w;
      w.k = mem.k;
      w.sign = mem.sign;
      w.value = 0.0;
      w.probable_exact_hit = true;
      DiophVerdict dv;
      dv.mode = "CriticalSet";
      dv.holds = Holds::Unknown;
      dv.witness = w;
      rep.dioph = dv;
    } else {
      rep.verdict = Verdict::Undetermined;
      rep.detail =
          "critical-set membership undecidable without a separating "
          "half-plane";
    }
    return rep;
  }

  // fallback: bracket-condition point search on the assembled generator
  Eigen::MatrixXcd S = blocks_to_S(blocks);
  Eigen::MatrixXd S1 = S.real(), S2 = S.imag();
  HprimeResult hp = hprime_search(S1, S2);
  if (hp.found) {
    rep.verdict = Verdict::NotLocallySolvable;
    rep.theorem = "bracket condition";
    rep.detail =
        "point with vanishing real and imaginary principal symbol but "
        "nonvanishing bracket symbol; not locally solvable for every "
        "first-order term";
    rep.hprime_zeta.assign(hp.zeta.data(), hp.zeta.data() + hp.zeta.size());
    return rep;
  }
  rep.verdict = Verdict::Undetermined;
  rep.theorem = "outside classified patterns";
  rep.detail =
      "no bracket-condition point found and the block pattern matches no "
      "classified family";
  return rep;
}

// ---------------------------------------------------------------------------
// paired hyperbolic reduction

struct QlambdaResult {
  double lambda = 0.0;
  double c = 0.0;  // sqrt(lambda^2 - 1)
  Eigen::Matrix4d T;        // symplectic change of coordinates
  Eigen::Matrix2cd Acal;    // coefficients of the reduced mixed form
  double coefficient_gap = 0.0;  // operator-level identity residual
  double symplectic_defect = 0.0;
  double ellipticity_margin = 0.0;
  bool det_nonzero = false;
};

namespace detail {

inline DiffOp field_comb(int n, const Eigen::VectorXcd& coef) {
  DiffOp op = DiffOp::zero(2 * n + 1);
  for (int i = 0; i < 2 * n; ++i)
    if (coef(i) != Cx(0.0, 0.0)) op = op + coef(i) * field_W(n, i);
  return op;
}

}  // namespace detail

// Ellipticity of the mixed first-order-in-each-factor form
// sum_jk Acal_jk X_j Y_k: minimum of |t(xi) Acal x| over the product of unit
// circles, plus the determinant test.
struct EllipticityResult {
  double margin = 0.0;
  bool elliptic = false;
  Cx det{0.0, 0.0};
  bool det_nonzero = false;
};

inline EllipticityResult la_ellipticity_test(const Eigen::Matrix2cd& Acal,
                                             int grid = 720) {
  EllipticityResult out;
  double mn = std::numeric_limits<double>::infinity();
  for (int a = 0; a < grid; ++a) {
    double ta = 2.0 * M_PI * a / grid;
    Eigen::Vector2cd x(Cx(std::cos(ta), 0.0), Cx(std::sin(ta), 0.0));
    for (int b = 0; b < grid; ++b) {
      double tb = 2.0 * M_PI * b / grid;
      Eigen::Vector2cd xi(Cx(std::cos(tb), 0.0), Cx(std::sin(tb), 0.0));
      mn = std::min(mn, std::abs(xi.dot(Acal * x)));
    }
  }
  out.margin = mn;
  out.elliptic = mn > 1e-9 * (1.0 + Acal.norm());
  out.det = Acal.determinant();
  out.det_nonzero = std::abs(out.det) > 1e-12 * (1.0 + Acal.squaredNorm());
  return out;
}

// Reduction of the opposed hyperbolic pair with lambda > 1 to a mixed form
// elliptic away from the origin.  The canonical basis behind T is
//   X'_1 = (Y2 + c X1)/s,  X'_2 = (Y1 + c X2)/s,
//   Y'_1 = (Y1 - c X2)/s,  Y'_2 = (Y2 - c X1)/s,     s = sqrt(2c),
// and the operator equals sum Acal_jk X'_j Y'_k exactly.
inline QlambdaResult qlambda_reduce(double lambda) {
  if (!(lambda > 1.0))
    throw std::invalid_argument("reduction needs lambda > 1");
  QlambdaResult out;
  out.lambda = lambda;
  const double c = std::sqrt(lambda * lambda - 1.0);
  out.c = c;
  const double s = std::sqrt(2.0 * c);
  const int n = 2;

  // operator of the block pair (eps = +1 on pair 1, -1 on pair 2)
  std::vector<ComplexBlock> blocks = {
      ComplexBlock::type1(Cx(1.0, 0.0), lambda, +1),
      ComplexBlock::type1(Cx(1.0, 0.0), lambda, -1)};
  Eigen::MatrixXcd S = blocks_to_S(blocks);
  DiffOp L = op_quadratic(n, A_from_S(S));

  // rows of M: the new fields in terms of (X1, X2, Y1, Y2)
  Eigen::Matrix4d M;
  M << c / s, 0, 0, 1 / s,   // X'_1
      0, c / s, 1 / s, 0,    // X'_2
      0, -c / s, 1 / s, 0,   // Y'_1
      -c / s, 0, 0, 1 / s;   // Y'_2
  out.T = M.transpose();
  Eigen::Matrix4d J4 = matJ(2);
  out.symplectic_defect = (out.T.transpose() * J4 * out.T - J4).norm();

  // The pair operator equals (1+q) D E - q conj(D) conj(E) with
  // q = (lambda - c)/(2c); in the canonical primed basis the coefficients
  // collapse to Acal below, with det Acal = 4 for every lambda > 1.
  Eigen::Matrix2cd Acal;
  Acal << Cx(0.0, 2.0 * lambda), Cx(2.0 * c, 0.0), Cx(2.0 * c, 0.0),
      Cx(0.0, -2.0 * lambda);
  out.Acal = Acal;

  // rebuild the operator from the reduced coefficients and compare
  std::vector<DiffOp> Xp, Yp;
  for (int i = 0; i < 2; ++i)
    Xp.push_back(detail::field_comb(n, M.row(i).cast<Cx>()));
  for (int i = 2; i < 4; ++i)
    Yp.push_back(detail::field_comb(n, M.row(i).cast<Cx>()));
  DiffOp R = DiffOp::zero(2 * n + 1);
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) R = R + Acal(j, k) * (Xp[j] * Yp[k]);
  DiffOp gap = L - R;
  double g = 0.0;
  for (const auto& [mi, p] : gap.terms) g = std::max(g, p.max_abs());
  out.coefficient_gap = g;

  EllipticityResult ell = la_ellipticity_test(Acal);
  out.ellipticity_margin = ell.margin;
  out.det_nonzero = ell.det_nonzero;
  return out;
}

// ---------------------------------------------------------------------------
// symplectic covariance of Delta_S and U on Gaussian test functions

inline HTestFunction htest_compose_linear(const HTestFunction& f,
                                          const Eigen::MatrixXd& T) {
  const int n = f.n;
  std::vector<std::vector<Cx>> M(2 * n, std::vector<Cx>(2 * n));
  for (int i = 0; i < 2 * n; ++i)
    for (int j = 0; j < 2 * n; ++j) M[i][j] = Cx(T(i, j), 0.0);
  std::vector<Poly> pk;
  std::vector<Cx> zero(2 * n, Cx(0.0, 0.0));
  for (const Poly& p : f.pk) pk.push_back(subst_linear(p, M, zero));
  Eigen::MatrixXcd Mz = T.transpose() * f.Mz * T;
  return HTestFunction::make(n, pk, Mz, f.au);
}

struct CovarianceResult {
  double delta_gap = 0.0;  // Delta_S(f o T) vs (Delta_{T S T^-1} f) o T
  double u_gap = 0.0;      // U(f o T) vs (U f) o T
};

inline CovarianceResult symplectic_covariance_check(const Eigen::MatrixXcd& S,
                                                    const Eigen::MatrixXd& T,
                                                    const HTestFunction& f,
                                                    double sp_tol = 1e-8) {
  const int n = f.n;
  if (sp_group_defect(T) > sp_tol)
    throw std::invalid_argument("T is not symplectic");
  Eigen::MatrixXcd Sc =
      T.cast<Cx>() * S * T.cast<Cx>().inverse();
  auto gap_between = [](const HTestFunction& a, const HTestFunction& b) {
    double g = std::max(std::abs(a.au - b.au),
                        (a.Mz - b.Mz).cwiseAbs().maxCoeff());
    std::size_t m = std::max(a.pk.size(), b.pk.size());
    for (std::size_t k = 0; k < m; ++k) {
      Poly pa = k < a.pk.size() ? a.pk[k] : Poly::zero(2 * a.n);
      Poly pb = k < b.pk.size() ? b.pk[k] : Poly::zero(2 * b.n);
      g = std::max(g, (pa - pb).max_abs());
    }
    return g;
  };
  CovarianceResult out;
  {
    HTestFunction lhs = htest_apply(op_delta_S(n, S), htest_compose_linear(f, T));
    HTestFunction rhs =
        htest_compose_linear(htest_apply(op_delta_S(n, Sc), f), T);
    out.delta_gap = gap_between(lhs, rhs);
  }
  {
    HTestFunction lhs = htest_apply(field_U(n), htest_compose_linear(f, T));
    HTestFunction rhs = htest_compose_linear(htest_apply(field_U(n), f), T);
    out.u_gap = gap_between(lhs, rhs);
  }
  return out;
}

// ---------------------------------------------------------------------------
// central-frequency realization

// Left-invariant operators have coefficients polynomial in z alone; under
// the central partial Fourier transform d/du becomes multiplication by
// 2 pi i mu.  Input arity 2n+1 over (z, u), output arity 2n+1 over (z, mu)
// with mu in the last slot.  The map is an algebra homomorphism, which the
// tests verify on generator products.
inline DiffOp mu_realize(const DiffOp& op) {
  const int arity = op.nvars;
  const int u = arity - 1;
  DiffOp out = DiffOp::zero(arity);
  Poly mu = Poly::var(arity, u);
  for (const auto& [mi, p] : op.terms) {
    for (const auto& [a, c] : p.terms)
      if (a[u] != 0)
        throw std::invalid_argument("coefficient depends on the central variable");
    MultiIndex zi = mi;
    const int m = zi[u];
    zi[u] = 0;
    Poly coef = p;
    for (int r = 0; r < m; ++r) coef = coef * (Cx(0.0, 2.0 * M_PI) * mu);
    DiffOp term = DiffOp::zero(arity);
    term.add_term(zi, coef);
    out = out + term;
  }
  return out;
}

// ---------------------------------------------------------------------------
// principal symbol and Poisson bracket

// Principal symbol of Delta_S as a polynomial in (z, u, zeta, mu), arity
// 4n + 2: sigma = -t(zeta - pi mu J z) A (zeta - pi mu J z), A = S J.
inline Poly principal_symbol(int n, const Eigen::MatrixXcd& S) {
  const int d = 2 * n;
  const int arity = 2 * d + 2;  // z (d), u, zeta (d), mu
  Eigen::MatrixXcd A = A_from_S(S);
  const double pi = 3.14159265358979323846;
  auto zvar = [&](int i) { return Poly::var(arity, i); };
  auto zetavar = [&](int i) { return Poly::var(arity, d + 1 + i); };
  Poly mu = Poly::var(arity, 2 * d + 1);
  std::vector<Poly> v;
  for (int i = 0; i < d; ++i) {
    Poly Jz = i < n ? zvar(n + i) : Cx(-1.0, 0.0) * zvar(i - n);
    v.push_back(zetavar(i) - Cx(pi, 0.0) * (mu * Jz));
  }
  Poly sig = Poly::zero(arity);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (A(i, j) != Cx(0.0, 0.0)) sig = sig + (Cx(-1.0, 0.0) * A(i, j)) * (v[i] * v[j]);
  return sig;
}

// Poisson bracket with the pairing (q_i, p_i) = (var i, var d + i), arity
// 2d: {f, g} = sum_i d_p f d_q g - d_q f d_p g.
inline Poly poisson_bracket(const Poly& f, const Poly& g) {
  if (f.nvars != g.nvars || f.nvars % 2 != 0)
    throw std::invalid_argument("bracket needs matching even arities");
  const int d = f.nvars / 2;
  Poly out = Poly::zero(f.nvars);
  for (int i = 0; i < d; ++i) {
    out = out + f.derivative(d + i) * g.derivative(i) -
          f.derivative(i) * g.derivative(d + i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// certificate replay

struct CertCheck {
  bool ok = true;
  std::string detail;
};

inline CertCheck recheck_certificates(const OperatorInput& in,
                                      const ClassificationReport& rep) {
  CertCheck out;
  auto fail = [&](const std::string& why) {
    out.ok = false;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += why;
  };
  if (rep.exactness == "rational" && in.exact) {
    RatMat S = in.S_exact();
    ExactSpectral es = exact_spectral(S);
    if (rep.semisimple_imaginary &&
        *rep.semisimple_imaginary != (es.imaginary && es.semisimple))
      fail("spectral condition does not replay");
    if (rep.alpha_real && *rep.alpha_real != (in.alpha_exact.im == 0))
      fail("realness condition does not replay");
    if (rep.dioph && rep.dioph->witness && es.freqs_rational) {
      const DiophWitness& w = *rep.dioph->witness;
      if (w.k.size() != es.freqs.size()) {
        fail("witness length mismatch");
      } else {
        Rat v(0);
        for (std::size_t i = 0; i < w.k.size(); ++i)
          v += Rat(2 * w.k[i] + 1) * es.freqs[i];
        v += Rat(w.sign) * in.alpha_exact.re;
        if (rep.diophantine == Holds::No && v != 0)
          fail("resonance witness does not vanish exactly");
      }
    }
    if (rep.diophantine == Holds::Yes && rep.dioph && es.freqs_rational) {
      DiophVerdict dv = diophantine_decide_rational(es.freqs,
                                                    in.alpha_exact.re, 64);
      if (dv.holds != Holds::Yes) fail("lower-bound certificate does not replay");
    }
  }
  if (rep.T.size() > 0) {
    if (sp_group_defect(rep.T) > 1e-8) fail("conjugator is not symplectic");
    if (!rep.frequencies.empty()) {
      Eigen::MatrixXd Sf = detail::real_S_of(in);
      Eigen::MatrixXd NB = normal_block(rep.frequencies);
      double gap = (rep.T * Sf * rep.T.inverse() - NB).norm();
      if (gap > 1e-6 * (1.0 + Sf.norm()))
        fail("conjugator does not reach the reported normal form");
    }
  }
  return out;
}

}  // namespace heis
