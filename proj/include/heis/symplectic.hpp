#pragma once
// Floating-point spectral analysis of Hamilton matrices S in sp(2n, R) and
// the symplectic normal form for the semisimple purely-imaginary case:
// a real T with T S T^{-1} = [[0, L], [-L, 0]], L = diag(lambda_1..lambda_n),
// columns of T^{-1} symplectic, the sign of each lambda_j fixed by the Krein
// form K(v, v) = <a, b> for the eigenvector v = a + ib of i lambda_j.

#include <Eigen/Dense>

#include <algorithm>
#include <string>
#include <vector>

#include "heis/fields.hpp"

namespace heis {

// Membership in sp: S J symmetric (equivalently S^T J + J S = 0).
inline double sp_defect(const Eigen::MatrixXd& S) {
  const int n = static_cast<int>(S.rows()) / 2;
  const Eigen::MatrixXd A = S * matJ(n);
  return (A - A.transpose()).norm() / std::max(1.0, S.norm());
}
inline bool is_sp(const Eigen::MatrixXd& S, double tol = 1e-10) {
  return S.rows() == S.cols() && S.rows() % 2 == 0 && sp_defect(S) <= tol;
}

struct EigCluster {
  Cx lambda;  // cluster representative (mean)
  int alg = 0;
  int geo = 0;
};

struct SpectralData {
  std::vector<Cx> eigenvalues;  // all of them, sorted by (Re, Im)
  std::vector<EigCluster> clusters;
  bool semisimple = false;
  bool imaginary = false;   // every cluster on the imaginary axis
  bool borderline = false;  // some cluster in the undecidable band
  double scale = 1.0;
};

// axis_tol: |Re| below this (times scale) counts as on-axis.
// band_tol: |Re| below this but above axis_tol is undecidable in floats.
inline SpectralData spectral_analysis(const Eigen::MatrixXd& S,
                                      double axis_tol = 1e-10,
                                      double band_tol = 1e-8,
                                      double cluster_tol = 1e-6) {
  SpectralData out;
  const int d = static_cast<int>(S.rows());
  out.scale = std::max(S.norm(), 1e-300);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(S.cast<Cx>());
  out.eigenvalues.assign(ces.eigenvalues().data(),
                         ces.eigenvalues().data() + d);
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
            [](Cx a, Cx b) {
              return a.real() != b.real() ? a.real() < b.real()
                                          : a.imag() < b.imag();
            });
  const double ctol = cluster_tol * out.scale;
  for (const Cx& ev : out.eigenvalues) {
    bool placed = false;
    for (auto& cl : out.clusters)
      if (std::abs(ev - cl.lambda) <= ctol) {
        cl.lambda = (cl.lambda * static_cast<double>(cl.alg) + ev) /
                    static_cast<double>(cl.alg + 1);
        cl.alg += 1;
        placed = true;
        break;
      }
    if (!placed) out.clusters.push_back({ev, 1, 0});
  }
  out.semisimple = true;
  out.imaginary = true;
  for (auto& cl : out.clusters) {
    Eigen::MatrixXcd R = S.cast<Cx>();
    R.diagonal().array() -= cl.lambda;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(R);
    int rank = 0;
    for (int i = 0; i < d; ++i)
      if (svd.singularValues()(i) > 1e-8 * out.scale) ++rank;
    cl.geo = d - rank;
    if (cl.geo < cl.alg) out.semisimple = false;
    const double re = std::abs(cl.lambda.real());
    if (re > axis_tol * out.scale) {
      out.imaginary = false;
      if (re <= band_tol * out.scale) out.borderline = true;
    }
  }
  return out;
}

struct NormalForm {
  bool ok = false;
  std::string reason;
  Eigen::MatrixXd T;           // T S T^{-1} = [[0, L], [-L, 0]]
  std::vector<double> freqs;   // signed lambda_j, length n
};

namespace detail {
inline double pair_sym(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       const Eigen::MatrixXd& J) {
  return a.dot(J * b);
}
}  // namespace detail

// Requires S semisimple with purely imaginary spectrum (within tolerance);
// otherwise returns ok=false with a reason.
inline NormalForm normal_form(const Eigen::MatrixXd& S, double tol = 1e-9) {
  NormalForm out;
  const int d = static_cast<int>(S.rows()), n = d / 2;
  const Eigen::MatrixXd J = matJ(n);
  const double scale = std::max(S.norm(), 1e-300);
  const SpectralData sd = spectral_analysis(S);
  if (!sd.semisimple || !sd.imaginary) {
    out.reason = "spectrum not semisimple purely imaginary";
    return out;
  }

  std::vector<Eigen::VectorXd> es, fs;
  std::vector<double> freqs;

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(S.cast<Cx>());
  // positive-imaginary clusters, largest first for a deterministic layout
  std::vector<const EigCluster*> pos;
  for (const auto& cl : sd.clusters)
    if (cl.lambda.imag() > 1e-10 * scale) pos.push_back(&cl);
  std::sort(pos.begin(), pos.end(), [](const EigCluster* a,
                                       const EigCluster* b) {
    return a->lambda.imag() > b->lambda.imag();
  });

  for (const EigCluster* cl : pos) {
    const double lam = cl->lambda.imag();
    // columns spanning the eigenspace of i*lam
    Eigen::MatrixXcd V(d, cl->alg);
    int got = 0;
    for (int i = 0; i < d && got < cl->alg; ++i)
      if (std::abs(ces.eigenvalues()(i) - cl->lambda) <= 1e-6 * scale)
        V.col(got++) = ces.eigenvectors().col(i);
    if (got != cl->alg) {
      out.reason = "could not collect a full eigenbasis";
      return out;
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(V);
    V = qr.householderQ() * Eigen::MatrixXcd::Identity(d, cl->alg);
    // Krein form K(v, w) = conj(v)^T J w / (2i), Hermitian on the eigenspace
    const Eigen::MatrixXcd K =
        (V.adjoint() * J.cast<Cx>() * V) / Cx(0.0, 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> kd(K);
    const Eigen::MatrixXcd W = V * kd.eigenvectors();
    for (int m = 0; m < cl->alg; ++m) {
      const Eigen::VectorXd a = W.col(m).real(), b = W.col(m).imag();
      const double c = detail::pair_sym(a, b, J);
      if (std::abs(c) < 1e-12) {
        out.reason = "degenerate Krein pairing";
        return out;
      }
      const double s = std::sqrt(std::abs(c));
      if (c > 0.0) {
        es.push_back(a / s);
        fs.push_back(b / s);
        freqs.push_back(lam);
      } else {
        es.push_back(b / s);
        fs.push_back(a / s);
        freqs.push_back(-lam);
      }
    }
  }

  // kernel pairs carry frequency zero
  Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
  lu.setThreshold(1e-10 * scale);
  Eigen::MatrixXd ker = lu.kernel();
  if (S.norm() == 0.0) ker = Eigen::MatrixXd::Identity(d, d);
  std::vector<Eigen::VectorXd> kv;
  if (2 * static_cast<int>(freqs.size()) < d)
    for (int i = 0; i < ker.cols(); ++i) kv.push_back(ker.col(i));
  while (!kv.empty()) {
    Eigen::VectorXd e = kv.back();
    kv.pop_back();
    if (e.norm() < 1e-12) continue;
    e.normalize();
    int best = -1;
    double bv = 0.0;
    for (std::size_t i = 0; i < kv.size(); ++i) {
      const double p = std::abs(detail::pair_sym(e, kv[i], J));
      if (p > bv) {
        bv = p;
        best = static_cast<int>(i);
      }
    }
    if (best < 0 || bv < 1e-10) {
      out.reason = "kernel is not symplectic";
      return out;
    }
    Eigen::VectorXd f = kv[best] / detail::pair_sym(e, kv[best], J);
    kv.erase(kv.begin() + best);
    for (auto& w : kv)
      w = w - detail::pair_sym(w, f, J) * e + detail::pair_sym(w, e, J) * f;
    es.push_back(e);
    fs.push_back(f);
    freqs.push_back(0.0);
  }

  if (static_cast<int>(freqs.size()) != n) {
    out.reason = "could not assemble n symplectic pairs";
    return out;
  }
  Eigen::MatrixXd B(d, d);
  for (int j = 0; j < n; ++j) {
    B.col(j) = es[j];
    B.col(n + j) = fs[j];
  }
  if ((B.transpose() * J * B - J).norm() > tol * std::max(1.0, B.squaredNorm())) {
    out.reason = "assembled basis is not symplectic";
    return out;
  }
  out.T = B.inverse();
  out.freqs = freqs;
  out.ok = true;
  return out;
}

// The target block form [[0, L], [-L, 0]] for given signed frequencies.
inline Eigen::MatrixXd normal_block(const std::vector<double>& freqs) {
  const int n = static_cast<int>(freqs.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    M(j, n + j) = freqs[j];
    M(n + j, j) = -freqs[j];
  }
  return M;
}

}  // namespace heis
