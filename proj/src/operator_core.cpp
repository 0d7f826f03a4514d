#include "oplab/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace oplab {

Spectral decompose(const CMat& x) {
  require_square(x, "decompose");
  Eigen::ComplexEigenSolver<CMat> es(x, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success)
    throw ConditioningError("decompose: eigensolver failed to converge");
  Spectral s;
  s.values = es.eigenvalues();
  s.vectors = es.eigenvectors();
  Eigen::JacobiSVD<CMat> svd(s.vectors);
  const double smin = svd.singularValues().minCoeff();
  if (smin <= 0.0)
    throw ConditioningError("decompose: defective eigenvector matrix");
  s.condition = svd.singularValues().maxCoeff() / smin;
  if (s.condition > kEigvecConditionLimit)
    throw ConditioningError("decompose: eigenvector condition " +
                            std::to_string(s.condition) + " exceeds gate");
  s.vectors_inv = s.vectors.partialPivLu().inverse();
  return s;
}

CMat imaginary_part(const CMat& x) {
  require_square(x, "imaginary_part");
  return (x - x.adjoint()) / cplx(0.0, 2.0);
}

double min_imag_eigenvalue(const CMat& x) {
  Eigen::SelfAdjointEigenSolver<CMat> es(imaginary_part(x),
                                         Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double default_dissipativity_tol(const CMat& x) {
  return 1e-12 * x.norm();
}

bool is_dissipative(const CMat& x, double tol) {
  require_square(x, "is_dissipative");
  if (tol < 0.0) throw ArgumentError("is_dissipative: tol must be >= 0");
  return min_imag_eigenvalue(x) >= -tol;
}

CMat cayley(const CMat& l) {
  require_square(l, "cayley");
  if (!is_dissipative(l))
    throw ArgumentError("cayley: L must be dissipative");
  const int n = l.rows();
  const CMat shifted = l + kI * CMat::Identity(n, n);
  Eigen::PartialPivLU<CMat> lu(shifted);
  // ||(L+iI)v|| >= ||v|| for dissipative L; a singular shift means the
  // dissipativity precondition is violated.
  const CMat t = (l - kI * CMat::Identity(n, n)) * lu.inverse();
  if (!t.allFinite())
    throw SingularityError("cayley: L + iI numerically singular");
  return t;
}

CMat inverse_cayley(const CMat& t) {
  require_square(t, "inverse_cayley");
  const int n = t.rows();
  const CMat m = CMat::Identity(n, n) - t;
  Eigen::JacobiSVD<CMat> svd(m);
  const double smin = svd.singularValues().minCoeff();
  if (smin < 1e-12 * std::max(1.0, t.norm()))
    throw SingularityError(
        "inverse_cayley: 1 is an eigenvalue of T within tolerance");
  return kI * (CMat::Identity(n, n) + t) * m.partialPivLu().inverse();
}

CMat relative_operator(const CMat& l, const CMat& k) {
  require_same_dim(l, k, "relative_operator");
  const int n = l.rows();
  const CMat shifted = l + kI * CMat::Identity(n, n);
  // K (L+iI)^{-1} = ((L+iI)^{-*} K^*)^*.
  return CMat(shifted.adjoint()).partialPivLu().solve(CMat(k.adjoint())).adjoint();
}

double domination_constants(const CMat& l, const CMat& k, double d) {
  require_same_dim(l, k, "domination_constants");
  if (!(d > 0.0 && d < 1.0))
    throw ArgumentError("domination_constants: d must lie in (0,1)");
  const CMat c = relative_operator(l, k);
  if (c.norm() == 0.0) return 0.0;

  Eigen::JacobiSVD<CMat> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const int n = c.rows();
  const CMat ls_adj = l.adjoint() - kI * CMat::Identity(n, n);  // (L+iI)*
  double c_out = 0.0;
  double r_norm = 0.0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) >= d / 2.0) {
      // Rank-one term sigma ((L+iI)v, v_i) u_i pairs onto (L+iI)* v_i.
      c_out += sv(i) * (ls_adj * svd.matrixV().col(i)).norm();
    } else {
      r_norm = std::max(r_norm, sv(i));
    }
  }
  return c_out + r_norm;
}

namespace {

CVec random_unit_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(gauss(rng), gauss(rng));
  const double nrm = v.norm();
  return nrm > 0 ? CVec(v / nrm) : CVec(CVec::Unit(n, 0));
}

}  // namespace

double domination_violation(const CMat& l, const CMat& k, double c, double d,
                            unsigned seed, int n_samples,
                            int n_ascent_starts) {
  require_same_dim(l, k, "domination_violation");
  const int n = l.rows();
  std::mt19937_64 rng(seed);
  auto gap = [&](const CVec& v) {
    return (k * v).norm() - c * v.norm() - d * (l * v).norm();
  };
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i)
    worst = std::max(worst, gap(random_unit_vector(rng, n)));

  // Projected-gradient ascent on the unit sphere.
  for (int s = 0; s < n_ascent_starts; ++s) {
    CVec v = random_unit_vector(rng, n);
    double val = gap(v);
    double step = 0.1;
    for (int it = 0; it < 200 && step > 1e-12; ++it) {
      const CVec kv = k * v, lv = l * v;
      CVec grad = CVec::Zero(n);
      if (kv.norm() > 0) grad += k.adjoint() * kv / kv.norm();
      grad -= c * v;  // v is unit
      if (lv.norm() > 0) grad -= d * l.adjoint() * lv / lv.norm();
      CVec cand = v + step * grad;
      cand /= cand.norm();
      const double cv = gap(cand);
      if (cv > val) {
        v = cand;
        val = cv;
      } else {
        step *= 0.5;
      }
    }
    worst = std::max(worst, val);
  }
  return worst;
}

double maximality_margin(double c, double d) {
  if (c < 0.0) throw ArgumentError("maximality_margin: c must be >= 0");
  if (!(d < 0.5))
    throw ArgumentError("maximality_margin: requires d < 1/2");
  if (c == 0.0) return 1.0;
  if (d <= 0.0) return 1.0;
  // Any kappa > cd/(1-2d) works; factor 2 on the doubled critical value.
  const double kappa = 2.0 * (2.0 * c * d / (1.0 - 2.0 * d));
  return kappa;
}

double schatten_norm(const CMat& x, double p) {
  require_square(x, "schatten_norm");
  if (p == 2.0) return x.norm();
  Eigen::JacobiSVD<CMat> svd(x);
  const auto& sv = svd.singularValues();
  if (p == 1.0) return sv.sum();
  if (p <= 0.0) return sv.size() ? sv.maxCoeff() : 0.0;  // operator norm
  throw ArgumentError("schatten_norm: p must be 1, 2 or infinity(<=0)");
}

DissipativePair DissipativePair::make(CMat l, CMat k, double d_request) {
  require_same_dim(l, k, "DissipativePair");
  const CMat m = l + k;
  if (!is_dissipative(l))
    throw ArgumentError("DissipativePair: L is not dissipative");
  if (!is_dissipative(m))
    throw ArgumentError("DissipativePair: M = L + K is not dissipative");
  DissipativePair pair;
  pair.C = Operator(relative_operator(l, k));
  pair.c = domination_constants(l, k, d_request);
  pair.d = d_request;
  pair.L = Operator(std::move(l));
  pair.K = Operator(std::move(k));
  pair.M = Operator(m);
  return pair;
}

CMat path_relative(const DissipativePair& pair, double t) {
  const int n = pair.L.dim();
  const CMat& c = pair.C.mat();
  const CMat it_c = CMat::Identity(n, n) + t * c;
  Eigen::JacobiSVD<CMat> svd(it_c);
  if (svd.singularValues().minCoeff() < 1e-12 * std::max(1.0, it_c.norm()))
    throw SingularityError("path_relative: I + tC singular along the path");
  return CMat(it_c.adjoint()).partialPivLu().solve(CMat(c.adjoint())).adjoint();
}

PathFamily PathFamily::make(DissipativePair pair, std::vector<double> t_grid) {
  std::sort(t_grid.begin(), t_grid.end());
  for (double t : t_grid) {
    if (t < 0.0 || t > 1.0)
      throw ArgumentError("PathFamily: t_grid entries must lie in [0,1]");
    if (!is_dissipative(pair.L_t(t)))
      throw ArgumentError("PathFamily: L_t not dissipative on the grid");
  }
  return PathFamily{std::move(pair), std::move(t_grid)};
}

}  // namespace oplab
