#include "oplab/doi.hpp"

#include <cmath>
#include <utility>

#include <Eigen/Eigenvalues>

#include "oplab/semispectral.hpp"

namespace oplab {

Kernel Kernel::dd(AnalyticFn f) {
  Kernel k;
  k.form_ = Form::dd;
  k.f_ = std::move(f);
  return k;
}

Kernel Kernel::dd_flat(AnalyticFn f) {
  Kernel k;
  k.form_ = Form::dd_flat;
  k.f_ = std::move(f);
  return k;
}

Kernel Kernel::res_dd(AnalyticFn f) {
  Kernel k;
  k.form_ = Form::res_dd;
  k.f_ = std::move(f);
  return k;
}

Kernel Kernel::one() { return Kernel(); }

Kernel Kernel::custom(std::function<cplx(cplx, cplx)> phi) {
  Kernel k;
  k.form_ = Form::custom;
  k.phi_ = std::move(phi);
  return k;
}

cplx Kernel::eval(cplx z, cplx w) const {
  const double slack = 1e-9 * (1.0 + std::abs(z) + std::abs(w));
  if (z.imag() < -slack || w.imag() < -slack)
    throw FnDomainError("Kernel::eval: arguments must lie in clos C+");
  switch (form_) {
    case Form::dd:
      return f_->divided_diff(z, w);
    case Form::dd_flat:
      return f_->divided_diff(z, w) * (w + kI);
    case Form::res_dd:
      return (z + kI) * (w + kI) * f_->divided_diff(z, w);
    case Form::one:
      return cplx(1.0);
    case Form::custom:
      return phi_(z, w);
  }
  throw ArgumentError("Kernel::eval: unreachable form");
}

CMat doi_eigen(const Kernel& ker, const Operator& m, const CMat& q,
               const Operator& l) {
  require_square(q, "doi_eigen");
  if (q.rows() != m.dim() || q.cols() != l.dim())
    throw DimensionError("doi_eigen: Q must map the space of L into that of M");
  const Spectral& sm = m.spectral();
  const Spectral& sl = l.spectral();
  CMat inner = sm.vectors_inv * q * sl.vectors;
  for (int j = 0; j < m.dim(); ++j)
    for (int k = 0; k < l.dim(); ++k)
      inner(j, k) *= ker.eval(sm.values(j), sl.values(k));
  return sm.vectors * inner * sl.vectors_inv;
}

CMat doi_quadrature(const Kernel& ker, const Operator& m, const CMat& q,
                    const Operator& l, const GridSpec& grid, Exec exec) {
  require_strict_dissipativity(m);
  require_strict_dissipativity(l);
  require_square(q, "doi_quadrature");
  const CMat mm = m.mat();
  const CMat lm = l.mat();
  // Inner integral over the L-side for fixed x, then the outer x integral;
  // both loops share the same grid spec.
  auto inner = [&](double x) {
    const CMat rho_m_q = poisson_density(mm, x) * q;
    return integrate_matrix_adaptive(
        grid,
        [&](double y) {
          return CMat(ker.eval(cplx(x, 0.0), cplx(y, 0.0)) *
                      (rho_m_q * poisson_density(lm, y)));
        },
        Exec::Serial, nullptr);
  };
  return integrate_matrix_adaptive(grid, inner, exec, nullptr);
}

double difference_formula_residual(const AnalyticFn& f,
                                   const DissipativePair& pair) {
  const CMat fm = apply(f, pair.M);
  const CMat fl = apply(f, pair.L);
  const CMat doi = doi_eigen(Kernel::dd_flat(f), pair.M, pair.C.mat(), pair.L);
  const double denom = std::max(1.0, operator_norm(fm - fl));
  return operator_norm(fm - fl - doi) / denom;
}

DerivativeValue derivative_formula(const DissipativePair& pair, double t,
                                   const AnalyticFn& f) {
  const Operator lt(pair.L_t(t));
  const CMat rel = path_relative(pair, t);
  DerivativeValue dv;
  dv.q_t = doi_eigen(Kernel::dd_flat(f), lt, rel, lt);
  dv.trace_norm = trace_norm(dv.q_t);
  return dv;
}

namespace {

using lcplx = std::complex<long double>;
using LMat = Eigen::Matrix<lcplx, Eigen::Dynamic, Eigen::Dynamic>;

// f(X) through a long double eigendecomposition; f itself is evaluated in
// double, which is far below the h^2 truncation of the difference quotient.
LMat apply_long(const AnalyticFn& f, const LMat& x) {
  Eigen::ComplexEigenSolver<LMat> es(x);
  if (es.info() != Eigen::Success)
    throw ConditioningError("derivative_central_difference: eigensolver failed");
  const int n = static_cast<int>(x.rows());
  LMat d = LMat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    lcplx ev = es.eigenvalues()(j);
    if (ev.imag() < 0.0) ev = lcplx(ev.real(), 0.0);
    const cplx fv = f.eval(cplx(static_cast<double>(ev.real()),
                                static_cast<double>(ev.imag())));
    d(j, j) = lcplx(fv.real(), fv.imag());
  }
  return es.eigenvectors() * d *
         es.eigenvectors().fullPivLu().inverse();
}

}  // namespace

CMat derivative_central_difference(const DissipativePair& pair, double t,
                                   double h, const AnalyticFn& f) {
  if (!(h > 0.0)) throw ArgumentError("derivative_central_difference: h > 0");
  const int n = pair.L.dim();
  LMat lm(n, n), km(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      lm(r, c) = lcplx(pair.L.mat()(r, c).real(), pair.L.mat()(r, c).imag());
      km(r, c) = lcplx(pair.K.mat()(r, c).real(), pair.K.mat()(r, c).imag());
    }
  const long double lt = static_cast<long double>(t);
  const long double lh = static_cast<long double>(h);
  const LMat diff = (apply_long(f, LMat(lm + (lt + lh) * km)) -
                     apply_long(f, LMat(lm + (lt - lh) * km))) /
                    (2.0L * lh);
  CMat out(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      out(r, c) = cplx(static_cast<double>(diff(r, c).real()),
                       static_cast<double>(diff(r, c).imag()));
  return out;
}

TraceIdentity doi_trace_identity(const AnalyticFn& f, const Operator& l,
                                 const CMat& r, const GridSpec& grid,
                                 Exec exec) {
  require_strict_dissipativity(l);
  TraceIdentity ti;
  ti.lhs = doi_eigen(Kernel::dd_flat(f), l, r, l).trace();
  const CMat lm = l.mat();
  ti.rhs = integrate_scalar_adaptive(
      grid,
      [&](double x) {
        return f.deriv(x) * (x + kI) * (poisson_density(lm, x) * r).trace();
      },
      exec, nullptr);
  return ti;
}

}  // namespace oplab
