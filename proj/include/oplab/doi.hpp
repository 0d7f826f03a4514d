#pragma once

#include <functional>
#include <optional>

#include "oplab/funcalc.hpp"
#include "oplab/operator_core.hpp"
#include "oplab/quadrature.hpp"

namespace oplab {

// Divided-difference kernels on clos C+ x clos C+, all with exact confluent
// diagonals:
//   dd(f)       = Df
//   dd_flat(f)  = Df(z,w) (w+i)
//   res_dd(f)   = (z+i)(w+i) Df(z,w)
//   one         = the identity multiplier
//   custom      = arbitrary analytic expression
class Kernel {
 public:
  static Kernel dd(AnalyticFn f);
  static Kernel dd_flat(AnalyticFn f);
  static Kernel res_dd(AnalyticFn f);
  static Kernel one();
  static Kernel custom(std::function<cplx(cplx, cplx)> phi);

  cplx eval(cplx z, cplx w) const;

 private:
  Kernel() = default;
  enum class Form { dd, dd_flat, res_dd, one, custom } form_ = Form::one;
  std::optional<AnalyticFn> f_;
  std::function<cplx(cplx, cplx)> phi_;
};

inline cplx kernel_eval(const Kernel& ker, cplx z, cplx w) {
  return ker.eval(z, w);
}

// Entrywise Haagerup-collapsed evaluation in the eigenbases of M and L:
// S_M (ker(mu_j, lambda_k) o S_M^{-1} Q S_L) S_L^{-1}.
CMat doi_eigen(const Kernel& ker, const Operator& m, const CMat& q,
               const Operator& l);

// Independent tensor-quadrature evaluation against the Poisson densities of
// strictly dissipative M and L.
CMat doi_quadrature(const Kernel& ker, const Operator& m, const CMat& q,
                    const Operator& l, const GridSpec& grid,
                    Exec exec = Exec::Parallel);

// || f(M) - f(L) - DOI(dd_flat(f), M, C, L) || / max(1, ||f(M) - f(L)||).
double difference_formula_residual(const AnalyticFn& f,
                                   const DissipativePair& pair);

struct DerivativeValue {
  CMat q_t;
  double trace_norm;  // S1 norm of q_t
};

// Q_t = DOI(dd_flat(f), L_t, K(L_t+iI)^{-1}, L_t), the parametric derivative
// of t -> f(L_t).
DerivativeValue derivative_formula(const DissipativePair& pair, double t,
                                   const AnalyticFn& f);

// Central finite difference of t -> f(L_t) computed in extended precision;
// the independent oracle for derivative_formula.
CMat derivative_central_difference(const DissipativePair& pair, double t,
                                   double h, const AnalyticFn& f);

struct TraceIdentity {
  cplx lhs;  // trace DOI(dd_flat(f), L, R, L)
  cplx rhs;  // integral of f'(x)(x+i) trace(rho_L(x) R) dx
};

TraceIdentity doi_trace_identity(const AnalyticFn& f, const Operator& l,
                                 const CMat& r, const GridSpec& grid,
                                 Exec exec = Exec::Parallel);

}  // namespace oplab
