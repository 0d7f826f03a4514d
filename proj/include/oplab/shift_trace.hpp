#pragma once

#include <map>
#include <string>
#include <vector>

#include "oplab/funcalc.hpp"
#include "oplab/operator_core.hpp"
#include "oplab/quadrature.hpp"

namespace oplab {

// Spectral-shift samples for one dissipative pair. xi is complex-valued: the
// underlying measure nu is complex and no realness is claimed.
struct SpectralShiftResult {
  std::vector<double> s_grid;
  std::vector<cplx> xi;
  double weight_integral = 0.0;  // integral of |xi(s)|/(1+|s|)
  std::map<std::string, double> residuals;  // function id -> trace residual
  int t_nodes = 32;
};

// trace(rho_{L_t}(s) K(L_t+iI)^{-1}); the density of nu_t at s.
cplx nu_t_density(const DissipativePair& pair, double t, double s);

// Fixed Gauss-Legendre discretization of the path integral
// xi(s) = (s+i) integral_0^1 nu_t(s) dt; reusable as a function of s.
class XiEvaluator {
 public:
  XiEvaluator(const DissipativePair& pair, int t_nodes = 32);
  cplx operator()(double s) const;
  const GridSpec& s_spec() const { return s_spec_; }
  int t_nodes() const { return static_cast<int>(weights_.size()); }

 private:
  // Per rule node: trace(rho_{L_t}(s) K(L_t+iI)^{-1}) expanded in the
  // eigenbasis S of L_t as sum_{pq} coef(p,q) / ((conj(l_p)-s)(l_q-s)) with
  // coef = (S* Im(L_t) S) o (S^{-1} rel S^{-*})^T / pi; O(dim^2) per s.
  std::vector<CVec> eigs_;
  std::vector<CMat> coef_;
  std::vector<double> weights_;
  GridSpec s_spec_;  // refined around the path spectra
};

SpectralShiftResult xi_from_nu(const DissipativePair& pair,
                               const std::vector<double>& s_grid,
                               int t_nodes = 32, Exec exec = Exec::Parallel,
                               const std::vector<BatteryFn>& battery = {});

// Phase of the 1x1 perturbation determinant, the independent scalar oracle:
// xi(s) = (arg(lambda - s) - arg(mu - s)) / pi. Validated against the trace
// formula by quadrature before use.
cplx scalar_xi_oracle(cplx lambda, cplx mu, double s);

// |trace(f(M) - f(L)) - integral of f'(s) xi(s) ds|.
double trace_formula_residual(const DissipativePair& pair, const AnalyticFn& f,
                              const SpectralShiftResult& ssr,
                              Exec exec = Exec::Parallel);

// Same residual against a prebuilt evaluator (reused across battery members).
double trace_formula_residual(const DissipativePair& pair, const AnalyticFn& f,
                              const XiEvaluator& eval,
                              Exec exec = Exec::Parallel);

struct ResolventDifference {
  double norm = 0.0;   // S1 norm of (M+iI)^{-1} - (L+iI)^{-1}
  double bound = 0.0;  // ||(M+iI)^{-1}|| * ||C||_{S1}
};

// Checks the second-resolvent trace-class bound; throws if norm exceeds
// bound + 1e-10.
ResolventDifference resolvent_difference_check(const DissipativePair& pair);

// integral_0^1 trace Q_t dt, the xi-free route to trace(f(M) - f(L)).
cplx derivative_trace_route(const DissipativePair& pair, const AnalyticFn& f,
                            int t_nodes = 32, Exec exec = Exec::Parallel);

}  // namespace oplab
