#include "oplab/shift_trace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oplab/doi.hpp"
#include "oplab/semispectral.hpp"

namespace oplab {

cplx nu_t_density(const DissipativePair& pair, double t, double s) {
  const Operator lt(pair.L_t(t));
  require_strict_dissipativity(lt);
  return (poisson_density(lt.mat(), s) * path_relative(pair, t)).trace();
}

XiEvaluator::XiEvaluator(const DissipativePair& pair, int t_nodes) {
  if (t_nodes < 1) throw ArgumentError("XiEvaluator: t_nodes must be >= 1");
  const GaussRule& rule = gauss_legendre(t_nodes);
  for (int j = 0; j < t_nodes; ++j) {
    const double t = 0.5 * (rule.nodes[j] + 1.0);  // map [-1,1] -> [0,1]
    const Operator lt(pair.L_t(t));
    require_strict_dissipativity(lt);
    const Spectral& sp = lt.spectral();
    for (int k = 0; k < lt.dim(); ++k)
      s_spec_.centers.push_back(sp.values(k));
    const CMat rel = path_relative(pair, t);
    const CMat a = sp.vectors.adjoint() * imaginary_part(lt.mat()) * sp.vectors;
    const CMat b = sp.vectors_inv * rel * sp.vectors_inv.adjoint();
    eigs_.push_back(sp.values);
    coef_.push_back((a.cwiseProduct(b.transpose())) / std::numbers::pi);
    weights_.push_back(0.5 * rule.weights[j]);
  }
}

cplx XiEvaluator::operator()(double s) const {
  cplx acc = 0.0;
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    const CVec& lam = eigs_[j];
    const CMat& coef = coef_[j];
    const int n = static_cast<int>(lam.size());
    cplx node = 0.0;
    for (int p = 0; p < n; ++p) {
      const cplx dp = std::conj(lam(p)) - s;
      for (int q = 0; q < n; ++q) node += coef(p, q) / (dp * (lam(q) - s));
    }
    acc += weights_[j] * node;
  }
  return (s + kI) * acc;
}

SpectralShiftResult xi_from_nu(const DissipativePair& pair,
                               const std::vector<double>& s_grid, int t_nodes,
                               Exec exec,
                               const std::vector<BatteryFn>& battery) {
  const XiEvaluator eval(pair, t_nodes);
  SpectralShiftResult ssr;
  ssr.s_grid = s_grid;
  ssr.t_nodes = t_nodes;
  ssr.xi.resize(s_grid.size());
  for_each_index(s_grid.size(), exec,
                 [&](std::size_t i) { ssr.xi[i] = eval(s_grid[i]); });
  GridSpec wspec = eval.s_spec();
  wspec.tol = 1e-8;
  ssr.weight_integral =
      integrate_scalar_adaptive(
          wspec,
          [&](double s) { return cplx(std::abs(eval(s)) / (1.0 + std::abs(s))); },
          exec, nullptr)
          .real();
  for (const BatteryFn& bf : battery)
    ssr.residuals[bf.id] = trace_formula_residual(pair, bf.fn, ssr, exec);
  return ssr;
}

cplx scalar_xi_oracle(cplx lambda, cplx mu, double s) {
  if (!(lambda.imag() > 0.0) || !(mu.imag() > 0.0))
    throw ArgumentError("scalar_xi_oracle: lambda, mu must lie in C+");
  return cplx(
      (std::arg(lambda - s) - std::arg(mu - s)) / std::numbers::pi, 0.0);
}

double trace_formula_residual(const DissipativePair& pair, const AnalyticFn& f,
                              const SpectralShiftResult& ssr, Exec exec) {
  return trace_formula_residual(pair, f, XiEvaluator(pair, ssr.t_nodes), exec);
}

double trace_formula_residual(const DissipativePair& pair, const AnalyticFn& f,
                              const XiEvaluator& eval, Exec exec) {
  const cplx lhs = (apply(f, pair.M) - apply(f, pair.L)).trace();
  GridSpec spec = eval.s_spec();
  spec.tol = 1e-9;
  const cplx rhs = integrate_scalar_adaptive(
      spec, [&](double s) { return f.deriv(s) * eval(s); }, exec, nullptr);
  return std::abs(lhs - rhs);
}

ResolventDifference resolvent_difference_check(const DissipativePair& pair) {
  const int n = pair.L.dim();
  const CMat id = CMat::Identity(n, n);
  const CMat rm = (pair.M.mat() + kI * id).partialPivLu().inverse();
  const CMat rl = (pair.L.mat() + kI * id).partialPivLu().inverse();
  ResolventDifference rd;
  rd.norm = trace_norm(rm - rl);
  rd.bound = operator_norm(rm) * trace_norm(pair.C.mat());
  if (rd.norm > rd.bound + 1e-10)
    throw ConditioningError(
        "resolvent_difference_check: S1 norm exceeded its bound");
  return rd;
}

cplx derivative_trace_route(const DissipativePair& pair, const AnalyticFn& f,
                            int t_nodes, Exec exec) {
  const GaussRule& rule = gauss_legendre(t_nodes);
  std::vector<cplx> buf(t_nodes, 0.0);
  for_each_index(static_cast<std::size_t>(t_nodes), exec, [&](std::size_t j) {
    const double t = 0.5 * (rule.nodes[j] + 1.0);
    buf[j] = derivative_formula(pair, t, f).q_t.trace();
  });
  cplx acc = 0.0;
  for (int j = 0; j < t_nodes; ++j) acc += 0.5 * rule.weights[j] * buf[j];
  return acc;
}

}  // namespace oplab
