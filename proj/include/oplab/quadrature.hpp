#pragma once

#include <functional>
#include <vector>

#include "oplab/common.hpp"
#include "oplab/parallel.hpp"

namespace oplab {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

// Composite Gauss-Legendre grid over the real line (x = tan(theta)
// substitution) or a finite interval, with panels refined around the real
// parts of the supplied spectra at widths proportional to their imaginary
// parts. Doubling the level halves every panel.
struct GridSpec {
  std::vector<cplx> centers;
  double tol = 1e-8;
  int nodes_per_panel = 16;
  int base_panels = 16;
  int max_level = 8;
};

struct QuadratureGrid {
  std::vector<double> nodes;    // x values
  std::vector<double> weights;  // substitution jacobian included
  int level = 0;

  static QuadratureGrid real_line(const GridSpec& spec, int level);
  static QuadratureGrid interval(double a, double b, const GridSpec& spec,
                                 int level);
  std::size_t size() const { return nodes.size(); }
};

// Weighted node sum with a deterministic reduction order; the parallel path
// fills a per-node buffer and reduces serially.
template <class Value, class Fn>
Value sum_weighted(const QuadratureGrid& g, Fn&& fn, Exec exec, Value zero) {
  std::vector<Value> buf(g.size(), zero);
  for_each_index(g.size(), exec,
                 [&](std::size_t i) { buf[i] = fn(g.nodes[i]); });
  Value acc = zero;
  for (std::size_t i = 0; i < g.size(); ++i) acc += g.weights[i] * buf[i];
  return acc;
}

struct AdaptiveInfo {
  int level = 0;
  std::size_t node_count = 0;
  double last_change = 0.0;
};

// Refines until successive levels differ by <= spec.tol (Frobenius norm);
// throws QuadratureError with diagnostics if max_level is exhausted.
CMat integrate_matrix_adaptive(const GridSpec& spec,
                               const std::function<CMat(double)>& fn,
                               Exec exec, AdaptiveInfo* info = nullptr);

cplx integrate_scalar_adaptive(const GridSpec& spec,
                               const std::function<cplx(double)>& fn,
                               Exec exec, AdaptiveInfo* info = nullptr);

// Same refinement loop on a finite interval.
CMat integrate_matrix_adaptive_interval(double a, double b,
                                        const GridSpec& spec,
                                        const std::function<CMat(double)>& fn,
                                        Exec exec,
                                        AdaptiveInfo* info = nullptr);

}  // namespace oplab
