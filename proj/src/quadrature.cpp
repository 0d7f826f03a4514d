#include "oplab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace oplab {

namespace {

GaussRule compute_gauss_legendre(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration from the Chebyshev initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p_deriv = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      p_deriv = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / p_deriv;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[n - 1 - i] = x;
    r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * p_deriv * p_deriv);
  }
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw ArgumentError("gauss_legendre: order must be >= 1");
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

std::vector<double> theta_breakpoints(const GridSpec& spec, double lo,
                                      double hi, bool theta_space) {
  std::vector<double> brk;
  for (int j = 0; j <= spec.base_panels; ++j)
    brk.push_back(lo + (hi - lo) * j / spec.base_panels);
  auto push = [&](double v) {
    if (v > lo && v < hi) brk.push_back(v);
  };
  for (const cplx& c : spec.centers) {
    const double a = c.real();
    const double b = std::max(std::abs(c.imag()), 1e-6);
    for (double k : {0.0, 1.0, 2.0, 4.0, 8.0}) {
      for (double s : {-1.0, 1.0}) {
        const double x = a + s * k * b;
        push(theta_space ? std::atan(x) : x);
        if (k == 0.0) break;
      }
    }
  }
  std::sort(brk.begin(), brk.end());
  brk.erase(std::unique(brk.begin(), brk.end(),
                        [](double u, double v) { return std::abs(u - v) < 1e-13; }),
            brk.end());
  return brk;
}

QuadratureGrid build_grid(const std::vector<double>& brk, int level,
                          int nodes_per_panel, bool tan_substitution) {
  const GaussRule& rule = gauss_legendre(nodes_per_panel);
  const int split = 1 << level;
  QuadratureGrid g;
  g.level = level;
  for (std::size_t p = 0; p + 1 < brk.size(); ++p) {
    for (int s = 0; s < split; ++s) {
      const double a = brk[p] + (brk[p + 1] - brk[p]) * s / split;
      const double b = brk[p] + (brk[p + 1] - brk[p]) * (s + 1) / split;
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (int i = 0; i < nodes_per_panel; ++i) {
        const double t = mid + half * rule.nodes[i];
        double w = half * rule.weights[i];
        if (tan_substitution) {
          const double c = std::cos(t);
          g.nodes.push_back(std::tan(t));
          g.weights.push_back(w / (c * c));
        } else {
          g.nodes.push_back(t);
          g.weights.push_back(w);
        }
      }
    }
  }
  return g;
}

}  // namespace

QuadratureGrid QuadratureGrid::real_line(const GridSpec& spec, int level) {
  return build_grid(theta_breakpoints(spec, -kHalfPi, kHalfPi, true), level,
                    spec.nodes_per_panel, true);
}

QuadratureGrid QuadratureGrid::interval(double a, double b,
                                        const GridSpec& spec, int level) {
  if (!(a < b)) throw ArgumentError("QuadratureGrid::interval: need a < b");
  return build_grid(theta_breakpoints(spec, a, b, false), level,
                    spec.nodes_per_panel, false);
}

namespace {

template <class Value, class Norm, class MakeGrid>
Value adapt(const GridSpec& spec, const std::function<Value(double)>& fn,
            Exec exec, AdaptiveInfo* info, Norm norm, MakeGrid make_grid,
            Value zero) {
  Value prev = zero;
  bool have_prev = false;
  for (int level = 0; level <= spec.max_level; ++level) {
    const QuadratureGrid g = make_grid(level);
    Value cur = sum_weighted(g, fn, exec, zero);
    if (have_prev) {
      const double change = norm(cur, prev);
      if (change <= spec.tol) {
        if (info) *info = {level, g.size(), change};
        return cur;
      }
      if (level == spec.max_level)
        throw QuadratureError(
            "quadrature did not converge: last change " +
            std::to_string(change) + " > tol " + std::to_string(spec.tol) +
            " at level " + std::to_string(level) + " (" +
            std::to_string(g.size()) + " nodes)");
    }
    prev = std::move(cur);
    have_prev = true;
  }
  throw QuadratureError("quadrature: max_level < 1");
}

}  // namespace

CMat integrate_matrix_adaptive(const GridSpec& spec,
                               const std::function<CMat(double)>& fn,
                               Exec exec, AdaptiveInfo* info) {
  const CMat probe = fn(0.0);
  const CMat zero = CMat::Zero(probe.rows(), probe.cols());
  return adapt(
      spec, fn, exec, info,
      [](const CMat& a, const CMat& b) { return (a - b).norm(); },
      [&](int level) { return QuadratureGrid::real_line(spec, level); }, zero);
}

cplx integrate_scalar_adaptive(const GridSpec& spec,
                               const std::function<cplx(double)>& fn,
                               Exec exec, AdaptiveInfo* info) {
  return adapt(
      spec, fn, exec, info,
      [](cplx a, cplx b) { return std::abs(a - b); },
      [&](int level) { return QuadratureGrid::real_line(spec, level); },
      cplx(0.0));
}

CMat integrate_matrix_adaptive_interval(double a, double b,
                                        const GridSpec& spec,
                                        const std::function<CMat(double)>& fn,
                                        Exec exec, AdaptiveInfo* info) {
  const CMat probe = fn(0.5 * (a + b));
  const CMat zero = CMat::Zero(probe.rows(), probe.cols());
  return adapt(
      spec, fn, exec, info,
      [](const CMat& x, const CMat& y) { return (x - y).norm(); },
      [&](int level) { return QuadratureGrid::interval(a, b, spec, level); },
      zero);
}

}  // namespace oplab
