#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oplab/generator.hpp"
#include "oplab/quadrature.hpp"
#include "oplab/semispectral.hpp"

using namespace oplab;

TEST_CASE("gauss-legendre integrates degree 2n-1 exactly") {
  const GaussRule& r = gauss_legendre(5);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i)
    acc += r.weights[i] * std::pow(r.nodes[i], 8);
  CHECK(acc == doctest::Approx(2.0 / 9.0).epsilon(1e-14));  // int x^8 on [-1,1]
  double wsum = 0.0;
  for (double w : r.weights) wsum += w;
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("real-line integral of the Poisson kernel") {
  GridSpec spec;
  spec.centers = {kI};
  spec.tol = 1e-10;
  const cplx v = integrate_scalar_adaptive(
      spec, [](double x) { return cplx(1.0 / (1.0 + x * x)); }, Exec::Serial);
  CHECK(std::abs(v - cplx(std::numbers::pi)) < 1e-9);
}

TEST_CASE("interval integral") {
  GridSpec spec;
  spec.tol = 1e-12;
  const CMat v = integrate_matrix_adaptive_interval(
      0.0, 1.0, spec,
      [](double x) { return CMat::Constant(1, 1, cplx(x * x)); },
      Exec::Serial);
  CHECK(std::abs(v(0, 0) - cplx(1.0 / 3.0)) < 1e-12);
}

TEST_CASE("refinement exhaustion raises QuadratureError") {
  GridSpec spec;
  spec.centers = {kI};
  spec.tol = 1e-30;
  spec.max_level = 1;
  CHECK_THROWS_AS(
      integrate_scalar_adaptive(
          spec, [](double x) { return cplx(1.0 / (1.0 + x * x)); },
          Exec::Serial),
      QuadratureError);
}

TEST_CASE("adaptive info reports the converged level") {
  GridSpec spec;
  spec.centers = {kI};
  spec.tol = 1e-8;
  AdaptiveInfo info;
  integrate_scalar_adaptive(
      spec, [](double x) { return cplx(1.0 / (1.0 + x * x)); }, Exec::Serial,
      &info);
  CHECK(info.node_count > 0);
  CHECK(info.last_change <= 1e-8);
}

TEST_CASE("serial and parallel reductions are bitwise identical") {
  const Operator l = random_dissipative(9, 4, 0.5);
  const GridSpec spec = density_grid_spec(l, 1e-8);
  const SemiSpectralDensity ssd(l, spec);
  const CMat serial = ssd.mass(Exec::Serial);
  const CMat parallel = ssd.mass(Exec::Parallel);
  CHECK((serial - parallel).norm() == 0.0);

  GridSpec sspec;
  sspec.centers = {kI};
  sspec.tol = 1e-9;
  const auto fn = [](double x) {
    return cplx(1.0, x) / ((1.0 + x * x) * (4.0 + x * x));
  };
  const cplx a = integrate_scalar_adaptive(sspec, fn, Exec::Serial);
  const cplx b = integrate_scalar_adaptive(sspec, fn, Exec::Parallel);
  CHECK(a.real() == b.real());
  CHECK(a.imag() == b.imag());
}

TEST_CASE("sum_weighted reduction order is fixed") {
  QuadratureGrid g;
  GridSpec spec;
  spec.centers = {kI};
  g = QuadratureGrid::real_line(spec, 0);
  const auto fn = [](double x) { return cplx(std::sin(x) + 1e-16 * x); };
  const cplx a = sum_weighted(g, fn, Exec::Serial, cplx(0.0));
  const cplx b = sum_weighted(g, fn, Exec::Parallel, cplx(0.0));
  CHECK(a == b);
}

TEST_CASE("doubling the level doubles the panels") {
  GridSpec spec;
  spec.centers = {kI};
  const QuadratureGrid g0 = QuadratureGrid::real_line(spec, 0);
  const QuadratureGrid g1 = QuadratureGrid::real_line(spec, 1);
  CHECK(g1.size() == 2 * g0.size());
}
