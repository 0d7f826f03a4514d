#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "oplab/generator.hpp"
#include "oplab/shift_trace.hpp"

using namespace oplab;

namespace {
const AnalyticFn res_i = AnalyticFn::pole(cplx(0.0, -1.0));

DissipativePair scalar_pair(cplx l0, cplx k0) {
  CMat l(1, 1), k(1, 1);
  l(0, 0) = l0;
  k(0, 0) = k0;
  return DissipativePair::make(l, k);
}
}  // namespace

TEST_CASE("nu_t density frozen at a scalar point") {
  // L = i, K = 1: rho_L(0) = 1/pi and K(L+iI)^{-1} = -i/2
  const DissipativePair pair = scalar_pair(kI, 1.0);
  const cplx v = nu_t_density(pair, 0.0, 0.0);
  CHECK(std::abs(v - cplx(0.0, -0.5 / std::numbers::pi)) < 1e-15);
}

TEST_CASE("scalar oracle domain and antisymmetry") {
  CHECK_THROWS_AS(scalar_xi_oracle(cplx(1.0, 0.0), kI, 0.0), ArgumentError);
  const cplx a = scalar_xi_oracle(kI, cplx(1.0, 1.0), 0.3);
  const cplx b = scalar_xi_oracle(cplx(1.0, 1.0), kI, 0.3);
  CHECK(std::abs(a + b) < 1e-15);
  CHECK(a.imag() == 0.0);
}

TEST_CASE("scalar oracle passes its quadrature validation") {
  const cplx lambda = kI;
  const cplx mu(1.0, 1.0);
  GridSpec spec;
  spec.centers = {lambda, mu};
  spec.tol = 1e-10;
  for (const BatteryFn& bf : default_battery()) {
    const cplx rhs = integrate_scalar_adaptive(
        spec,
        [&](double s) { return bf.fn.deriv(s) * scalar_xi_oracle(lambda, mu, s); },
        Exec::Serial);
    const cplx lhs = bf.fn.eval(mu) - bf.fn.eval(lambda);
    CHECK(std::abs(lhs - rhs) < 1e-8);
  }
}

TEST_CASE("scalar trace formula: L = i, M = 2i gives trace i/6") {
  const DissipativePair pair = scalar_pair(kI, kI);
  const cplx lhs = res_i.eval(cplx(0.0, 2.0)) - res_i.eval(kI);
  CHECK(std::abs(lhs - cplx(0.0, 1.0 / 6.0)) < 1e-15);
  const XiEvaluator eval(pair, 32);
  CHECK(trace_formula_residual(pair, res_i, eval, Exec::Serial) <= 1e-9);
}

TEST_CASE("trace formula residuals over the battery") {
  const DissipativePair pair = gen_pair(3, 3, 0.5, PairKind::generic);
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(-10.0 + 0.5 * i);
  const SpectralShiftResult ssr =
      xi_from_nu(pair, grid, 32, Exec::Serial, default_battery());
  CHECK(ssr.residuals.size() == default_battery().size());
  for (const auto& [id, r] : ssr.residuals) CHECK(r <= 1e-6);
  CHECK(std::isfinite(ssr.weight_integral));
  CHECK(ssr.weight_integral > 0.0);
}

TEST_CASE("xi samples: serial equals parallel bitwise") {
  const DissipativePair pair = gen_pair(4, 2, 0.5, PairKind::generic);
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(-5.0 + 0.5 * i);
  const SpectralShiftResult a = xi_from_nu(pair, grid, 16, Exec::Serial);
  const SpectralShiftResult b = xi_from_nu(pair, grid, 16, Exec::Parallel);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(a.xi[i] == b.xi[i]);
  CHECK(a.weight_integral == b.weight_integral);
}

TEST_CASE("weight integral is stable under t-rule doubling") {
  const DissipativePair pair = gen_pair(6, 3, 0.5, PairKind::generic);
  std::vector<double> grid{0.0};
  const double w32 = xi_from_nu(pair, grid, 32, Exec::Serial).weight_integral;
  const double w64 = xi_from_nu(pair, grid, 64, Exec::Serial).weight_integral;
  CHECK(std::abs(w64 - w32) <= 1e-3 * std::abs(w32));
}

TEST_CASE("scalar resolvent difference attains its bound") {
  // L = i, M = 2i: both sides equal 1/6
  const DissipativePair pair = scalar_pair(kI, kI);
  const ResolventDifference rd = resolvent_difference_check(pair);
  CHECK(rd.norm == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(rd.bound == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("resolvent difference bound holds for generated pairs") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const DissipativePair pair =
        gen_pair(seed, 4, 0.5, PairKind::trace_class_structured);
    const ResolventDifference rd = resolvent_difference_check(pair);
    CHECK(rd.norm <= rd.bound + 1e-10);
  }
}

TEST_CASE("xi-free route matches the direct trace") {
  const DissipativePair pair = gen_pair(8, 3, 0.5, PairKind::generic);
  for (const BatteryFn& bf : default_battery()) {
    const cplx direct =
        (apply(bf.fn, pair.M) - apply(bf.fn, pair.L)).trace();
    const cplx route = derivative_trace_route(pair, bf.fn, 32, Exec::Serial);
    CHECK(std::abs(direct - route) <= 1e-7);
  }
}

TEST_CASE("xi evaluator rejects degenerate rules and paths") {
  const DissipativePair pair = gen_pair(8, 2, 0.5, PairKind::generic);
  CHECK_THROWS_AS(XiEvaluator(pair, 0), ArgumentError);
  // a path pinned to the real axis must be refused
  const DissipativePair sa = scalar_pair(1.0, 1.0);
  CHECK_THROWS_AS(XiEvaluator(sa, 8), SingularityError);
}
