#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "oplab/generator.hpp"
#include "oplab/semispectral.hpp"

using namespace oplab;

TEST_CASE("scalar density: rho_i(0) = 1/pi") {
  const CMat l = kI * CMat::Identity(1, 1);
  const CMat rho = poisson_density(l, 0.0);
  CHECK(std::abs(rho(0, 0) - cplx(1.0 / std::numbers::pi)) < 1e-15);
}

TEST_CASE("strict dissipativity gate") {
  CHECK_THROWS_AS(require_strict_dissipativity(Operator(CMat::Identity(2, 2))),
                  SingularityError);
  CHECK_NOTHROW(require_strict_dissipativity(random_dissipative(1, 3, 0.5)));
}

TEST_CASE("total mass is the identity") {
  for (unsigned seed : {1u, 5u}) {
    const Operator l = random_dissipative(seed, 4, 0.4);
    const SemiSpectralDensity ssd(l, density_grid_spec(l, 1e-9));
    const CMat m = ssd.mass(Exec::Serial);
    CHECK((m - CMat::Identity(4, 4)).norm() < 1e-7);
  }
}

TEST_CASE("resolvent identity: integral of rho/(x - lambda) below the axis") {
  const Operator l = random_dissipative(3, 3, 0.5);
  const cplx lambda(0.4, -0.8);
  GridSpec spec = density_grid_spec(l, 1e-10, {lambda});
  const CMat lhs = integrate_matrix_adaptive(
      spec,
      [&](double x) { return CMat(poisson_density(l.mat(), x) / (x - lambda)); },
      Exec::Serial);
  const CMat rhs = (l.mat() - lambda * CMat::Identity(3, 3))
                       .partialPivLu()
                       .inverse();
  CHECK((lhs - rhs).norm() < 1e-8 * rhs.norm());
}

TEST_CASE("integrate_functional matches apply") {
  const Operator l = random_dissipative(7, 3, 0.5);
  const GridSpec spec = density_grid_spec(l, 1e-9);
  for (const BatteryFn& bf : default_battery()) {
    const CMat a = integrate_functional(bf.fn, l, spec, Exec::Serial);
    const CMat b = apply(bf.fn, l);
    CHECK((a - b).norm() < 1e-7 * (1.0 + b.norm()));
  }
}

TEST_CASE("interval masses are monotone pieces of the total") {
  const Operator l = random_dissipative(2, 3, 0.5);
  const SemiSpectralDensity ssd(l, density_grid_spec(l, 1e-9));
  const CMat part = ssd.interval_mass(-2.0, 2.0, Exec::Serial);
  const CMat herm = 0.5 * (part + part.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(herm);
  CHECK(es.eigenvalues().minCoeff() > -1e-10);  // positive operator
  CHECK(operator_norm(part) <= 1.0 + 1e-8);     // dominated by the mass
}

TEST_CASE("finite dilation is unitary with exact power compression") {
  for (unsigned seed : {4u, 9u}) {
    const Operator l = random_dissipative(seed, 3, 0.4);
    const CMat t = cayley(l.mat());
    const int depth = 6;
    const FiniteDilation fd = finite_dilation(t, depth);
    CHECK((fd.U * fd.U.adjoint() - CMat::Identity(fd.U.rows(), fd.U.cols()))
              .norm() < 1e-12);
    CMat tn = CMat::Identity(3, 3);
    for (int n = 0; n <= depth + 1; ++n) {
      CHECK((tn - fd.compress_power(n)).norm() < 1e-12);
      tn = t * tn;
    }
  }
}

TEST_CASE("resolvent through the dilation respects the tail bound") {
  const Operator l = random_dissipative(6, 3, 0.5);
  for (cplx lambda : {cplx(0.3, -0.7), cplx(-1.0, -0.5), cplx(0.0, -1.0)}) {
    const ResolventCheck rc = resolvent_dilation_check(l, 48, lambda);
    CHECK(rc.residual <= rc.bound + 1e-12);
  }
}

TEST_CASE("cross validation against the dilation spectral measure") {
  const Operator l = random_dissipative(8, 2, 0.6);
  const GridSpec spec = density_grid_spec(l, 1e-8);
  const CrossValidation cv =
      cross_validate(l, spec, 32, {{-1.5, 1.5}}, Exec::Serial);
  CHECK(cv.all_within_bound);
  CHECK(cv.deviation <= cv.bound);
}
