#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oplab/generator.hpp"
#include "oplab/operator_core.hpp"

using namespace oplab;

TEST_CASE("imaginary part") {
  CMat h(2, 2);
  h << 1.0, cplx(0.0, 2.0), cplx(0.0, -2.0), 3.0;  // Hermitian
  CHECK(imaginary_part(h).norm() == doctest::Approx(0.0).epsilon(1e-14));
  const CMat il = kI * CMat::Identity(3, 3);
  CHECK((imaginary_part(il) - CMat::Identity(3, 3)).norm() < 1e-15);
}

TEST_CASE("dissipativity predicate") {
  const Operator l = random_dissipative(3, 4, 0.5);
  CHECK(is_dissipative(l.mat()));
  CHECK(min_imag_eigenvalue(l.mat()) >= 0.5 - 1e-12);
  CHECK_FALSE(is_dissipative(-kI * CMat::Identity(2, 2)));
}

TEST_CASE("cayley transform: contraction and roundtrip") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const Operator l = random_dissipative(seed, 5, 0.3);
    const CMat t = cayley(l.mat());
    CHECK(operator_norm(t) <= 1.0 + 1e-12);
    CHECK((inverse_cayley(t) - l.mat()).norm() < 1e-9 * l.mat().norm());
  }
}

TEST_CASE("cayley rejects non-dissipative input") {
  CHECK_THROWS_AS(cayley(-2.0 * kI * CMat::Identity(2, 2)), ArgumentError);
}

TEST_CASE("decompose rejects defective matrices") {
  CMat jordan(2, 2);
  jordan << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(decompose(jordan), ConditioningError);
}

TEST_CASE("operator requires a square matrix") {
  CHECK_THROWS_AS(Operator(CMat::Zero(2, 3)), DimensionError);
}

TEST_CASE("schatten norms on a diagonal matrix") {
  CMat d = CMat::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -2.0;
  CHECK(trace_norm(d) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(operator_norm(d) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(schatten_norm(d, 2.0) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
}

TEST_CASE("pair assembly: M = L + K and C = K(L+iI)^{-1}") {
  const DissipativePair pair = gen_pair(7, 4, 0.5, PairKind::generic);
  CHECK((pair.M.mat() - pair.L.mat() - pair.K.mat()).norm() < 1e-14);
  const CMat c_direct =
      pair.K.mat() *
      (pair.L.mat() + kI * CMat::Identity(4, 4)).partialPivLu().inverse();
  CHECK((pair.C.mat() - c_direct).norm() < 1e-12);
}

TEST_CASE("path identity for the relative operator") {
  const DissipativePair pair = gen_pair(11, 3, 0.5, PairKind::generic);
  for (double t : {0.0, 0.25, 0.8, 1.0}) {
    const CMat direct =
        pair.K.mat() *
        (pair.L_t(t) + kI * CMat::Identity(3, 3)).partialPivLu().inverse();
    CHECK((path_relative(pair, t) - direct).norm() < 1e-11);
  }
}

TEST_CASE("resolvent lower bound ||(L+iI)v||^2 >= ||Lv||^2 + ||v||^2") {
  const Operator l = random_dissipative(5, 6, 0.2);
  std::mt19937 rng(42);
  std::normal_distribution<double> nd;
  for (int s = 0; s < 200; ++s) {
    CVec v(6);
    for (int k = 0; k < 6; ++k) v(k) = cplx(nd(rng), nd(rng));
    const double lhs = (l.mat() * v + kI * v).squaredNorm();
    const double rhs = (l.mat() * v).squaredNorm() + v.squaredNorm();
    CHECK(lhs >= rhs - 1e-10 * rhs);
  }
}

TEST_CASE("domination constants admit no sampled violation") {
  const DissipativePair pair = gen_pair(2, 4, 0.5, PairKind::generic);
  const double viol = domination_violation(pair.L.mat(), pair.K.mat(), pair.c,
                                           pair.d, 99, 2000, 8);
  CHECK(viol <= 1e-10);
}

TEST_CASE("maximality margin") {
  CHECK(maximality_margin(1.0, 0.25) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(maximality_margin(5.0, 0.4) == doctest::Approx(40.0).epsilon(1e-12));
  CHECK_THROWS_AS(maximality_margin(1.0, 0.5), ArgumentError);
}

TEST_CASE("maximality contraction ||K(L + i kappa I)^{-1}|| < 1") {
  const DissipativePair pair = gen_pair(13, 4, 0.5, PairKind::generic);
  const double kappa = maximality_margin(pair.c, pair.d);
  const CMat res = (pair.L.mat() + kI * kappa * CMat::Identity(4, 4))
                       .partialPivLu()
                       .inverse();
  CHECK(operator_norm(res) <= 1.0 / kappa + 1e-12);
  CHECK(operator_norm(CMat(pair.K.mat() * res)) < 1.0);
}

TEST_CASE("trace_class_structured pair hits its S1 target") {
  const DissipativePair pair =
      gen_pair(4, 5, 0.5, PairKind::trace_class_structured, 0.75);
  CHECK(trace_norm(pair.C.mat()) == doctest::Approx(0.75).epsilon(1e-10));
}

TEST_CASE("selfadjoint_base pair has Hermitian L") {
  const DissipativePair pair = gen_pair(6, 4, 0.5, PairKind::selfadjoint_base);
  CHECK(imaginary_part(pair.L.mat()).norm() < 1e-12);
  CHECK(is_dissipative(pair.M.mat()));
}

TEST_CASE("generation is deterministic in the seed") {
  const DissipativePair a = gen_pair(21, 4, 0.5, PairKind::generic);
  const DissipativePair b = gen_pair(21, 4, 0.5, PairKind::generic);
  CHECK((a.L.mat() - b.L.mat()).norm() == 0.0);
  CHECK((a.K.mat() - b.K.mat()).norm() == 0.0);
}
