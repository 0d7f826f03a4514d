#include "oplab/generator.hpp"

#include <random>

#include <Eigen/QR>

namespace oplab {

namespace {

CMat gaussian_matrix(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMat x(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) x(r, c) = cplx(gauss(rng), gauss(rng));
  return x;
}

CMat haar_unitary(std::mt19937_64& rng, int dim) {
  const CMat g = gaussian_matrix(rng, dim);
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const cplx d = r(j, j);
    q.col(j) *= (std::abs(d) > 0 ? d / std::abs(d) : cplx(1.0));
  }
  return q;
}

CMat dissipative_matrix(std::mt19937_64& rng, int dim, double gap) {
  const CMat a = gaussian_matrix(rng, dim);
  const CMat b = gaussian_matrix(rng, dim);
  const CMat herm = 0.5 * (a + a.adjoint());
  // b b*/dim + gap I is >= gap I with generic eigenvectors.
  const CMat pos = b * b.adjoint() / double(dim) +
                   gap * CMat::Identity(dim, dim);
  return herm + kI * pos;
}

}  // namespace

Operator random_dissipative(unsigned seed, int dim, double gap) {
  if (dim < 1) throw GenerationError("random_dissipative: dim must be >= 1");
  if (!(gap >= 0.0)) throw GenerationError("random_dissipative: gap < 0");
  std::mt19937_64 rng(seed);
  return Operator(dissipative_matrix(rng, dim, gap));
}

DissipativePair gen_pair(unsigned seed, int dim, double gap, PairKind kind,
                         double trace_target) {
  if (dim < 1) throw GenerationError("gen_pair: dim must be >= 1");
  if (!(gap > 0.0)) throw GenerationError("gen_pair: gap must be > 0");
  std::mt19937_64 rng(seed);

  switch (kind) {
    case PairKind::generic: {
      const CMat l = dissipative_matrix(rng, dim, gap);
      CMat k = gaussian_matrix(rng, dim);
      const double im_k = operator_norm(imaginary_part(k));
      if (im_k > 0.0) k *= 0.5 * gap / im_k;  // Im L_t >= gap/2 on [0,1]
      return DissipativePair::make(l, k);
    }
    case PairKind::trace_class_structured: {
      const CMat l = dissipative_matrix(rng, dim, gap);
      const CMat shifted = l + kI * CMat::Identity(dim, dim);
      for (int attempt = 0; attempt < 100; ++attempt) {
        const CMat c0 = (trace_target / dim) * haar_unitary(rng, dim);
        const CMat k = c0 * shifted;
        if (is_dissipative(CMat(l + k))) return DissipativePair::make(l, k);
      }
      throw GenerationError(
          "gen_pair: trace_class_structured rejection sampling exhausted; "
          "lower the trace target or raise the gap");
    }
    case PairKind::selfadjoint_base: {
      const CMat g = gaussian_matrix(rng, dim);
      const CMat l = 0.5 * (g + g.adjoint());
      const CMat k = dissipative_matrix(rng, dim, gap);
      return DissipativePair::make(l, k);
    }
  }
  throw GenerationError("gen_pair: unknown kind");
}

}  // namespace oplab
