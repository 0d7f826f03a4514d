#pragma once

#include <optional>
#include <vector>

#include "oplab/common.hpp"

namespace oplab {

// Eigendecomposition with right eigenvectors and cond2 of the eigenvector
// matrix. Throws ConditioningError above kEigvecConditionLimit.
struct Spectral {
  CVec values;
  CMat vectors;
  CMat vectors_inv;
  double condition = 0.0;
};

Spectral decompose(const CMat& x);

// Dense complex square matrix with a lazily computed spectral cache.
// Instances are immutable; do not share an instance across threads before its
// cache has been materialized.
class Operator {
 public:
  Operator() = default;
  Operator(CMat m) : m_(std::move(m)) { require_square(m_, "Operator"); }

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMat& mat() const { return m_; }
  const Spectral& spectral() const {
    if (!cache_) cache_ = decompose(m_);
    return *cache_;
  }
  bool has_spectral() const { return cache_.has_value(); }

 private:
  CMat m_;
  mutable std::optional<Spectral> cache_;
};

// Im X = (X - X*)/(2i) as a Hermitian matrix.
CMat imaginary_part(const CMat& x);

// Smallest eigenvalue of Im X.
double min_imag_eigenvalue(const CMat& x);

// Relative dissipativity tolerance used when none is given.
double default_dissipativity_tol(const CMat& x);

bool is_dissipative(const CMat& x, double tol);
inline bool is_dissipative(const CMat& x) {
  return is_dissipative(x, default_dissipativity_tol(x));
}

// T = (L - iI)(L + iI)^{-1}; requires L dissipative.
CMat cayley(const CMat& l);

// L = i(I + T)(I - T)^{-1}; requires 1 to stay away from sigma(T).
CMat inverse_cayley(const CMat& t);

// C = K(L + iI)^{-1}.
CMat relative_operator(const CMat& l, const CMat& k);

// Constructive c for ||Kv|| <= c||v|| + d||Lv||: SVD-split C = T + R with
// ||R|| < d/2, the finite-rank part bounded through (L + iI)-adjoint pairing.
double domination_constants(const CMat& l, const CMat& k, double d);

// Largest observed ||Kv|| - c||v|| - d||Lv|| over seeded random unit vectors
// plus projected-gradient ascent starts; <= 0 means no violation found.
double domination_violation(const CMat& l, const CMat& k, double c, double d,
                            unsigned seed, int n_samples = 10000,
                            int n_ascent_starts = 16);

// kappa with (2 + c/kappa) d < 1; requires d < 1/2.
double maximality_margin(double c, double d);

// p in {1, 2} or p <= 0 meaning the operator norm (p = infinity).
double schatten_norm(const CMat& x, double p);
inline double trace_norm(const CMat& x) { return schatten_norm(x, 1.0); }
inline double operator_norm(const CMat& x) { return schatten_norm(x, 0.0); }

struct DissipativePair {
  Operator L;
  Operator K;
  Operator M;  // L + K
  Operator C;  // K (L + iI)^{-1}
  double c = 0.0;
  double d = 0.0;

  static DissipativePair make(CMat l, CMat k, double d_request = 0.3);
  CMat L_t(double t) const { return L.mat() + t * K.mat(); }
};

// K(L_t + iI)^{-1} via the path identity (L_t + iI) = (I + tC)(L + iI).
CMat path_relative(const DissipativePair& pair, double t);

struct PathFamily {
  DissipativePair pair;
  std::vector<double> t_grid;

  static PathFamily make(DissipativePair pair, std::vector<double> t_grid);
};

}  // namespace oplab
