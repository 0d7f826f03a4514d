#pragma once

#include <utility>
#include <vector>

#include "oplab/funcalc.hpp"
#include "oplab/operator_core.hpp"
#include "oplab/quadrature.hpp"

namespace oplab {

// The quadrature path requires all eigenvalues at least this far above R.
inline constexpr double kStrictSpectralGap = 1e-3;

// Throws SingularityError if some eigenvalue of L sits within eps of R
// (the semi-spectral measure then carries a singular part).
void require_strict_dissipativity(const Operator& l,
                                  double eps = kStrictSpectralGap);

// Density of the semi-spectral measure of a strictly dissipative matrix:
// rho_L(x) = (1/pi) (L* - xI)^{-1} (Im L) (L - xI)^{-1}.
CMat poisson_density(const CMat& l, double x);

// Grid spec whose refinement centers are the eigenvalues of L (plus extras).
GridSpec density_grid_spec(const Operator& l, double tol = 1e-8,
                           const std::vector<cplx>& extra_centers = {});

class SemiSpectralDensity {
 public:
  SemiSpectralDensity(Operator l, GridSpec grid);
  CMat density(double x) const { return poisson_density(l_.mat(), x); }
  // integral of rho over R; equals I up to grid tolerance.
  CMat mass(Exec exec = Exec::Parallel, AdaptiveInfo* info = nullptr) const;
  CMat interval_mass(double a, double b, Exec exec = Exec::Parallel) const;
  const Operator& op() const { return l_; }
  const GridSpec& grid() const { return grid_; }

 private:
  Operator l_;
  GridSpec grid_;
};

// integral of f(x) rho_L(x) dx; matches apply(f, L) within the grid tolerance.
CMat integrate_functional(const AnalyticFn& f, const Operator& l,
                          const GridSpec& grid, Exec exec = Exec::Parallel,
                          AdaptiveInfo* info = nullptr);

// Finite-depth unitary dilation of a contraction via defect operators:
// U acts on (N+2) copies of H and P U^n |H = T^n for 0 <= n <= N+1.
struct FiniteDilation {
  CMat U;
  int N = 0;
  int dim = 0;  // H occupies the leading dim coordinates

  CMat compress_power(int n) const;
};

FiniteDilation finite_dilation(const CMat& t, int n_depth);

struct ResolventCheck {
  double residual = 0.0;
  double bound = 0.0;
};

// Compares (L - lambda I)^{-1}, Im lambda < 0, against the compression of the
// resolvent of the dilation's inverse Cayley transform, evaluated through the
// disk-side series so that eigenvalue 1 of U needs no deflation. The bound is
// the geometric tail 4 |beta|^{N+1} / (|i - lambda| (1 - |beta|)) with
// beta = (lambda + i)/(lambda - i), |beta| < 1 below the real axis.
ResolventCheck resolvent_dilation_check(const Operator& l, int n_depth,
                                        cplx lambda);

struct CrossValidation {
  double deviation = 0.0;  // max over intervals
  double bound = 0.0;      // bound for the interval attaining the max
  bool all_within_bound = true;
};

// Max over intervals of || integral_a^b rho_L dx - P E_A((a,b)) |H || where
// E_A is the eigenprojection sum of the finite dilation's self-adjoint part;
// the bound combines the resolvent tail with Poisson-smoothing endpoint terms.
CrossValidation cross_validate(
    const Operator& l, const GridSpec& grid, int n_depth,
    const std::vector<std::pair<double, double>>& intervals,
    Exec exec = Exec::Parallel);

}  // namespace oplab
