#pragma once

#include <string>
#include <vector>

#include "oplab/doi.hpp"
#include "oplab/operator_core.hpp"

namespace oplab {

// Entries ker(x_j, y_k) on a finite real grid.
CMat grid_kernel(const Kernel& ker, const std::vector<double>& xs,
                 const std::vector<double>& ys);

struct SchurUpper {
  double upper = 0.0;
  CMat a;  // witness factorization M = a * b
  CMat b;
  bool converged = true;
};

// max-row-norm(A) * max-col-norm(B) minimized over factorizations M = AB by
// alternating rebalancing from randomized SVD splits.
SchurUpper schur_upper(const CMat& m, int iters = 500, int restarts = 32,
                       unsigned seed = 1, Exec exec = Exec::Parallel);

struct SchurLower {
  double lower = 0.0;
  CMat x;  // witness contraction, ||x|| <= 1
};

// sup ||M o X|| over contractions, from random starts plus local ascent.
SchurLower schur_lower(const CMat& m, int trials = 64, unsigned seed = 1,
                       Exec exec = Exec::Parallel);

struct MultiplierBracket {
  std::string kernel_id;
  std::vector<double> xs;
  std::vector<double> ys;
  double lower = 0.0;
  double upper = 0.0;
  CMat witness_a;
  CMat witness_b;
  CMat witness_x;
  bool upper_converged = true;
};

MultiplierBracket bracket_kernel(const Kernel& ker, std::string kernel_id,
                                 std::vector<double> xs, std::vector<double> ys,
                                 unsigned seed = 1, Exec exec = Exec::Parallel);

// Symmetric tan-spaced grid of n points on the real line.
std::vector<double> probe_grid(int n, double span = 40.0);

// Brackets of the dd_flat(f) multiplier norm over nested grids; a bounded
// trend is evidence for the relative-Lipschitz class, never a proof.
std::vector<MultiplierBracket> rola_probe(const AnalyticFn& f,
                                          const std::vector<int>& grid_sizes,
                                          unsigned seed = 1,
                                          Exec exec = Exec::Parallel);

struct ReslipProbe {
  std::vector<MultiplierBracket> brackets;  // res_dd kernel over nested grids
  double max_transplant_gap = 0.0;  // worst | ||f(M)-f(L)|| - ||phi(V)-phi(U)|| |
  double ratio_sup = 0.0;  // sup ||f(M)-f(L)|| / ||(M+iI)^{-1}-(L+iI)^{-1}||
};

ReslipProbe reslip_probe(const AnalyticFn& f, const std::vector<int>& grid_sizes,
                         int n_pairs = 20, unsigned seed = 1,
                         Exec exec = Exec::Parallel);

// Exact multiplier norm by dense search over contractions; sizes <= 3 only.
// Used to validate the PSD max-diagonal oracle before tests rely on it.
double schur_norm_bruteforce(const CMat& m, unsigned seed = 1,
                             int trials = 20000);

}  // namespace oplab
