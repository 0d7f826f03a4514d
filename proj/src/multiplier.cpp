#include "oplab/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "oplab/generator.hpp"

namespace oplab {

CMat grid_kernel(const Kernel& ker, const std::vector<double>& xs,
                 const std::vector<double>& ys) {
  CMat m(xs.size(), ys.size());
  for (std::size_t j = 0; j < xs.size(); ++j)
    for (std::size_t k = 0; k < ys.size(); ++k)
      m(j, k) = ker.eval(cplx(xs[j], 0.0), cplx(ys[k], 0.0));
  return m;
}

namespace {

double max_row_norm(const CMat& a) {
  double m = 0.0;
  for (int r = 0; r < a.rows(); ++r) m = std::max(m, a.row(r).norm());
  return m;
}

double max_col_norm(const CMat& b) {
  double m = 0.0;
  for (int c = 0; c < b.cols(); ++c) m = std::max(m, b.col(c).norm());
  return m;
}

CMat haar_unitary(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMat g(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) g(r, c) = cplx(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const cplx d = r(j, j);
    q.col(j) *= (std::abs(d) > 0 ? d / std::abs(d) : cplx(1.0));
  }
  return q;
}

struct UpperTry {
  double value = std::numeric_limits<double>::infinity();
  CMat a, b;
  bool converged = false;
};

// One local search from A0 G^{-1}, G B0 over invertible mixing matrices G,
// explored through random diagonal rescalings and small rotations.
UpperTry upper_search(const CMat& a0, const CMat& b0, int iters,
                      std::mt19937_64 rng, const CMat& g_init) {
  const int r = static_cast<int>(a0.cols());
  CMat g = g_init;
  CMat ginv = g.partialPivLu().inverse();
  auto objective = [&](const CMat& gg, const CMat& gginv) {
    return max_row_norm(a0 * gginv) * max_col_norm(gg * b0);
  };
  double val = objective(g, ginv);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double scale = 0.3;
  int stall = 0;
  bool converged = false;
  for (int it = 0; it < iters; ++it) {
    CMat cand;
    if (uni(rng) < 0.5) {
      // log-normal diagonal rescaling
      CVec d(r);
      for (int j = 0; j < r; ++j) d(j) = std::exp(scale * gauss(rng));
      cand = d.asDiagonal() * g;
    } else {
      CMat z(r, r);
      for (int p = 0; p < r; ++p)
        for (int q = 0; q < r; ++q)
          z(p, q) = scale * cplx(gauss(rng), gauss(rng)) /
                    std::sqrt(double(r));
      cand = (CMat::Identity(r, r) + z) * g;
    }
    const CMat cinv = cand.partialPivLu().inverse();
    if (!cinv.allFinite()) continue;
    const double cv = objective(cand, cinv);
    if (cv < val * (1.0 - 1e-12)) {
      if (val - cv < 1e-6 * val) ++stall; else stall = 0;
      g = cand;
      ginv = cinv;
      val = cv;
    } else {
      ++stall;
    }
    if (stall > 60) {
      if (scale > 1e-3) {
        scale *= 0.5;
        stall = 0;
      } else {
        converged = true;
        break;
      }
    }
  }
  UpperTry out;
  out.value = val;
  out.a = a0 * ginv;
  out.b = g * b0;
  out.converged = converged;
  return out;
}

}  // namespace

SchurUpper schur_upper(const CMat& m, int iters, int restarts, unsigned seed,
                       Exec exec) {
  if (m.size() == 0) throw ArgumentError("schur_upper: empty matrix");
  const double mnorm = m.cwiseAbs().maxCoeff();
  if (mnorm == 0.0)
    return {0.0, CMat::Zero(m.rows(), 1), CMat::Zero(1, m.cols()), true};

  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-13 * sv(0)) ++rank;
  const CMat a0 =
      svd.matrixU().leftCols(rank) *
      sv.head(rank).cwiseSqrt().asDiagonal().toDenseMatrix();
  const CMat b0 = sv.head(rank).cwiseSqrt().asDiagonal().toDenseMatrix() *
                  svd.matrixV().leftCols(rank).adjoint();

  std::vector<UpperTry> tries(restarts);
  for_each_index(static_cast<std::size_t>(restarts), exec, [&](std::size_t i) {
    std::mt19937_64 rng(seed + 7919 * static_cast<unsigned>(i));
    const CMat g_init = (i == 0) ? CMat(CMat::Identity(rank, rank))
                                 : haar_unitary(rng, rank);
    tries[i] = upper_search(a0, b0, iters, std::move(rng), g_init);
  });
  const UpperTry* best = &tries[0];
  for (const UpperTry& t : tries)
    if (t.value < best->value) best = &t;

  SchurUpper out;
  out.upper = best->value;
  out.a = best->a;
  out.b = best->b;
  out.converged = best->converged;
  return out;
}

namespace {

struct LowerTry {
  double value = 0.0;
  CMat x;
};

// SVD helpers that switch to the divide-and-conquer kernel on large grids.
double top_norm(const CMat& x) {
  if (x.rows() >= 32 || x.cols() >= 32) {
    Eigen::BDCSVD<CMat> svd(x);
    return svd.singularValues()(0);
  }
  return operator_norm(x);
}

void top_pair(const CMat& x, CVec& u, CVec& v) {
  if (x.rows() >= 32 || x.cols() >= 32) {
    Eigen::BDCSVD<CMat> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    u = svd.matrixU().col(0);
    v = svd.matrixV().col(0);
    return;
  }
  Eigen::JacobiSVD<CMat> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  u = svd.matrixU().col(0);
  v = svd.matrixV().col(0);
}

CMat polar_unitary(const CMat& a) {
  if (a.rows() >= 32 || a.cols() >= 32) {
    Eigen::BDCSVD<CMat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixV() * svd.matrixU().adjoint();
  }
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixV() * svd.matrixU().adjoint();
}

// Monotone ascent: linearize ||M o X|| at the top singular pair of M o X and
// move X to the unitary maximizer of the linearization.
LowerTry lower_ascent(const CMat& m, CMat x, int max_iters = 200) {
  double val = top_norm(m.cwiseProduct(x));
  for (int it = 0; it < max_iters; ++it) {
    CVec u, v;
    top_pair(m.cwiseProduct(x), u, v);
    // u*(M o X)v = tr(X A) with A = (conj(M) o (u conj(v)^T))^T
    CMat a(m.cols(), m.rows());
    for (int j = 0; j < m.rows(); ++j)
      for (int k = 0; k < m.cols(); ++k)
        a(k, j) = std::conj(u(j)) * m(j, k) * v(k);
    const CMat xn = polar_unitary(a);
    const double vn = top_norm(m.cwiseProduct(xn));
    if (vn <= val * (1.0 + 1e-13)) break;
    x = xn;
    val = vn;
  }
  return {val, std::move(x)};
}

}  // namespace

SchurLower schur_lower(const CMat& m, int trials, unsigned seed, Exec exec) {
  if (m.size() == 0) throw ArgumentError("schur_lower: empty matrix");
  const int p = static_cast<int>(m.rows()), q = static_cast<int>(m.cols());
  if (m.cwiseAbs().maxCoeff() == 0.0)
    return {0.0, CMat::Identity(p, q)};

  std::vector<LowerTry> tries(trials);
  for_each_index(static_cast<std::size_t>(trials), exec, [&](std::size_t i) {
    std::mt19937_64 rng(seed + 104729 * static_cast<unsigned>(i));
    CMat start;
    if (i == 0) {
      start = CMat::Identity(p, q);
    } else if (i == 1) {
      // phase-aligned start: picks up entrywise-positive structure
      start = CMat::Constant(p, q, 1.0 / std::sqrt(double(p) * q));
    } else {
      const int d = std::max(p, q);
      start = haar_unitary(rng, d).topLeftCorner(p, q);
    }
    tries[i] = lower_ascent(m, std::move(start));
  });
  const LowerTry* best = &tries[0];
  for (const LowerTry& t : tries)
    if (t.value > best->value) best = &t;
  return {best->value, best->x};
}

MultiplierBracket bracket_kernel(const Kernel& ker, std::string kernel_id,
                                 std::vector<double> xs, std::vector<double> ys,
                                 unsigned seed, Exec exec) {
  const CMat m = grid_kernel(ker, xs, ys);
  // large grids get fewer ascent starts; the ascent itself does the work
  const int trials = m.rows() >= 128 ? 8 : 64;
  const SchurUpper up = schur_upper(m, 500, 32, seed, exec);
  const SchurLower lo = schur_lower(m, trials, seed, exec);
  MultiplierBracket br;
  br.kernel_id = std::move(kernel_id);
  br.xs = std::move(xs);
  br.ys = std::move(ys);
  br.lower = lo.lower;
  br.upper = std::max(up.upper, lo.lower);  // bracket stays ordered
  br.witness_a = up.a;
  br.witness_b = up.b;
  br.witness_x = lo.x;
  br.upper_converged = up.converged;
  return br;
}

std::vector<double> probe_grid(int n, double span) {
  if (n < 1) throw ArgumentError("probe_grid: n must be >= 1");
  const double tm = std::atan(span);
  std::vector<double> xs(n);
  for (int j = 0; j < n; ++j)
    xs[j] = std::tan(-tm + (2.0 * tm) * (j + 0.5) / n);
  return xs;
}

std::vector<MultiplierBracket> rola_probe(const AnalyticFn& f,
                                          const std::vector<int>& grid_sizes,
                                          unsigned seed, Exec exec) {
  std::vector<MultiplierBracket> out;
  for (int n : grid_sizes) {
    std::vector<double> xs = probe_grid(n);
    out.push_back(bracket_kernel(Kernel::dd_flat(f),
                                 "dd_flat/n=" + std::to_string(n), xs, xs,
                                 seed, exec));
  }
  return out;
}

ReslipProbe reslip_probe(const AnalyticFn& f,
                         const std::vector<int>& grid_sizes, int n_pairs,
                         unsigned seed, Exec exec) {
  ReslipProbe rp;
  for (int n : grid_sizes) {
    std::vector<double> xs = probe_grid(n);
    rp.brackets.push_back(bracket_kernel(Kernel::res_dd(f),
                                         "res_dd/n=" + std::to_string(n), xs,
                                         xs, seed, exec));
  }
  for (int i = 0; i < n_pairs; ++i) {
    const DissipativePair pair =
        gen_pair(seed + 31 * static_cast<unsigned>(i), 4, 0.5,
                 PairKind::generic);
    const CMat fdiff = apply(f, pair.M) - apply(f, pair.L);
    const int d = pair.L.dim();
    const CMat id = CMat::Identity(d, d);
    const CMat rdiff = (pair.M.mat() + kI * id).partialPivLu().inverse() -
                       (pair.L.mat() + kI * id).partialPivLu().inverse();
    const DiskFn phi = transplant_to_disk(f);
    const CMat u = cayley(pair.L.mat());
    const CMat v = cayley(pair.M.mat());
    const CMat pdiff = apply_disk(phi, Operator(v)) - apply_disk(phi, Operator(u));
    rp.max_transplant_gap =
        std::max(rp.max_transplant_gap,
                 std::abs(operator_norm(fdiff) - operator_norm(pdiff)));
    const double rnorm = operator_norm(rdiff);
    if (rnorm > 1e-14)
      rp.ratio_sup = std::max(rp.ratio_sup, operator_norm(fdiff) / rnorm);
  }
  return rp;
}

double schur_norm_bruteforce(const CMat& m, unsigned seed, int trials) {
  if (m.rows() > 3 || m.cols() > 3)
    throw ArgumentError("schur_norm_bruteforce: sizes <= 3 only");
  return schur_lower(m, trials, seed, Exec::Serial).lower;
}

}  // namespace oplab
