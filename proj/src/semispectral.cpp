#include "oplab/semispectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace oplab {

void require_strict_dissipativity(const Operator& l, double eps) {
  for (int j = 0; j < l.spectral().values.size(); ++j)
    if (l.spectral().values(j).imag() < eps)
      throw SingularityError(
          "spectrum within " + std::to_string(eps) +
          " of the real axis: density representation invalid");
}

CMat poisson_density(const CMat& l, double x) {
  require_square(l, "poisson_density");
  const int n = l.rows();
  const CMat shifted = l - x * CMat::Identity(n, n);
  const CMat res = shifted.partialPivLu().inverse();
  const CMat rho =
      (res.adjoint() * imaginary_part(l) * res) / std::numbers::pi;
  return 0.5 * (rho + rho.adjoint());  // enforce exact Hermiticity
}

GridSpec density_grid_spec(const Operator& l, double tol,
                           const std::vector<cplx>& extra_centers) {
  GridSpec spec;
  spec.tol = tol;
  const CVec& vals = l.spectral().values;
  spec.centers.assign(vals.data(), vals.data() + vals.size());
  spec.centers.insert(spec.centers.end(), extra_centers.begin(),
                      extra_centers.end());
  return spec;
}

SemiSpectralDensity::SemiSpectralDensity(Operator l, GridSpec grid)
    : l_(std::move(l)), grid_(std::move(grid)) {
  require_strict_dissipativity(l_);
}

CMat SemiSpectralDensity::mass(Exec exec, AdaptiveInfo* info) const {
  return integrate_matrix_adaptive(
      grid_, [this](double x) { return density(x); }, exec, info);
}

CMat SemiSpectralDensity::interval_mass(double a, double b, Exec exec) const {
  return integrate_matrix_adaptive_interval(
      a, b, grid_, [this](double x) { return density(x); }, exec, nullptr);
}

CMat integrate_functional(const AnalyticFn& f, const Operator& l,
                          const GridSpec& grid, Exec exec,
                          AdaptiveInfo* info) {
  require_strict_dissipativity(l);
  const CMat lm = l.mat();
  return integrate_matrix_adaptive(
      grid,
      [&](double x) { return CMat(f.eval(x) * poisson_density(lm, x)); },
      exec, info);
}

namespace {

CMat psd_sqrt(const CMat& x) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (x + x.adjoint()));
  RVec vals = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * vals.cwiseSqrt().asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace

FiniteDilation finite_dilation(const CMat& t, int n_depth) {
  require_square(t, "finite_dilation");
  if (n_depth < 1) throw ArgumentError("finite_dilation: N must be >= 1");
  if (operator_norm(t) > 1.0 + 1e-10)
    throw ArgumentError("finite_dilation: not a contraction");
  const int d = t.rows();
  const int blocks = n_depth + 2;
  const CMat id = CMat::Identity(d, d);
  const CMat dt = psd_sqrt(id - t.adjoint() * t);    // defect of T
  const CMat dts = psd_sqrt(id - t * t.adjoint());   // defect of T*

  CMat u = CMat::Zero(d * blocks, d * blocks);
  auto block = [&](int r, int c) { return u.block(r * d, c * d, d, d); };
  block(0, 0) = t;
  block(0, blocks - 1) = dts;
  block(1, 0) = dt;
  block(1, blocks - 1) = -t.adjoint();
  for (int j = 2; j < blocks; ++j) block(j, j - 1) = id;

  FiniteDilation fd;
  fd.U = std::move(u);
  fd.N = n_depth;
  fd.dim = d;
  return fd;
}

CMat FiniteDilation::compress_power(int n) const {
  if (n < 0) throw ArgumentError("compress_power: n must be >= 0");
  CMat p = CMat::Identity(U.rows(), U.cols());
  for (int k = 0; k < n; ++k) p = U * p;
  return p.topLeftCorner(dim, dim);
}

namespace {

// Tail of the geometric resolvent series through the finite dilation.
double resolvent_tail_bound(int n_depth, cplx lambda) {
  const cplx gamma = (lambda + kI) / (lambda - kI);
  const double g = std::abs(gamma);
  if (g >= 1.0)
    throw ArgumentError("resolvent_tail_bound: requires Im lambda < 0");
  return 4.0 * std::pow(g, n_depth + 1) /
         (std::abs(kI - lambda) * (1.0 - g));
}

// Compression of g_lambda(U) = (i-lambda)^{-1} (I-U)(I-gamma U)^{-1} to H;
// g_lambda(zeta) = 1/(omega(zeta)-lambda) extended by 0 at zeta = 1, so no
// deflation is needed.
CMat compressed_dilation_resolvent(const FiniteDilation& fd, cplx lambda) {
  const cplx gamma = (lambda + kI) / (lambda - kI);
  const int m = static_cast<int>(fd.U.rows());
  const CMat id = CMat::Identity(m, m);
  const CMat g = (id - fd.U) * (id - gamma * fd.U).partialPivLu().inverse() /
                 (kI - lambda);
  return g.topLeftCorner(fd.dim, fd.dim);
}

}  // namespace

ResolventCheck resolvent_dilation_check(const Operator& l, int n_depth,
                                        cplx lambda) {
  if (!(lambda.imag() < 0.0))
    throw ArgumentError("resolvent_dilation_check: requires Im lambda < 0");
  const FiniteDilation fd = finite_dilation(cayley(l.mat()), n_depth);
  const int n = l.dim();
  const CMat direct =
      (l.mat() - lambda * CMat::Identity(n, n)).partialPivLu().inverse();
  ResolventCheck rc;
  rc.residual =
      operator_norm(direct - compressed_dilation_resolvent(fd, lambda));
  rc.bound = resolvent_tail_bound(n_depth, lambda);
  return rc;
}

namespace {

struct Atom {
  double position;
  CMat weight;  // compressed rank-one projection
};

std::vector<Atom> dilation_atoms(const FiniteDilation& fd) {
  Eigen::ComplexSchur<CMat> schur(fd.U, /*computeU=*/true);
  const CMat& tt = schur.matrixT();
  const CMat& q = schur.matrixU();
  const int m = static_cast<int>(fd.U.rows());
  // U is normal, so the Schur form is diagonal up to roundoff.
  double offdiag = 0.0;
  for (int r = 0; r < m; ++r)
    for (int c = r + 1; c < m; ++c) offdiag += std::norm(tt(r, c));
  if (std::sqrt(offdiag) > 1e-8)
    throw ConditioningError("dilation_atoms: non-diagonal Schur form");
  std::vector<Atom> atoms;
  for (int k = 0; k < m; ++k) {
    const cplx zeta = tt(k, k);
    if (std::abs(zeta - 1.0) < 1e-10) continue;  // deflated direction
    const cplx alpha = kI * (1.0 + zeta) / (1.0 - zeta);
    const CVec head = q.col(k).head(fd.dim);
    atoms.push_back({alpha.real(), head * head.adjoint()});
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.position < b.position; });
  return atoms;
}

double atoms_mass_norm(const std::vector<Atom>& atoms, double a, double b,
                       int dim) {
  CMat acc = CMat::Zero(dim, dim);
  for (const Atom& at : atoms)
    if (at.position > a && at.position < b) acc += at.weight;
  return operator_norm(acc);
}

// integral over (a,b) of the analytic resolvent tail at offset y, 64-node GL.
double transfer_term(int n_depth, double a, double b, double y) {
  const GaussRule& rule = gauss_legendre(64);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = mid + half * rule.nodes[i];
    acc += half * rule.weights[i] *
           resolvent_tail_bound(n_depth, cplx(x, -y));
  }
  return acc / std::numbers::pi;
}

}  // namespace

CrossValidation cross_validate(
    const Operator& l, const GridSpec& grid, int n_depth,
    const std::vector<std::pair<double, double>>& intervals, Exec exec) {
  require_strict_dissipativity(l);
  const FiniteDilation fd = finite_dilation(cayley(l.mat()), n_depth);
  const std::vector<Atom> atoms = dilation_atoms(fd);
  SemiSpectralDensity ssd(l, grid);

  CrossValidation cv;
  cv.deviation = -1.0;
  for (const auto& [a, b] : intervals) {
    if (!(a < b)) throw ArgumentError("cross_validate: need a < b");
    for (const Atom& at : atoms)
      if (std::abs(at.position - a) < 1e-8 || std::abs(at.position - b) < 1e-8)
        throw ArgumentError(
            "cross_validate: interval endpoint collides with a dilation "
            "eigenvalue; reposition the endpoint");

    const CMat lhs = ssd.interval_mass(a, b, exec);
    CMat rhs = CMat::Zero(l.dim(), l.dim());
    for (const Atom& at : atoms)
      if (at.position > a && at.position < b) rhs += at.weight;
    const double dev = operator_norm(lhs - rhs);

    // Poisson-smoothing bound: resolvent-tail transfer at offset y plus
    // endpoint strips of half-width delta for both measures plus the
    // off-strip smoothing remainder 4y/(pi delta); minimized over a small
    // (y, delta) set.
    double best = std::numeric_limits<double>::infinity();
    const double len = b - a;
    for (double delta : {0.02 * len, 0.05 * len, 0.1 * len, 0.25 * len}) {
      double strips = atoms_mass_norm(atoms, a - delta, a + delta, l.dim()) +
                      atoms_mass_norm(atoms, b - delta, b + delta, l.dim());
      strips += operator_norm(ssd.interval_mass(a - delta, a + delta, exec)) +
                operator_norm(ssd.interval_mass(b - delta, b + delta, exec));
      for (double y : {0.001 * len, 0.005 * len, 0.02 * len, 0.08 * len}) {
        const double cand = transfer_term(n_depth, a, b, y) + strips +
                            4.0 * y / (std::numbers::pi * delta);
        best = std::min(best, cand);
      }
    }
    best += 10.0 * grid.tol;  // quadrature slack on the density side

    if (dev > cv.deviation) {
      cv.deviation = dev;
      cv.bound = best;
    }
    if (dev > best) cv.all_within_bound = false;
  }
  return cv;
}

}  // namespace oplab
