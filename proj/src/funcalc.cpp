#include "oplab/funcalc.hpp"

#include <cmath>
#include <utility>

namespace oplab {

struct AnalyticFn::Node {
  enum Kind { Const, Pole, Sum, Prod, DiskPoly } kind;
  cplx value;                     // Const: c, Pole: p
  std::vector<AnalyticFn> child;  // Sum: terms, Prod: {f, g}
  std::vector<cplx> coeffs;       // DiskPoly
};

namespace {

void check_domain(cplx z) {
  if (z.imag() < -1e-12 * (1.0 + std::abs(z)))
    throw FnDomainError("AnalyticFn: point below clos C+");
}

cplx moebius_b(cplx z) { return (z - kI) / (z + kI); }

cplx horner(const std::vector<cplx>& c, cplx u) {
  cplx acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
  return acc;
}

cplx horner_deriv(const std::vector<cplx>& c, cplx u) {
  cplx acc = 0.0;
  for (std::size_t k = c.size(); k-- > 1;)
    acc = acc * u + double(k) * c[k];
  return acc;
}

// (P(u) - P(v))/(u - v) as sum_k c_k sum_{j<k} u^j v^{k-1-j}; exact on the
// diagonal where it reduces to P'(u).
cplx poly_divided_diff(const std::vector<cplx>& c, cplx u, cplx v) {
  cplx acc = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    cplx inner = 0.0;
    cplx upow = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
      cplx vpow = 1.0;
      for (std::size_t m = 0; m + 1 < k - j; ++m) vpow *= v;
      inner += upow * vpow;
      upow *= u;
    }
    acc += c[k] * inner;
  }
  return acc;
}

}  // namespace

AnalyticFn AnalyticFn::constant(cplx c) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Const;
  n->value = c;
  return AnalyticFn(std::move(n));
}

AnalyticFn AnalyticFn::pole(cplx p) {
  if (!(p.imag() < 0.0))
    throw ArgumentError("AnalyticFn::pole: pole must lie in the open lower half-plane");
  auto n = std::make_shared<Node>();
  n->kind = Node::Pole;
  n->value = p;
  return AnalyticFn(std::move(n));
}

AnalyticFn AnalyticFn::sum(std::vector<AnalyticFn> terms) {
  if (terms.empty()) return constant(0.0);
  auto n = std::make_shared<Node>();
  n->kind = Node::Sum;
  n->child = std::move(terms);
  return AnalyticFn(std::move(n));
}

AnalyticFn AnalyticFn::product(AnalyticFn f, AnalyticFn g) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Prod;
  n->child = {std::move(f), std::move(g)};
  return AnalyticFn(std::move(n));
}

AnalyticFn AnalyticFn::disk_poly(std::vector<cplx> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  auto n = std::make_shared<Node>();
  n->kind = Node::DiskPoly;
  n->coeffs = std::move(coeffs);
  return AnalyticFn(std::move(n));
}

cplx AnalyticFn::eval(cplx z) const {
  check_domain(z);
  switch (node_->kind) {
    case Node::Const:
      return node_->value;
    case Node::Pole:
      return 1.0 / (z - node_->value);
    case Node::Sum: {
      cplx acc = 0.0;
      for (const auto& t : node_->child) acc += t.eval(z);
      return acc;
    }
    case Node::Prod:
      return node_->child[0].eval(z) * node_->child[1].eval(z);
    case Node::DiskPoly:
      return horner(node_->coeffs, moebius_b(z));
  }
  return 0.0;
}

cplx AnalyticFn::deriv(cplx z) const {
  check_domain(z);
  switch (node_->kind) {
    case Node::Const:
      return 0.0;
    case Node::Pole: {
      const cplx r = 1.0 / (z - node_->value);
      return -r * r;
    }
    case Node::Sum: {
      cplx acc = 0.0;
      for (const auto& t : node_->child) acc += t.deriv(z);
      return acc;
    }
    case Node::Prod:
      return node_->child[0].deriv(z) * node_->child[1].eval(z) +
             node_->child[0].eval(z) * node_->child[1].deriv(z);
    case Node::DiskPoly: {
      const cplx zi = z + kI;
      return horner_deriv(node_->coeffs, moebius_b(z)) * (2.0 * kI) / (zi * zi);
    }
  }
  return 0.0;
}

cplx AnalyticFn::divided_diff(cplx z, cplx w) const {
  check_domain(z);
  check_domain(w);
  switch (node_->kind) {
    case Node::Const:
      return 0.0;
    case Node::Pole:
      return -1.0 / ((z - node_->value) * (w - node_->value));
    case Node::Sum: {
      cplx acc = 0.0;
      for (const auto& t : node_->child) acc += t.divided_diff(z, w);
      return acc;
    }
    case Node::Prod:
      // D(fg)(z,w) = f(z) Dg(z,w) + Df(z,w) g(w); exact on the diagonal.
      return node_->child[0].eval(z) * node_->child[1].divided_diff(z, w) +
             node_->child[0].divided_diff(z, w) * node_->child[1].eval(w);
    case Node::DiskPoly:
      // D(P o b)(z,w) = DP(b(z), b(w)) * Db(z,w), Db = 2i (z+i)^{-1}(w+i)^{-1}.
      return poly_divided_diff(node_->coeffs, moebius_b(z), moebius_b(w)) *
             (2.0 * kI) / ((z + kI) * (w + kI));
  }
  return 0.0;
}

AnalyticFn AnalyticFn::shrink_by_pole() const {
  return product(*this, pole(-kI));
}

cplx DiskFn::eval(cplx zeta) const {
  if (std::abs(zeta - 1.0) < 1e-12)
    throw SingularityError("DiskFn: evaluation at the boundary point 1");
  cplx z = kI * (1.0 + zeta) / (1.0 - zeta);
  // |zeta| <= 1 lands in clos C+ up to rounding; clamp the rounding.
  if (z.imag() < 0.0 && z.imag() > -1e-9 * (1.0 + std::abs(z)))
    z = cplx(z.real(), 0.0);
  return f_.eval(z);
}

DiskFn transplant_to_disk(const AnalyticFn& f) { return DiskFn(f); }

namespace {

CVec dissipative_eigenvalues(const Operator& l) {
  const Spectral& s = l.spectral();
  const double tol = 1e-9 * (1.0 + l.mat().norm());
  CVec vals = s.values;
  for (int j = 0; j < vals.size(); ++j) {
    if (vals(j).imag() < -tol)
      throw ArgumentError("apply: eigenvalue below the real axis; L not dissipative");
    if (vals(j).imag() < 0.0) vals(j) = cplx(vals(j).real(), 0.0);
  }
  return vals;
}

}  // namespace

CMat apply(const AnalyticFn& f, const Operator& l) {
  const Spectral& s = l.spectral();
  const CVec vals = dissipative_eigenvalues(l);
  CVec fvals(vals.size());
  for (int j = 0; j < vals.size(); ++j) fvals(j) = f.eval(vals(j));
  return s.vectors * fvals.asDiagonal() * s.vectors_inv;
}

CMat apply_unbounded_form(const AnalyticFn& f, const Operator& l) {
  const int n = l.dim();
  const CMat shifted = l.mat() + kI * CMat::Identity(n, n);
  return shifted * apply(f.shrink_by_pole(), l);
}

CMat apply_disk(const DiskFn& phi, const Operator& t) {
  const Spectral& s = t.spectral();
  const double tol = 1e-9;
  CVec fvals(s.values.size());
  for (int j = 0; j < s.values.size(); ++j) {
    cplx zeta = s.values(j);
    const double r = std::abs(zeta);
    if (r > 1.0 + tol)
      throw ArgumentError("apply_disk: eigenvalue outside the closed disk");
    if (r > 1.0) zeta /= r;
    fvals(j) = phi.eval(zeta);
  }
  return s.vectors * fvals.asDiagonal() * s.vectors_inv;
}

std::vector<BatteryFn> battery(BatteryKind kind, int count) {
  if (count < 1) throw ArgumentError("battery: count must be >= 1");
  std::vector<BatteryFn> out;
  switch (kind) {
    case BatteryKind::resolvent_powers: {
      AnalyticFn f = AnalyticFn::pole(-kI);
      for (int k = 1; k <= count; ++k) {
        out.push_back({"res_pow_" + std::to_string(k), f});
        f = f * AnalyticFn::pole(-kI);
      }
      break;
    }
    case BatteryKind::lower_poles: {
      static const cplx poles[] = {{0.0, -2.0}, {1.0, -1.0},   {-1.0, -2.0},
                                   {2.0, -1.5}, {-0.5, -1.0},  {0.5, -0.75},
                                   {-2.0, -0.5}, {1.5, -2.5}};
      for (int k = 0; k < count && k < 8; ++k)
        out.push_back({"lower_pole_" + std::to_string(k),
                       AnalyticFn::pole(poles[k])});
      break;
    }
    case BatteryKind::disk_polys: {
      static const std::vector<std::vector<cplx>> polys = {
          {0.0, 1.0},
          {0.0, 0.0, 1.0},
          {0.0, 0.5, 0.5},
          {0.0, cplx(0.3, 0.1), 0.0, 0.4},
      };
      for (int k = 0; k < count && k < 4; ++k)
        out.push_back({"disk_poly_" + std::to_string(k),
                       AnalyticFn::disk_poly(polys[k])});
      break;
    }
    case BatteryKind::mixed: {
      const AnalyticFn ri = AnalyticFn::pole(-kI);
      std::vector<BatteryFn> pool;
      pool.push_back({"mixed_res2", ri * AnalyticFn::pole(cplx(0.0, -2.0))});
      pool.push_back({"mixed_disk_res",
                      AnalyticFn::disk_poly({0.0, 1.0}) * ri});
      pool.push_back({"mixed_shift_res",
                      AnalyticFn::pole(cplx(1.0, -1.0)) * ri});
      pool.push_back(
          {"mixed_sum", AnalyticFn::sum({AnalyticFn::product(
                                             AnalyticFn::constant(0.5), ri),
                                         AnalyticFn::pole(cplx(-1.0, -2.0))})});
      for (int k = 0; k < count && k < int(pool.size()); ++k)
        out.push_back(pool[k]);
      break;
    }
  }
  return out;
}

std::vector<BatteryFn> default_battery() {
  std::vector<BatteryFn> out;
  for (auto& f : battery(BatteryKind::resolvent_powers, 2)) out.push_back(f);
  for (auto& f : battery(BatteryKind::lower_poles, 3)) out.push_back(f);
  for (auto& f : battery(BatteryKind::disk_polys, 2)) out.push_back(f);
  for (auto& f : battery(BatteryKind::mixed, 3)) out.push_back(f);
  return out;
}

}  // namespace oplab
