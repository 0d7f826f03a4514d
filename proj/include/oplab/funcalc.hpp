#pragma once

#include <memory>
#include <string>
#include <vector>

#include "oplab/common.hpp"
#include "oplab/operator_core.hpp"

namespace oplab {

// Battery poles stay at least this far below the real axis.
inline constexpr double kPoleGap = 0.5;

// Rational/transplanted function bounded on clos C+, represented as an
// immutable expression tree over constants, simple poles (z-p)^{-1} with
// Im p < 0, sums, products, and disk-transplants P(b(z)) with
// b(z) = (z-i)/(z+i). Evaluation, derivative and divided difference are exact
// rational operations; the divided difference never subtracts nearby values.
class AnalyticFn {
 public:
  static AnalyticFn constant(cplx c);
  static AnalyticFn pole(cplx p);
  static AnalyticFn sum(std::vector<AnalyticFn> terms);
  static AnalyticFn product(AnalyticFn f, AnalyticFn g);
  static AnalyticFn disk_poly(std::vector<cplx> coeffs);

  cplx eval(cplx z) const;
  cplx deriv(cplx z) const;
  cplx divided_diff(cplx z, cplx w) const;

  // f_i = f * (z+i)^{-1}.
  AnalyticFn shrink_by_pole() const;

  friend AnalyticFn operator+(const AnalyticFn& a, const AnalyticFn& b) {
    return sum({a, b});
  }
  friend AnalyticFn operator*(const AnalyticFn& a, const AnalyticFn& b) {
    return product(a, b);
  }

  struct Node;

 private:
  explicit AnalyticFn(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// phi = f o omega with omega(zeta) = i(1+zeta)(1-zeta)^{-1}; defined on the
// closed disk minus {1}.
class DiskFn {
 public:
  explicit DiskFn(AnalyticFn f) : f_(std::move(f)) {}
  cplx eval(cplx zeta) const;
  const AnalyticFn& halfplane_fn() const { return f_; }

 private:
  AnalyticFn f_;
};

DiskFn transplant_to_disk(const AnalyticFn& f);

// f(L) through the eigenbasis of L; eigenvalues with a tiny negative
// imaginary part are projected onto the real axis before evaluation.
CMat apply(const AnalyticFn& f, const Operator& l);

// (L + iI) f_i(L); agrees with apply(f, L) in finite dimension.
CMat apply_unbounded_form(const AnalyticFn& f, const Operator& l);

// phi(T) through the eigenbasis of a contraction T; eigenvalues slightly
// outside the closed disk are projected onto the circle.
CMat apply_disk(const DiskFn& phi, const Operator& t);

enum class BatteryKind { resolvent_powers, lower_poles, disk_polys, mixed };

struct BatteryFn {
  std::string id;
  AnalyticFn fn;
};

std::vector<BatteryFn> battery(BatteryKind kind, int count);

// The default test corpus: >= 8 functions mixing all kinds. Every member has
// (z+i)f(z) bounded rational.
std::vector<BatteryFn> default_battery();

}  // namespace oplab
