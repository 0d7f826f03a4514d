#pragma once

#include "oplab/operator_core.hpp"

namespace oplab {

// A + i P with A Hermitian and P >= gap * I; strictly dissipative by
// construction.
Operator random_dissipative(unsigned seed, int dim, double gap);

enum class PairKind { generic, trace_class_structured, selfadjoint_base };

// Deterministic seeded pair construction.
//   generic: strictly dissipative L, unstructured K scaled to keep
//     Im L_t >= gap/2 along the whole path;
//   trace_class_structured: K = C0 (L + iI) with ||C0||_{S1} = trace_target
//     exactly, rejection-resampled until M is dissipative;
//   selfadjoint_base: Hermitian L, dissipative K.
DissipativePair gen_pair(unsigned seed, int dim, double gap, PairKind kind,
                         double trace_target = 1.0);

}  // namespace oplab
