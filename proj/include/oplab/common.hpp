#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace oplab {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

// Hard gate for eigen-path operations; nearly defective matrices are rejected.
inline constexpr double kEigvecConditionLimit = 1e8;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct FnDomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConditioningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require_square(const CMat& x, const char* who) {
  if (x.rows() != x.cols() || x.rows() < 1)
    throw DimensionError(std::string(who) + ": matrix must be square and nonempty");
}

inline void require_same_dim(const CMat& a, const CMat& b, const char* who) {
  require_square(a, who);
  require_square(b, who);
  if (a.rows() != b.rows())
    throw DimensionError(std::string(who) + ": dimension mismatch");
}

// Execution policy for the data-parallel kernels. Serial is the reference
// implementation; Parallel uses OpenMP with a deterministic reduction order.
enum class Exec { Serial, Parallel };

}  // namespace oplab
