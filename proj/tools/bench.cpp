// Compares the serial reference path against the OpenMP path on the two
// quadrature-heavy kernels: the semi-spectral mass integral and the xi grid.
#include <chrono>
#include <iostream>

#include "oplab/generator.hpp"
#include "oplab/semispectral.hpp"
#include "oplab/shift_trace.hpp"

using namespace oplab;

namespace {

template <class Fn>
double time_ms(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  const int dim = argc > 1 ? std::atoi(argv[1]) : 8;
  const unsigned seed = argc > 2 ? static_cast<unsigned>(std::atoi(argv[2])) : 1;

  const Operator l = random_dissipative(seed, dim, 0.3);
  GridSpec grid = density_grid_spec(l, 1e-9);
  SemiSpectralDensity ssd(l, grid);

  CMat mass_serial, mass_parallel;
  const double t_mass_s = time_ms([&] { mass_serial = ssd.mass(Exec::Serial); });
  const double t_mass_p =
      time_ms([&] { mass_parallel = ssd.mass(Exec::Parallel); });
  std::cout << "mass integral dim=" << dim << ": serial " << t_mass_s
            << " ms, parallel " << t_mass_p << " ms, speedup "
            << t_mass_s / t_mass_p << ", agreement "
            << (mass_serial - mass_parallel).norm() << "\n";

  const DissipativePair pair = gen_pair(seed, dim, 0.3, PairKind::generic);
  std::vector<double> s_grid;
  for (int i = 0; i <= 800; ++i) s_grid.push_back(-40.0 + 0.1 * i);

  SpectralShiftResult xi_serial, xi_parallel;
  const double t_xi_s =
      time_ms([&] { xi_serial = xi_from_nu(pair, s_grid, 32, Exec::Serial); });
  const double t_xi_p = time_ms(
      [&] { xi_parallel = xi_from_nu(pair, s_grid, 32, Exec::Parallel); });
  double gap = 0.0;
  for (std::size_t i = 0; i < s_grid.size(); ++i)
    gap = std::max(gap, std::abs(xi_serial.xi[i] - xi_parallel.xi[i]));
  std::cout << "xi grid (" << s_grid.size() << " pts) dim=" << dim
            << ": serial " << t_xi_s << " ms, parallel " << t_xi_p
            << " ms, speedup " << t_xi_s / t_xi_p << ", max |diff| " << gap
            << "\n";
  return 0;
}
