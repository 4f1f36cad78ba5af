#pragma once

#include <cstddef>
#include <vector>

#include "expfunc/quadrature.hpp"

namespace expfunc {

enum class Exec { serial, parallel };

// f at every x. The parallel kernel gives bit-identical output to the serial one; the first
// exception raised by any evaluation is rethrown after the loop.
std::vector<double> evaluate_points(const RealFn& f, const std::vector<double>& xs, Exec exec = Exec::parallel,
                                    int workers = 0);

// c_k = h sum_i a_i b_{k-i}, k = 0 .. |a|+|b|-2. Summation order is fixed per output index.
std::vector<double> lattice_convolve(const std::vector<double>& a, const std::vector<double>& b, double h,
                                     Exec exec = Exec::parallel, int workers = 0);

// Worker count actually used for `workers` (0 = runtime default).
int resolve_workers(int workers);

}  // namespace expfunc
