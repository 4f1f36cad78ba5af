#pragma once

#include <functional>

namespace expfunc {

using RealFn = std::function<double(double)>;

// Finite interval; tolerates integrable endpoint singularities.
double integrate(const RealFn& f, double a, double b, double tol = 1e-12);
// [a, inf)
double integrate_to_infinity(const RealFn& f, double a, double tol = 1e-12);

// Composite Gauss-Legendre on [a,b] with `panels` equal panels of 16 nodes.
double gauss_legendre(const RealFn& f, double a, double b, int panels);

}  // namespace expfunc
