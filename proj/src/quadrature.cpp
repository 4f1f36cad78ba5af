#include "expfunc/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>

#include "expfunc/error.hpp"

namespace expfunc {

namespace {

void check(double v, double err, double l1, double tol, const char* where) {
    if (!std::isfinite(v)) throw NumericError("quadrature_convergence", std::string(where) + ": non-finite result");
    if (err > std::max(1e3 * tol, 1e-7) * std::max(l1, std::abs(v)) + 1e-300)
        throw NumericError("quadrature_convergence", std::string(where) + ": error estimate too large");
}

}  // namespace

double integrate(const RealFn& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    if (a > b) return -integrate(f, b, a, tol);
    boost::math::quadrature::tanh_sinh<double> ts(15);
    double err = 0.0;
    double l1 = 0.0;
    const double v = ts.integrate(f, a, b, tol, &err, &l1);
    check(v, err, l1, tol, "integrate");
    return v;
}

double integrate_to_infinity(const RealFn& f, double a, double tol) {
    // exp_sinh works on [a, inf) directly; a unit shift keeps the singular end at a.
    boost::math::quadrature::exp_sinh<double> es(12);
    double err = 0.0;
    double l1 = 0.0;
    auto g = [&](double t) { return f(a + t); };
    const double head = integrate(g, 0.0, 1.0, tol);
    auto h = [&](double t) { return f(a + 1.0 + t); };
    const double v = es.integrate(h, tol, &err, &l1);
    check(v, err, l1, tol, "integrate_to_infinity");
    return head + v;
}

double gauss_legendre(const RealFn& f, double a, double b, int panels) {
    const double w = (b - a) / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * w;
        s += boost::math::quadrature::gauss<double, 16>::integrate(f, lo, lo + w);
    }
    return s;
}

}  // namespace expfunc
