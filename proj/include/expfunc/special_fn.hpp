#pragma once

#include <complex>
#include <functional>

namespace expfunc {

struct SeriesEvalReport {
    double value = 0.0;
    int terms_used = 0;
    double tail_bound = 0.0;  // truncation estimate plus accumulated rounding
    bool converged = false;
};

struct SeriesOptions {
    int max_terms = 500;
    double rel_tol = 1e-15;
    double abs_tol = 0.0;
};

// term(n, log_magnitude, signed_multiplier) describes term n as multiplier * exp(log_magnitude);
// the envelope exp(log_magnitude) must eventually decrease with ratio tending to 0.
using SeriesTerm = std::function<void(int, double&, double&)>;
SeriesEvalReport sum_log_series(int first, const SeriesTerm& term, const SeriesOptions& opt, const char* name);

double sin_pi(double x);

// ln Gamma(x) for x > 0.
double log_gamma(double x);

struct SignedLog {
    double log_abs;
    int sign;
};
// ln|Gamma(x)| and its sign for any real x that is not a pole.
SignedLog log_abs_gamma(double x);

double gamma_fn(double x);
// 1 / Gamma(x); zero at the poles.
double rgamma(double x);

std::complex<double> log_gamma(std::complex<double> z);
// Gamma(a) / Gamma(b) for complex arguments.
std::complex<double> gamma_quotient(std::complex<double> a, std::complex<double> b);

// Gamma(z + a) / Gamma(z + b). Large z uses the Stirling difference form.
double gamma_ratio(double a, double b, double z);
double log_gamma_ratio(double a, double b, double z);

// Regularized incomplete gamma functions.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// sum_{n>=0} Gamma(alpha n + beta) (-x)^n / n!
SeriesEvalReport wright_1F0(double alpha, double beta, double x, SeriesOptions opt = {});

// Density of the positive alpha-stable law with E exp(-s S) = exp(-s^alpha).
SeriesEvalReport stable_density(double alpha, double x, SeriesOptions opt = {});
// P(S > x) by termwise integration of the same series.
SeriesEvalReport stable_survival(double alpha, double x, SeriesOptions opt = {});
// Same density from the integral representation over (0, pi); stable where the series cancels.
double stable_density_integral(double alpha, double x);
// Kanter's function, the integrand kernel of the representation above.
double kanter_a(double alpha, double phi);
// Smallest x at which the stable series is accurate to `rel_tol` within the term budget.
double stable_series_floor(double alpha, double rel_tol = 1e-10, int max_terms = 500);

}  // namespace expfunc
